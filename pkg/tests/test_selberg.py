import math

import numpy as np
import pytest

from zetascope.errors import InsufficientZerosError
from zetascope.zeta_engine import (
    SelbergSpec,
    log_zeta_tracked,
    selberg_log_zeta,
    selberg_zeta_prime_over_zeta,
    von_mangoldt_table,
    zero_ordinates,
)

LOG_ZETA3 = 0.1840341753914914  # 30-digit log zeta(3), frozen


def test_absolute_convergence_region(zeros_to_110):
    """At s = 3 the formula must converge to the Dirichlet series of
    -zeta'/zeta as the damping point grows."""
    lam = von_mangoldt_table(300_000)
    n = np.arange(2, 300_001, dtype=float)
    series = -np.sum(lam[2:] / n**3)
    spec = SelbergSpec(x=200.0, zeros=zeros_to_110)
    value, residual = selberg_zeta_prime_over_zeta(3.0 + 0j, spec)
    assert value == pytest.approx(series, abs=1e-6)
    assert residual < 1e-6


def test_residual_improves_with_damping_point(zeros_to_110):
    rs = {}
    for x in (10.0, 40.0):
        vals = []
        for j in range(6):
            s = 2.0 + 1j * (50.0 + 0.31 * (j - 3))
            _, r = selberg_zeta_prime_over_zeta(s, SelbergSpec(x=x, zeros=zeros_to_110))
            vals.append(r)
        rs[x] = float(np.median(vals))
    assert rs[40.0] < rs[10.0]


def test_trivial_zero_series_envelope(zeros_to_110):
    """The trivial-zero sum obeys the geometric envelope pointwise."""
    s = 2.0 + 50.0j
    x = 20.0
    spec = SelbergSpec(x=x, zeros=zeros_to_110)
    q = np.arange(1, spec.trivial_cutoff(s.real) + 1, dtype=float)
    series = np.sum(
        (x ** (-2 * q - s) - x ** (-2 * (2 * q + s))) / (2 * q + s) ** 2
    )
    envelope = x ** (-2 - s.real) / (1 - x**-2) + x ** (-4 - 2 * s.real) / (1 - x**-4)
    assert abs(series) <= envelope


def test_insufficient_zeros_raises(zeros_to_110):
    with pytest.raises(InsufficientZerosError):
        selberg_zeta_prime_over_zeta(2.0 + 100.0j, SelbergSpec(x=10.0, zeros=zeros_to_110))


def test_log_formula_at_three(zeros_to_110):
    for x in (50.0, 100.0):
        val = selberg_log_zeta(3.0 + 0j, SelbergSpec(x=x, zeros=zeros_to_110))
        assert val == pytest.approx(LOG_ZETA3, abs=1e-4)


def test_log_formula_accuracy_grows_with_x(zeros_to_1060):
    """Median residual against the tracked logarithm improves from x = 10
    to x = 40; the gain is modest because the zero-sum truncation tail is
    phase-dominated at this height."""
    res = {}
    for x in (10.0, 40.0):
        vals = []
        for j in range(12):
            tj = 1000.0 + 1.1 * (j - 5.5)
            refj = log_zeta_tracked(0.8, tj)
            v = selberg_log_zeta(0.8 + 1j * tj, SelbergSpec(x=x, zeros=zeros_to_1060))
            vals.append(abs(v - refj))
        res[x] = float(np.median(vals))
    assert res[40.0] < res[10.0]
    assert res[40.0] < 1e-3


def test_f_kernel_decays_far_left():
    from zetascope.zeta_engine import _f_kernel

    s = 3.0 + 0j
    x = 50.0
    mags = [abs(_f_kernel(s, np.array([-2.0 * q + 0j]), x)[0]) for q in (1, 2, 3, 4)]
    assert mags[0] > mags[1] > mags[2] > mags[3]
    # geometric decay shape x^(Re z - sigma) per extra trivial zero
    assert mags[1] / mags[0] < 2.0 * x**-2


def test_spec_validation(zeros_to_110):
    with pytest.raises(ValueError):
        SelbergSpec(x=1.5, zeros=zeros_to_110)
    with pytest.raises(ValueError):
        SelbergSpec(x=10.0, zeros=np.array([20.0, 14.0]))
