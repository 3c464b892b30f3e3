import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetascope.phases import (
    LogDerivSpec,
    PhaseAssignment,
    alternating_phases,
    default_ell_max,
    log_euler_deriv,
    prime_phase_sum,
    prime_phase_sum_deriv,
)
from zetascope.primes import primes_up_to

SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def oracle_sum(primes, s, theta):
    """Term-by-term oracle with scalar cmath arithmetic."""
    total = 0j
    for p in primes:
        total += cmath.exp(-2j * math.pi * theta.get(p)) * p ** (-s)
    return total


def oracle_log_deriv(primes, k, sigma0, theta, ell_max):
    """Independent double-sum oracle, scalar arithmetic throughout."""
    total = 0j
    for p in primes:
        for ell in range(1, ell_max + 1):
            total += (
                cmath.exp(-2j * math.pi * ell * theta.get(p))
                * (-ell * math.log(p)) ** k
                / (ell * p ** (ell * sigma0))
            )
    return total


def test_alternating_pattern():
    table = primes_up_to(10)
    th = alternating_phases(table)
    assert dict(th.items()) == {2: 0.0, 3: 0.5, 5: 0.0, 7: 0.5}
    assert len(alternating_phases(primes_up_to(1))) == 0
    assert dict(alternating_phases(primes_up_to(2)).items()) == {2: 0.0}


def test_phase_assignment_validates_and_reduces():
    th = PhaseAssignment({2: 1.25, 3: -0.5})
    assert th.get(2) == pytest.approx(0.25)
    assert th.get(3) == pytest.approx(0.5)
    assert th.get(5) == 0.0  # unassigned defaults to zero
    with pytest.raises(ValueError):
        PhaseAssignment({4: 0.1})


def test_phase_sum_closed_forms():
    z = PhaseAssignment({})
    assert prime_phase_sum([2, 3], 1.0, z) == pytest.approx(5.0 / 6.0)
    half = PhaseAssignment({2: 0.5})
    assert prime_phase_sum([2], 1.0, half) == pytest.approx(-0.5)
    assert prime_phase_sum([], 2.0, z) == 0


def test_phase_sum_matches_oracle():
    theta = PhaseAssignment({2: 0.0, 3: 0.2, 5: 0.7})
    s = 0.75 + 10j
    got = prime_phase_sum([2, 3, 5], s, theta)
    assert got == pytest.approx(oracle_sum([2, 3, 5], s, theta), abs=1e-14)


def test_phase_sum_deriv_closed_forms():
    z = PhaseAssignment({})
    expect = -math.log(2) / 2 - math.log(3) / 3
    assert prime_phase_sum_deriv([2, 3], 1, 1.0, z) == pytest.approx(expect)
    assert expect == pytest.approx(-0.71278, abs=1e-5)
    # k = 0 reduces to the plain sum
    th = PhaseAssignment({2: 0.3, 3: 0.6})
    assert prime_phase_sum_deriv([2, 3], 0, 0.8, th) == pytest.approx(
        prime_phase_sum([2, 3], 0.8, th)
    )


def test_phase_sum_deriv_oracle_k2():
    table = primes_up_to(7)
    th = alternating_phases(table)
    got = prime_phase_sum_deriv([2, 3, 5, 7], 2, 0.75, th)
    want = 0j
    for p in [2, 3, 5, 7]:
        want += cmath.exp(-2j * math.pi * th.get(p)) * math.log(p) ** 2 * p ** (-0.75)
    assert got == pytest.approx(want, abs=1e-14)


def test_log_euler_deriv_single_prime_values():
    z = PhaseAssignment({})
    spec = LogDerivSpec(k=0, sigma0=1.0, ell_max=60)
    val, bound = log_euler_deriv([2], spec, z)
    assert val == pytest.approx(math.log(2.0), abs=1e-10)
    assert bound < 1e-10

    spec1 = LogDerivSpec(k=1, sigma0=1.0, ell_max=60)
    val1, _ = log_euler_deriv([2], spec1, z)
    assert val1 == pytest.approx(-math.log(2.0), abs=1e-10)

    half = PhaseAssignment({2: 0.5})
    val2, _ = log_euler_deriv([2], spec, half)
    assert val2 == pytest.approx(-math.log(1.5), abs=1e-10)
    assert val2 == pytest.approx(-0.4054651, abs=1e-7)


def test_log_euler_deriv_matches_double_sum_oracle():
    theta = PhaseAssignment({2: 0.13, 3: 0.5, 5: 0.81, 7: 0.44})
    for k in (0, 1, 2):
        spec = LogDerivSpec(k=k, sigma0=0.6, ell_max=120)
        got, _ = log_euler_deriv([2, 3, 5, 7], spec, theta)
        want = oracle_log_deriv([2, 3, 5, 7], k, 0.6, theta, 120)
        assert got == pytest.approx(want, abs=1e-12)


def test_tail_bound_is_honest():
    theta = PhaseAssignment({2: 0.3})
    shallow = LogDerivSpec(k=1, sigma0=0.7, ell_max=6)
    deep = LogDerivSpec(k=1, sigma0=0.7, ell_max=200)
    v_shallow, bound = log_euler_deriv([2, 3, 5], shallow, theta)
    v_deep, _ = log_euler_deriv([2, 3, 5], deep, theta)
    assert abs(v_deep - v_shallow) <= bound


def test_default_ell_max_controls_tail():
    ps = primes_up_to(1000).primes.tolist()
    for k in (0, 2):
        ell = default_ell_max(ps, k, 0.6, tol=1e-14)
        est = (
            2.0 ** (-ell * 0.6) * len(ps) * (ell * math.log(max(ps))) ** k
            / (1 - 2.0 ** (-0.6))
        )
        assert est < 1e-14


def test_log_vs_linear_proxy_bound():
    """The gap between the log-Euler derivative and the linear prime sum is
    controlled by the second-power tail sum (prime-power expansion shape)."""
    rng = np.random.default_rng(5)
    ps = [11, 13, 17, 19, 23]
    for k in (0, 1, 2):
        for _ in range(5):
            theta = PhaseAssignment({p: rng.uniform() for p in ps})
            sigma0 = rng.uniform(0.55, 0.95)
            full, _ = log_euler_deriv(ps, LogDerivSpec(k, sigma0, ell_max=150), theta)
            lin = prime_phase_sum_deriv(ps, k, sigma0, theta)
            # constant from the ell >= 2 tail with the worst prime p = min(ps)
            c_k = sum(
                ell ** max(k - 1, 0) * min(ps) ** (-(ell - 2) * sigma0)
                for ell in range(2, 200)
            )
            bound = c_k * sum(math.log(p) ** k * p ** (-2 * sigma0) for p in ps)
            assert abs(full - lin) <= bound


@settings(max_examples=40, deadline=None)
@given(
    shift=st.integers(min_value=-3, max_value=3),
    t2=st.floats(0, 1, exclude_max=True),
    t3=st.floats(0, 1, exclude_max=True),
)
def test_integer_shift_periodicity(shift, t2, t3):
    theta = PhaseAssignment({2: t2, 3: t3})
    shifted = theta.shifted({2: float(shift), 3: float(-shift)})
    s = 0.8 + 3j
    assert prime_phase_sum([2, 3], s, theta) == pytest.approx(
        prime_phase_sum([2, 3], s, shifted), abs=1e-14
    )


@settings(max_examples=40, deadline=None)
@given(
    t2=st.floats(0, 1, exclude_max=True),
    t5=st.floats(0, 1, exclude_max=True),
    sig=st.floats(0.55, 2.0),
    t=st.floats(-20.0, 20.0),
)
def test_conjugation_symmetry(t2, t5, sig, t):
    theta = PhaseAssignment({2: t2, 5: t5})
    s = complex(sig, t)
    lhs = prime_phase_sum([2, 5], s.conjugate(), theta.negated())
    rhs = prime_phase_sum([2, 5], s, theta)
    assert lhs == pytest.approx(rhs.conjugate(), abs=1e-13)


def test_serialization_records():
    th = PhaseAssignment({3: 0.25, 2: 0.0})
    assert th.to_records() == [
        {"prime": 2, "theta": 0.0},
        {"prime": 3, "theta": 0.25},
    ]
