import math

import numpy as np
import pytest

from zetascope.errors import (
    PathThroughZeroError,
    WindowConstraintError,
    ZeroConstantTermError,
)
from zetascope.scan import (
    Hit,
    ScanResult,
    ScanWindow,
    _run_scan,
    density_estimate,
    refine_hit,
    scan_log_derivs,
    scan_zeta_derivs,
)
from zetascope.zeta_engine import log_zeta_derivs, zeta_derivs


def test_window_constraint_rejection():
    with pytest.raises(WindowConstraintError) as err:
        ScanWindow(t=1e4, h=10.0, eps=0.1)
    assert err.value.h_min == pytest.approx(20.7526, abs=1e-3)
    assert "20.75" in str(err.value)
    with pytest.raises(WindowConstraintError):
        ScanWindow(t=100.0, h=200.0, eps=0.1)  # H > T


def test_window_default_step_and_grid():
    w = ScanWindow(t=1000.0, h=20.0, eps=0.1)
    assert w.step == pytest.approx(2.0 * math.pi / (20.0 * math.log(1000.0)))
    g = w.grid()
    assert g[0] == 1000.0
    assert g[-1] <= 1000.0 + 20.0


def test_degenerate_two_point_grid():
    w = ScanWindow(t=2.0, h=1.26, eps=0.1, step=1.26)
    assert len(w.grid()) == 2


def test_refine_hit_known_minimum():
    hit = refine_hit(3.1, lambda t: abs(math.sin(t)), 0.1)
    assert abs(hit.tau - math.pi) < 1e-6


def test_refine_hit_constant_objective():
    hit = refine_hit(5.0, lambda t: 7.25, 0.5)
    assert hit.tau == 5.0


def test_refine_never_leaves_radius():
    hit = refine_hit(3.0, lambda t: -t, 0.05)  # pushes right, must clamp
    assert hit.tau <= 3.05 + 1e-12


def test_self_referential_log_scan():
    targets, _ = log_zeta_derivs(1, 0.75, 500.0)
    w = ScanWindow(t=495.0, h=10.0, eps=1e-3)
    result = scan_log_derivs(tuple(targets), 0.75, w)
    assert len(result.hits) >= 1
    best = min(result.hits, key=lambda h: abs(h.tau - 500.0))
    assert abs(best.tau - 500.0) < w.step
    assert best.max_residual < 1e-3


def test_self_referential_zeta_scan():
    targets, _ = zeta_derivs(2, 0.75 + 777.7j)
    w = ScanWindow(t=770.0, h=15.0, eps=1e-3)
    result = scan_zeta_derivs(tuple(targets), 0.75, w)
    assert len(result.hits) >= 1
    best = min(result.hits, key=lambda h: abs(h.tau - 777.7))
    assert abs(best.tau - 777.7) < w.step
    assert best.max_residual < 1e-3


def test_eps_monotone_hit_sets():
    targets, _ = zeta_derivs(0, 0.9 + 10000.0j)
    lo = scan_zeta_derivs((1.0,), 0.9, ScanWindow(t=1e4, h=25.0, eps=0.25))
    hi = scan_zeta_derivs((1.0,), 0.9, ScanWindow(t=1e4, h=25.0, eps=0.5))
    lo_taus = {round(h.tau, 6) for h in lo.hits}
    hi_taus = {round(h.tau, 6) for h in hi.hits}
    assert lo_taus <= hi_taus


def test_scan_near_one_is_nonempty():
    # |zeta(0.9 + it) - 1| dips below 0.35 repeatedly at this height
    w = ScanWindow(t=1e4, h=25.0, eps=0.35)
    result = scan_zeta_derivs((1.0,), 0.9, w)
    assert len(result.hits) >= 1
    for h in result.hits:
        assert h.max_residual < 0.35


def test_zero_constant_target_rejected():
    w = ScanWindow(t=100.0, h=10.0, eps=0.1)
    with pytest.raises(ZeroConstantTermError):
        scan_zeta_derivs((0.0,), 0.75, w)


def test_thread_determinism():
    targets, _ = zeta_derivs(1, 0.75 + 300.0j)
    w = ScanWindow(t=295.0, h=10.0, eps=1e-2)
    a = scan_zeta_derivs(tuple(targets), 0.75, w, threads=1)
    b = scan_zeta_derivs(tuple(targets), 0.75, w, threads=3)
    assert [(h.tau, h.residuals) for h in a.hits] == [(h.tau, h.residuals) for h in b.hits]


def test_skip_recording():
    """Grid points where evaluation fails are skipped with a diagnostic."""
    w = ScanWindow(t=10.0, h=5.0, eps=0.5, step=1.0)
    grid = w.grid()

    def objective(tau, verify=False):
        if abs(tau - 12.0) < 0.5:
            raise PathThroughZeroError("synthetic zero on path")
        return np.array([abs(math.sin(tau)) + 0.6])  # never below eps

    result = _run_scan(objective, grid, w, 0.75, "log", threads=1)
    assert result.hits == []
    assert any(abs(s["tau"] - 12.0) < 0.5 for s in result.skipped)


def test_density_estimate_arithmetic():
    w = ScanWindow(t=100.0, h=10.0, eps=0.1, step=0.5)
    empty = ScanResult(hits=[], skipped=[], n_grid=21, window=w, sigma0=0.75, mode="log")
    assert density_estimate(empty) == 0.0
    full = ScanResult(
        hits=[Hit(tau=100.0 + 0.5 * i, residuals=(0.05,), refined=True) for i in range(21)],
        skipped=[], n_grid=21, window=w, sigma0=0.75, mode="log",
    )
    # 21 points at step 0.5 over h = 10 overshoots by one step; clipped to 1
    assert density_estimate(full) == 1.0


def test_hit_record_schema():
    h = Hit(tau=1.5, residuals=(0.1, 0.2), refined=True, wall_time=0.25)
    rec = h.to_record(0.75, 0.3)
    assert set(rec) == {"tau", "sigma0", "n", "eps", "residuals", "refined", "wall_time"}
    assert rec["n"] == 2
