"""Direct zeta evaluation, branch-tracked logarithms, Cauchy-circle
derivatives, Selberg's explicit formula, and rectangle zero counting.

The evaluator is Euler-Maclaurin with a truncation point scaling linearly in
|Im s| and a Bernoulli correction series whose terms shrink geometrically
once the truncation point passes |Im s| / (2 pi). Everything is vectorised
over numpy arrays of points; scalar wrappers sit on top.

Branch convention: log zeta is the principal branch on the real segment
(1, inf) and is continued along horizontal segments from sigma = 10, where
|zeta - 1| < 2^-9 keeps the principal branch unambiguous.
"""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import loggamma

from .errors import (
    BoundaryZeroError,
    InsufficientZerosError,
    PathThroughZeroError,
    PoleAtOneError,
    ToleranceUnreachableError,
)
from .primes import primes_up_to

__all__ = [
    "ZetaEval",
    "SelbergSpec",
    "ZeroCount",
    "zeta",
    "zeta_array",
    "log_zeta_tracked",
    "log_zeta_deriv",
    "log_zeta_derivs",
    "zeta_derivs",
    "chi_factor",
    "siegel_theta",
    "hardy_z",
    "zero_ordinates",
    "riemann_count_estimate",
    "count_zeros",
    "zero_density_envelope",
    "von_mangoldt_table",
    "weighted_von_mangoldt",
    "selberg_zeta_prime_over_zeta",
    "selberg_log_zeta",
    "zeros_to_csv",
    "zeros_from_csv",
]

_IM_LIMIT = 1.0e8  # accuracy envelope of the plain Euler-Maclaurin evaluator


# ----------------------------------------------------------------------
# Euler-Maclaurin evaluator
# ----------------------------------------------------------------------

@functools.lru_cache(maxsize=1)
def _bernoulli_over_factorial(kmax: int = 64) -> np.ndarray:
    """B_{2k}/(2k)! for k = 1..kmax, built once (shared immutable cache)."""
    import mpmath as mp

    with mp.workdps(40):
        vals = [float(mp.bernoulli(2 * k) / mp.factorial(2 * k)) for k in range(1, kmax + 1)]
    return np.array(vals)


@dataclass(frozen=True)
class ZetaEval:
    value: complex
    est_error: float
    terms_used: int


def _em_eval(s: np.ndarray, n_trunc: int, n_bern: int):
    """Euler-Maclaurin at all points of s with fixed truncation settings."""
    bern = _bernoulli_over_factorial()
    n = np.arange(1, n_trunc, dtype=float)
    log_n = np.log(n)
    vals = np.empty(s.shape, dtype=complex)
    chunk = max(1, (1 << 22) // n_trunc)
    for i in range(0, len(s), chunk):
        sl = s[i : i + chunk]
        vals[i : i + chunk] = np.exp(-np.outer(sl, log_n)).sum(axis=1)
    nf = float(n_trunc)
    vals += nf ** (1.0 - s) / (s - 1.0) + 0.5 * nf ** (-s)
    # correction terms, built iteratively to avoid factorial overflow
    term = bern[0] * s * nf ** (-s - 1.0)
    for k in range(1, n_bern + 1):
        vals += term
        ratio = (bern[k] / bern[k - 1]) * (s + (2 * k - 1)) * (s + 2 * k) / nf**2
        term = term * ratio
    # classical remainder bound: |next term| * |s + 2K + 1| / (sigma + 2K + 1)
    sigma = s.real
    guard = np.abs(s + (2 * n_bern + 1)) / np.maximum(sigma + 2 * n_bern + 1, 1.0)
    err = np.abs(term) * guard * 2.0
    # floating-point accumulation floor: eps * log2(N) * sum |n^-s|
    one_minus = np.where(np.abs(1.0 - sigma) < 1e-9, 1e-9, 1.0 - sigma)
    with np.errstate(over="ignore"):
        absum = 1.0 + np.abs((nf ** np.minimum(one_minus, 300.0) - 1.0) / one_minus)
    err += 1.1e-16 * math.log2(n_trunc) * absum
    return vals, err


def zeta_array(s, tol: float = 1e-11) -> np.ndarray:
    """Vectorised zeta via Euler-Maclaurin, certified to tol per point."""
    s_arr = np.asarray(s, dtype=complex)
    flat = s_arr.ravel()
    if flat.size == 0:
        return np.zeros(s_arr.shape, dtype=complex)
    if np.any(np.abs(flat - 1.0) < 1e-12):
        raise PoleAtOneError("zeta has a pole at s = 1")
    tmax = float(np.max(np.abs(flat.imag)))
    if tmax > _IM_LIMIT:
        raise ToleranceUnreachableError(
            f"|Im s| = {tmax:g} outside the evaluator envelope {_IM_LIMIT:g}"
        )
    n_trunc = int(max(24, (tmax + 60.0) / 3.0 + 8))
    n_bern = 30
    for _ in range(4):
        vals, err = _em_eval(flat, n_trunc, n_bern)
        if float(np.max(err)) <= tol:
            return vals.reshape(s_arr.shape)
        n_trunc = int(n_trunc * 1.8) + 16
        n_bern = min(n_bern + 8, 60)
    raise ToleranceUnreachableError(
        f"could not certify tolerance {tol:g} (max error {float(np.max(err)):.3g})"
    )


def _zeta_values_raw(s_flat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate without a tolerance gate; returns (values, error estimates).

    Used where the caller scales tolerances itself (e.g. Cauchy circles
    reaching into sigma < 0, where the roundoff floor grows with |zeta| but
    stays small relative to it).
    """
    tmax = float(np.max(np.abs(s_flat.imag))) if s_flat.size else 0.0
    if tmax > _IM_LIMIT:
        raise ToleranceUnreachableError(
            f"|Im s| = {tmax:g} outside the evaluator envelope {_IM_LIMIT:g}"
        )
    if np.any(np.abs(s_flat - 1.0) < 1e-12):
        raise PoleAtOneError("zeta has a pole at s = 1")
    n_trunc = int(max(24, (tmax + 60.0) / 3.0 + 8))
    return _em_eval(s_flat, n_trunc, 30)


def zeta(s: complex, tol: float = 1e-11) -> ZetaEval:
    """Scalar zeta with a certified error estimate."""
    s = complex(s)
    if abs(s - 1.0) < 1e-12:
        raise PoleAtOneError("zeta has a pole at s = 1")
    if abs(s.imag) > _IM_LIMIT:
        raise ToleranceUnreachableError(
            f"|Im s| = {abs(s.imag):g} outside the evaluator envelope {_IM_LIMIT:g}"
        )
    flat = np.array([s], dtype=complex)
    n_trunc = int(max(24, (abs(s.imag) + 60.0) / 3.0 + 8))
    n_bern = 30
    for _ in range(4):
        vals, err = _em_eval(flat, n_trunc, n_bern)
        if float(err[0]) <= tol:
            return ZetaEval(complex(vals[0]), float(err[0]), n_trunc)
        n_trunc = int(n_trunc * 1.8) + 16
        n_bern = min(n_bern + 8, 60)
    raise ToleranceUnreachableError(f"could not certify tolerance {tol:g} at s = {s}")


# ----------------------------------------------------------------------
# Branch tracking
# ----------------------------------------------------------------------

def _adaptive_track(points_fn, params: np.ndarray, *, max_step: float = 1.0,
                    min_gap: float = 1e-9, tol: float = 1e-11):
    """Evaluate zeta along a path, refining until arg steps are small.

    Returns (params, values, arg_steps) with arg_steps[i] the principal
    argument of values[i+1] / values[i]. Raises PathThroughZeroError when
    refinement stalls or a value collapses toward zero.
    """
    params = np.asarray(params, dtype=float)
    vals = zeta_array(points_fn(params), tol=tol)
    for _ in range(48):
        if np.any(np.abs(vals) < 1e-12):
            raise PathThroughZeroError("zeta vanishes on the tracking path")
        steps = np.angle(vals[1:] / vals[:-1])
        bad = np.abs(steps) > max_step
        if not np.any(bad):
            return params, vals, steps
        gaps = params[1:][bad] - params[:-1][bad]
        if float(np.min(np.abs(gaps))) < min_gap:
            raise PathThroughZeroError("argument jump persists below minimum step")
        mids = 0.5 * (params[:-1][bad] + params[1:][bad])
        new_vals = zeta_array(points_fn(mids), tol=tol)
        params = np.concatenate([params, mids])
        vals = np.concatenate([vals, new_vals])
        order = np.argsort(params, kind="stable")
        params, vals = params[order], vals[order]
    raise PathThroughZeroError("tracking did not stabilise")


def log_zeta_tracked(sigma0: float, t: float) -> complex:
    """log zeta(sigma0 + i t) continued along the horizontal segment.

    Seeds the principal branch at sigma = 10 (where zeta is within 2^-9 of 1)
    and varies the argument continuously down to sigma0. The real part is
    log|zeta| exactly.
    """
    s_end = complex(sigma0, t)
    if abs(s_end - 1.0) < 1e-9:
        raise PoleAtOneError("tracking endpoint at the pole")
    if sigma0 >= 10.0:
        v = zeta_array(np.array([s_end]))[0]
        return complex(math.log(abs(v)), math.atan2(v.imag, v.real))
    # denser sampling where the argument moves fastest (small sigma)
    coarse = np.linspace(10.0, max(2.0, sigma0), 12)
    fine = np.linspace(min(2.0, 10.0), sigma0, 28) if sigma0 < 2.0 else np.array([sigma0])
    sigmas = np.unique(np.concatenate([coarse, fine]))[::-1]  # 10 -> sigma0
    u = np.linspace(0.0, 1.0, len(sigmas))
    sig_of_u = lambda uu: np.interp(uu, u, sigmas)
    _, vals, steps = _adaptive_track(lambda uu: sig_of_u(uu) + 1j * t, u)
    v0, v_end = vals[0], vals[-1]
    total_arg = math.atan2(v0.imag, v0.real) + float(np.sum(steps))
    return complex(math.log(abs(v_end)), total_arg)


def _circle_log_values(center: complex, radius: float, nodes: int):
    """Branch-consistent log zeta at equispaced circle nodes.

    Anchors the branch at angle 0 via horizontal tracking, then continues
    around the circle. A nonzero net winding means the circle encloses a
    zero, which invalidates any log-based contour use.
    """
    anchor = log_zeta_tracked(center.real + radius, center.imag)
    phis = np.linspace(0.0, 2.0 * math.pi, nodes + 1)
    pts_fn = lambda ph: center + radius * np.exp(1j * ph)
    params, vals, steps = _adaptive_track(pts_fn, phis, max_step=0.9)
    cum = np.concatenate([[0.0], np.cumsum(steps)])
    if abs(cum[-1]) > 0.5:
        raise PathThroughZeroError(
            f"circle around {center:g} (r={radius:g}) encloses a zero "
            f"(net winding {cum[-1] / (2 * math.pi):.2f})"
        )
    idx = np.searchsorted(params, phis[:-1])
    logs = np.log(np.abs(vals[idx])) + 1j * (anchor.imag + cum[idx])
    # real part of the anchor must match log|zeta| at angle 0 by construction
    return phis[:-1], logs


def log_zeta_derivs(kmax: int, sigma0: float, t: float, radius: float | None = None,
                    nodes: int = 64, settle: float = 1e-11) -> tuple[np.ndarray, float]:
    """Derivatives d^k/ds^k log zeta at sigma0 + i t for k = 0..kmax.

    Cauchy circle quadrature of the tracked logarithm; the trapezoidal rule
    on a circle is spectrally accurate, and node doubling continues until
    successive derivative sets agree to `settle`. Returns (array of k+1
    values, estimated error).
    """
    if radius is None:
        radius = 0.8 * (sigma0 - 0.5)
    radius = min(radius, 0.5 * abs(complex(sigma0, t) - 1.0))
    if radius <= 0:
        raise ValueError("radius must be positive (sigma0 too close to 1/2?)")
    center = complex(sigma0, t)
    prev = None
    m = max(nodes, 2 * (kmax + 1))
    for _ in range(5):
        phis, logs = _circle_log_values(center, radius, m)
        ks = np.arange(kmax + 1)
        coeff = (logs[None, :] * np.exp(-1j * np.outer(ks, phis))).mean(axis=1)
        derivs = coeff * np.array([math.factorial(k) for k in ks]) / radius**ks.astype(float)
        if prev is not None:
            change = float(np.max(np.abs(derivs - prev)))
            if change < settle * (1.0 + float(np.max(np.abs(derivs)))):
                return derivs, change
        prev = derivs
        m *= 2
    return prev, change


def log_zeta_deriv(k: int, sigma0: float, t: float, radius: float | None = None) -> complex:
    """Single derivative of log zeta (k = 0 reproduces log_zeta_tracked)."""
    derivs, _ = log_zeta_derivs(k, sigma0, t, radius)
    return complex(derivs[k])


def zeta_derivs(kmax: int, center: complex, radius: float | None = None,
                nodes: int = 128) -> tuple[np.ndarray, float]:
    """Plain zeta derivatives at a point by Cauchy circle quadrature.

    No branch issues here; the only excluded point is the pole at s = 1.
    """
    center = complex(center)
    if radius is None:
        radius = min(1.5, 0.5 * abs(center - 1.0))
    if abs(center - 1.0) <= radius:
        raise PoleAtOneError("derivative circle encloses the pole at s = 1")
    prev = None
    m = max(nodes, 2 * (kmax + 1))
    for _ in range(5):
        phis = np.linspace(0.0, 2.0 * math.pi, m, endpoint=False)
        vals, _ = _zeta_values_raw(center + radius * np.exp(1j * phis))
        ks = np.arange(kmax + 1)
        coeff = (vals[None, :] * np.exp(-1j * np.outer(ks, phis))).mean(axis=1)
        derivs = coeff * np.array([math.factorial(k) for k in ks]) / radius**ks.astype(float)
        if prev is not None:
            change = float(np.max(np.abs(derivs - prev)))
            if change < 1e-9 * (1.0 + float(np.max(np.abs(derivs)))):
                return derivs, change
        prev = derivs
        m *= 2
    return prev, change


# ----------------------------------------------------------------------
# Functional equation factor and the critical-line scan
# ----------------------------------------------------------------------

def _log_sin(z: np.ndarray) -> np.ndarray:
    """log(sin z) safe for large |Im z| (any fixed branch; callers exp it)."""
    z = np.asarray(z, dtype=complex)
    upper = z.imag >= 0
    out = np.empty(z.shape, dtype=complex)
    zu = np.where(upper, z, np.conj(z))
    # sin z = (i/2) e^{-iz} (1 - e^{2iz}) for Im z >= 0, and log(i/2) is
    # -log 2 + i pi/2
    val = -1j * zu + np.log1p(-np.exp(2j * zu)) + (-math.log(2.0) + 0.5j * math.pi)
    out[upper] = val[upper]
    out[~upper] = np.conj(val[~upper])
    return out


def chi_factor(s) -> np.ndarray:
    """chi(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1 - s), computed in logs."""
    s = np.asarray(s, dtype=complex)
    logchi = (
        s * math.log(2.0)
        + (s - 1.0) * math.log(math.pi)
        + _log_sin(math.pi * s / 2.0)
        + loggamma(1.0 - s)
    )
    return np.exp(logchi)


def siegel_theta(t) -> np.ndarray:
    """Riemann-Siegel theta: Im log Gamma(1/4 + it/2) - (t/2) log pi."""
    t = np.asarray(t, dtype=float)
    return loggamma(0.25 + 0.5j * t).imag - 0.5 * t * math.log(math.pi)


def hardy_z(t, tol: float = 1e-10) -> np.ndarray:
    """Hardy's real-valued Z(t) = e^{i theta(t)} zeta(1/2 + it)."""
    t = np.asarray(t, dtype=float)
    vals = np.exp(1j * siegel_theta(t)) * zeta_array(0.5 + 1j * t, tol=tol)
    return vals.real


def riemann_count_estimate(t: float) -> float:
    """Smooth zero-count estimate theta(t)/pi + 1 (exact up to S(t))."""
    return float(siegel_theta(t)) / math.pi + 1.0


@functools.lru_cache(maxsize=8)
def _zero_scan(t_hi_rounded: float) -> tuple[float, ...]:
    t_lo, t_hi = 10.0, float(t_hi_rounded)
    step = 0.05
    for _ in range(3):
        grid = np.arange(t_lo, t_hi + step, step)
        z = hardy_z(grid)
        flips = np.flatnonzero(np.signbit(z[:-1]) != np.signbit(z[1:]))
        lo, hi = grid[flips].copy(), grid[flips + 1].copy()
        zlo = z[flips].copy()
        for _ in range(52):
            mid = 0.5 * (lo + hi)
            zm = hardy_z(mid)
            left = np.signbit(zlo) != np.signbit(zm)
            hi = np.where(left, mid, hi)
            lo = np.where(left, lo, mid)
            zlo = np.where(left, zlo, zm)
        found = 0.5 * (lo + hi)
        expected = riemann_count_estimate(t_hi)
        if abs(len(found) - expected) < 0.95:
            return tuple(float(v) for v in found)
        step /= 2.0  # a close pair may have been missed; rescan finer
    raise ToleranceUnreachableError(
        f"sign-change count {len(found)} disagrees with estimate {expected:.2f}"
    )


def zero_ordinates(t_hi: float) -> np.ndarray:
    """Ordinates of the nontrivial zeros with 0 < gamma <= t_hi.

    Located by sign changes of Hardy's Z on the critical line and verified
    against the smooth counting estimate; refined by bisection.
    """
    if t_hi < 14.0:
        return np.array([], dtype=float)
    bucket = 50.0 * math.ceil(t_hi / 50.0)
    zs = np.array(_zero_scan(bucket))
    return zs[zs <= t_hi]


# ----------------------------------------------------------------------
# Rectangle zero counting by the argument principle
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroCount:
    alpha: float
    t: float
    h: float
    count: int
    winding_residual: float


def count_zeros(alpha: float, t: float, h: float) -> ZeroCount:
    """Zeros of zeta in the rectangle alpha < sigma < 2, t <= Im s <= t + h.

    Tracks the argument of zeta around the boundary and snaps the winding
    number to an integer. A boundary edge on the real axis would hit the
    pole at s = 1, so it is shifted to Im s = -1 (no zeros have |ordinate|
    below 14) and the pole, once interior, is credited back.
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError("alpha must lie in (0, 2)")
    if h < 0:
        raise ValueError("h must be nonnegative")
    if h == 0:
        return ZeroCount(alpha, t, h, 0, 0.0)
    t_lo, t_hi = float(t), float(t + h)
    if t_lo == 0.0:
        t_lo = -1.0
    if t_hi == 0.0:
        t_hi = 1.0
    if abs(t_lo) < 1e-6 or abs(t_hi) < 1e-6:
        raise BoundaryZeroError("horizontal edge passes too close to the pole at s = 1")
    pole_inside = (alpha < 1.0) and (t_lo < 0.0 < t_hi)

    def edge(fn, a, b):
        try:
            _, _, steps = _adaptive_track(fn, np.linspace(a, b, 64), max_step=0.9)
        except PathThroughZeroError as exc:
            raise BoundaryZeroError(str(exc)) from exc
        return float(np.sum(steps))

    total = 0.0
    total += edge(lambda x: x + 1j * t_lo, alpha, 2.0)          # bottom, left to right
    total += edge(lambda y: 2.0 + 1j * y, t_lo, t_hi)           # right, upward
    total -= edge(lambda x: x + 1j * t_hi, alpha, 2.0)          # top, right to left
    total -= edge(lambda y: alpha + 1j * y, t_lo, t_hi)         # left, downward
    winding = total / (2.0 * math.pi)
    snapped = round(winding)
    residual = abs(winding - snapped)
    if residual >= 0.25:
        raise BoundaryZeroError(
            f"winding {winding:.4f} too far from an integer; boundary suspect"
        )
    count = int(snapped) + (1 if pole_inside else 0)
    return ZeroCount(alpha, t, h, count, residual)


def zero_density_envelope(alpha: float, h: float) -> tuple[float, float]:
    """Short-interval zero-density envelope H^(4(1-a)/(3-2a)) (log H)^100.

    Returns (log of the envelope, exponent 4(1-alpha)/(3-2alpha)).
    """
    if not 0.5 < alpha < 1.0:
        raise ValueError("alpha must lie in (1/2, 1)")
    if h <= 1.0:
        raise ValueError("H must exceed 1")
    exponent = 4.0 * (1.0 - alpha) / (3.0 - 2.0 * alpha)
    log_value = exponent * math.log(h) + 100.0 * math.log(math.log(h))
    return log_value, exponent


# ----------------------------------------------------------------------
# Selberg's explicit formula
# ----------------------------------------------------------------------

@functools.lru_cache(maxsize=8)
def _von_mangoldt_cached(limit: int) -> np.ndarray:
    arr = np.zeros(limit + 1)
    for p in primes_up_to(limit).primes:
        p = int(p)
        q = p
        lp = math.log(p)
        while q <= limit:
            arr[q] = lp
            q *= p
    return arr


def von_mangoldt_table(limit: int) -> np.ndarray:
    """Array L with L[n] = log p if n is a power of the prime p, else 0."""
    return _von_mangoldt_cached(int(limit)).copy()


def weighted_von_mangoldt(n: int, x: float) -> float:
    """Selberg's linearly damped von Mangoldt weight.

    Full weight below x, linear taper log(x^2/n)/log(x) on [x, x^2], zero
    beyond x^2.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if x <= 1:
        raise ValueError("x must exceed 1")
    if n == 1 or n > x * x:
        return 0.0
    lam = float(_von_mangoldt_cached(max(int(n), 4))[int(n)])
    if lam == 0.0:
        return 0.0
    if n < x:
        return float(lam)
    return float(lam * math.log(x * x / n) / math.log(x))


@dataclass(frozen=True)
class SelbergSpec:
    """Inputs for the explicit formula: damping point x and known zeros.

    zeros holds positive ordinates in ascending order; conjugates are added
    internally. q_max = None lets the geometric decay choose the cutoff of
    the trivial-zero series.
    """

    x: float
    zeros: np.ndarray = field(default_factory=lambda: np.array([]))
    q_max: int | None = None
    coverage: float | None = None  # ordinate up to which the list is complete

    def __post_init__(self):
        if self.x <= 2:
            raise ValueError("x must exceed 2")
        zs = np.asarray(self.zeros, dtype=float)
        if zs.size and np.any(np.diff(zs) < 0):
            raise ValueError("zeros must be ascending")
        object.__setattr__(self, "zeros", zs)
        if self.coverage is None:
            # a complete list scanned to T has its last zero within a couple
            # of mean gaps of T
            have = float(zs[-1]) + 2.0 if zs.size else 0.0
            object.__setattr__(self, "coverage", have)

    def check_coverage(self, t: float, window: float = 50.0):
        need = abs(t) + window
        if self.coverage < need - 1e-9:
            raise InsufficientZerosError(
                f"zero list covers ordinates to {self.coverage:g} but "
                f"coverage to {need:g} is required"
            )

    def trivial_cutoff(self, sigma: float) -> int:
        if self.q_max is not None:
            return self.q_max
        # smallest q with x^(-2q - sigma) below 1e-16
        q = 1
        while self.x ** (-(2 * q + sigma)) >= 1e-16 and q < 64:
            q += 1
        return q


def _all_rho(spec: SelbergSpec) -> np.ndarray:
    g = spec.zeros
    return np.concatenate([0.5 + 1j * g, 0.5 - 1j * g])


def selberg_zeta_prime_over_zeta(s: complex, spec: SelbergSpec) -> tuple[complex, float]:
    """zeta'/zeta(s) via the explicit formula, and its residual.

    The residual compares against the direct Cauchy-circle derivative of the
    tracked logarithm, a fully independent evaluation path.
    """
    s = complex(s)
    spec.check_coverage(s.imag)
    x = spec.x
    lx = math.log(x)
    limit = int(x * x)
    lam = _von_mangoldt_cached(limit)
    n = np.arange(2, limit + 1, dtype=float)
    w = lam[2 : limit + 1].copy()
    taper = n >= x
    w[taper] *= np.log(x * x / n[taper]) / lx
    t_sum = -np.sum(w * n ** (-s))
    t_pole = (x ** (2.0 * (1.0 - s)) - x ** (1.0 - s)) / ((1.0 - s) ** 2 * lx)
    q = np.arange(1, spec.trivial_cutoff(s.real) + 1, dtype=float)
    t_trivial = np.sum(
        (x ** (-2.0 * q - s) - x ** (-2.0 * (2.0 * q + s))) / (2.0 * q + s) ** 2
    ) / lx
    rho = _all_rho(spec)
    t_zeros = np.sum(
        (x ** (rho - s) - x ** (2.0 * (rho - s))) / (s - rho) ** 2
    ) / lx
    value = complex(t_sum + t_pole + t_trivial + t_zeros)
    direct = log_zeta_deriv(1, s.real, s.imag)
    return value, abs(value - direct)


def _f_kernel(s: complex, z: np.ndarray, x: float) -> np.ndarray:
    """F(s, z) = integral from s+10 to s of (x^(z-w) - x^(2(z-w)))/(w-z)^2 dw.

    Straight horizontal segment, parameterised w = s + u with u from 10 down
    to 0; the integrand decays like x^(-u), so panels concentrate near u = 0.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    xs, ws = np.polynomial.legendre.leggauss(24)
    edges = np.array([0.0, 0.2, 0.45, 0.8, 1.4, 2.4, 4.0, 6.5, 10.0])
    lx = math.log(x)
    out = np.zeros(z.shape, dtype=complex)
    for a, b in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        u = mid + half * xs  # (24,)
        d = z[:, None] - (s + u[None, :])  # z - w
        vals = (np.exp(d * lx) - np.exp(2.0 * d * lx)) / d**2
        out += -half * np.sum(ws[None, :] * vals, axis=1)  # minus: path runs s+10 -> s
    return out


def selberg_log_zeta(s: complex, spec: SelbergSpec) -> complex:
    """log zeta(s) via the integrated explicit formula.

    The prime-power main term runs to x^2 with the damped weight; the
    correction sum at s + 10 is truncated where its terms drop below 1e-18,
    which the +10 shift makes immediate. Branch matches the horizontal
    tracking convention because the formula integrates zeta'/zeta from s+10.
    """
    s = complex(s)
    spec.check_coverage(s.imag)
    x = spec.x
    lx = math.log(x)
    limit = int(x * x)
    lam = _von_mangoldt_cached(limit)
    n = np.arange(2, limit + 1, dtype=float)
    logn = np.log(n)
    w = lam[2 : limit + 1].copy()
    taper = n >= x
    w[taper] *= np.log(x * x / n[taper]) / lx
    t_main = np.sum(w * n ** (-s) / logn)
    # (Lambda - Lambda_x)/(n^(s+10) log n): taper complement on [x, x^2], full above
    cap = max(int(2 * x * x) + 10, limit + 10)
    lam2 = _von_mangoldt_cached(cap)
    n2 = np.arange(2, cap + 1, dtype=float)
    w2 = lam2[2 : cap + 1].copy()
    inside = (n2 >= x) & (n2 <= x * x)
    w2[n2 < x] = 0.0
    w2[inside] *= np.log(n2[inside] / x) / lx
    t_corr = np.sum(w2 * n2 ** (-(s + 10.0)) / np.log(n2))
    t_pole = -_f_kernel(s, np.array([1.0 + 0j]), x)[0] / lx
    rho = _all_rho(spec)
    t_zeros = np.sum(_f_kernel(s, rho, x)) / lx
    q = np.arange(1, spec.trivial_cutoff(s.real) + 64, dtype=float)
    zq = -2.0 * q
    zq = zq[x ** (zq - s.real) > 1e-20]  # F(s, z) decays like x^(Re z - sigma)
    t_trivial = np.sum(_f_kernel(s, zq.astype(complex), x)) / lx if zq.size else 0.0
    return complex(t_main + t_corr + t_pole + t_zeros + t_trivial)


# ----------------------------------------------------------------------
# Zero list serialisation
# ----------------------------------------------------------------------

def zeros_to_csv(path, ordinates) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "ordinate"])
        for i, g in enumerate(ordinates, start=1):
            writer.writerow([i, f"{float(g):.12f}"])


def zeros_from_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["index", "ordinate"]:
            raise ValueError("expected header index,ordinate")
        return np.array([float(row[1]) for row in reader])
