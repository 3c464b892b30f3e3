"""Phase assignments on primes and twisted Euler-product sums.

A phase assignment maps primes to turns theta_p in [0, 1); the twist enters
as exp(-2*pi*i*theta_p). Unassigned primes carry phase 0. All sums here are
finite and exact up to the reported prime-power truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .primes import PrimeTable, is_prime

__all__ = [
    "PhaseAssignment",
    "LogDerivSpec",
    "alternating_phases",
    "prime_phase_sum",
    "prime_phase_sum_deriv",
    "log_euler_deriv",
    "default_ell_max",
]


class PhaseAssignment:
    """Immutable map prime -> phase in turns, reduced mod 1.

    Primes not present default to phase 0, matching the convention that only
    finitely many coordinates are ever twisted.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[int, float] | Iterable[tuple[int, float]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        store = {}
        for p, th in items:
            p = int(p)
            if not is_prime(p):
                raise ValueError(f"phase assigned to non-prime {p}")
            store[p] = float(th) % 1.0
        self._entries = dict(sorted(store.items()))

    def get(self, p: int) -> float:
        return self._entries.get(int(p), 0.0)

    def phases_for(self, primes: np.ndarray) -> np.ndarray:
        return np.array([self._entries.get(int(p), 0.0) for p in primes], dtype=float)

    def items(self):
        return self._entries.items()

    def __len__(self):
        return len(self._entries)

    def __eq__(self, other):
        return isinstance(other, PhaseAssignment) and self._entries == other._entries

    def shifted(self, shifts: Mapping[int, float]) -> "PhaseAssignment":
        new = dict(self._entries)
        for p, d in shifts.items():
            new[int(p)] = (new.get(int(p), 0.0) + d) % 1.0
        return PhaseAssignment(new)

    def negated(self) -> "PhaseAssignment":
        return PhaseAssignment({p: (-t) % 1.0 for p, t in self._entries.items()})

    def merged(self, other: "PhaseAssignment") -> "PhaseAssignment":
        new = dict(self._entries)
        new.update(other._entries)
        return PhaseAssignment(new)

    def to_records(self):
        """Serialisable (prime, theta) sequence."""
        return [{"prime": p, "theta": t} for p, t in self._entries.items()]

    def __repr__(self):
        return f"PhaseAssignment({len(self._entries)} primes)"


def alternating_phases(table: PrimeTable) -> PhaseAssignment:
    """Phase 0 on the 1st, 3rd, 5th, ... prime and 1/2 on the rest."""
    return PhaseAssignment(
        {int(p): (0.0 if i % 2 == 0 else 0.5) for i, p in enumerate(table.primes)}
    )


def _twists(primes: np.ndarray, theta: PhaseAssignment) -> np.ndarray:
    return np.exp(-2j * np.pi * theta.phases_for(primes))


def prime_phase_sum(primes, s: complex, theta: PhaseAssignment) -> complex:
    """Sum of exp(-2*pi*i*theta_p) * p^(-s) over the given primes."""
    ps = np.asarray(list(primes), dtype=float)
    if ps.size == 0:
        return 0j
    return complex(np.sum(_twists(ps, theta) * ps ** (-complex(s))))


def prime_phase_sum_deriv(primes, k: int, sigma0: float, theta: PhaseAssignment) -> complex:
    """k-th s-derivative of the twisted prime sum at s = sigma0.

    Exact finite sum: exp(-2*pi*i*theta_p) * (-log p)^k * p^(-sigma0).
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    ps = np.asarray(list(primes), dtype=float)
    if ps.size == 0:
        return 0j
    return complex(np.sum(_twists(ps, theta) * (-np.log(ps)) ** k * ps ** (-sigma0)))


def default_ell_max(primes, k: int, sigma0: float, tol: float = 1e-14) -> int:
    """Smallest prime-power depth whose dyadic tail estimate drops below tol.

    Uses the dominant p = 2 shape: 2^(-ell*sigma0) * |P| * (ell*log(max P))^k
    / (1 - 2^(-sigma0)).
    """
    ps = np.asarray(list(primes), dtype=float)
    if ps.size == 0:
        return 1
    np_count = len(ps)
    logmax = math.log(float(np.max(ps)))
    ell = max(2, k + 1)
    while ell < 10_000:
        est = (
            2.0 ** (-ell * sigma0)
            * np_count
            * (ell * max(logmax, 1.0)) ** k
            / (1.0 - 2.0 ** (-sigma0))
        )
        if est < tol:
            return ell
        ell += 1
    return ell


@dataclass(frozen=True)
class LogDerivSpec:
    """Order, abscissa, and prime-power depth for log-Euler derivatives.

    ell_max = None defers the depth choice to default_ell_max at call time,
    which guarantees the ell-tail bound sits below tol.
    """

    k: int
    sigma0: float
    ell_max: int | None = None
    tol: float = 1e-14

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if not 0.5 < self.sigma0 <= 1.0:
            raise ValueError("sigma0 must lie in (1/2, 1]")
        if self.ell_max is not None and self.ell_max < 1:
            raise ValueError("ell_max must be at least 1")


class LogDerivResult(NamedTuple):
    value: complex
    tail_bound: float


def _tail_bound(ps: np.ndarray, k: int, sigma0: float, ell_max: int) -> float:
    """Rigorous bound on the dropped ell > ell_max part of the double sum.

    Per prime, terms t(ell) = ell^(k-1) (log p)^k p^(-ell*sigma0) decay at
    worst by q = p^(-sigma0) * ((ell+1)/ell)^(k-1) once ell > ell_max; the
    tail is then t(ell_max+1) / (1 - q) whenever q < 1.
    """
    nxt = ell_max + 1
    x = ps ** (-sigma0)
    if k == 0:
        t = x**nxt / nxt
        q = x
    else:
        t = float(nxt) ** (k - 1) * np.log(ps) ** k * x**nxt
        q = x * ((nxt + 1) / nxt) ** (k - 1)
    if np.any(q >= 1.0):
        return math.inf
    return float(np.sum(t / (1.0 - q)))


def log_euler_deriv(primes, spec: LogDerivSpec, theta: PhaseAssignment) -> LogDerivResult:
    """k-th derivative at sigma0 of the log of the twisted Euler product.

    Expands log(1 - e(-theta_p) p^(-s))^(-1) into prime powers and truncates
    the power index at ell_max; the dropped tail is bounded rigorously and
    returned alongside the value. Terms individually below a fraction of the
    tolerance are skipped and charged to the reported bound.
    """
    ps = np.asarray(sorted(int(p) for p in primes), dtype=float)
    if ps.size == 0:
        return LogDerivResult(0j, 0.0)
    k, sigma0 = spec.k, spec.sigma0
    ell_max = spec.ell_max or default_ell_max(ps, k, sigma0, spec.tol)
    logs = np.log(ps)
    th = theta.phases_for(ps)
    drop_tol = spec.tol * 1e-3 / (ell_max * max(len(ps), 1))
    sign = (-1.0) ** k
    value = 0j
    dropped = 0.0
    for ell in range(1, ell_max + 1):
        mag = (ell * logs) ** k * ps ** (-ell * sigma0) / ell
        active = mag > drop_tol
        if np.any(active):
            value += sign * np.sum(np.exp(-2j * np.pi * ell * th[active]) * mag[active])
            dropped += float(np.sum(mag[~active]))
        else:
            dropped += float(np.sum(mag))
    return LogDerivResult(complex(value), _tail_bound(ps, k, sigma0, ell_max) + dropped)
