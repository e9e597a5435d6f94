"""Integer-order Bessel functions and the dressed tunneling elements.

Energies are unit-agnostic (hbar = 1); callers usually measure everything in
units of the bare tunneling amplitude ``delta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import BesselDomainError, BesselOrderError, ParameterError

MAX_ORDER = 500
SERIES_LIMIT = 2.0
_RESCALE = 1e250


@dataclass(frozen=True)
class SystemParams:
    """Drive parameters of the closed two-level system.

    H(t) = -(1/2) [delta * sx + (epsilon + amp * cos(omega t)) * sz]
    """

    delta: float = 1.0
    epsilon: float = 0.0
    amp: float = 0.0
    omega: float = 1.0

    def __post_init__(self):
        for name in ("delta", "epsilon", "amp", "omega"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
        if self.delta <= 0:
            raise ParameterError(f"delta must be positive, got {self.delta}")
        if self.omega <= 0:
            raise ParameterError(f"omega must be positive, got {self.omega}")
        if self.amp < 0:
            raise ParameterError(f"amp must be non-negative, got {self.amp}")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    @property
    def drive_ratio(self) -> float:
        """Bessel argument A/omega."""
        return self.amp / self.omega

    def replace(self, **changes) -> SystemParams:
        return replace(self, **changes)


def _check_args(n: int, x: float) -> None:
    if not math.isfinite(x):
        raise BesselDomainError(f"Bessel argument must be finite, got {x!r}")
    if abs(n) > MAX_ORDER:
        raise BesselOrderError(f"|order| {abs(n)} exceeds ceiling {MAX_ORDER}")


def _series(n: int, x: float) -> float:
    """Ascending power series for n >= 0, x > 0."""
    half = 0.5 * x
    if half == 0.0:  # subnormal x underflows
        return 1.0 if n == 0 else 0.0
    term = math.exp(n * math.log(half) - math.lgamma(n + 1))
    if term == 0.0:
        return 0.0
    total = term
    q = -half * half
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + n))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            return total


def _miller(nmax: int, x: float) -> np.ndarray:
    """J_0..J_nmax for x > 0 by downward recurrence normalized with the sum rule
    J_0 + 2 sum_k J_2k = 1.

    The recurrence starts ceil(10 + 1.5x) orders above max(nmax, x); starting
    only above nmax leaves errors near 1e-9 for low orders at x ~ 10.
    """
    start = max(nmax, math.ceil(x)) + math.ceil(10 + 1.5 * x)
    out = np.zeros(nmax + 1)
    j_next, j = 0.0, 1e-30
    norm = 2.0 * j if start % 2 == 0 else 0.0
    for k in range(start, 0, -1):
        j_next, j = j, (2.0 * k / x) * j - j_next
        order = k - 1
        if order <= nmax:
            out[order] = j
        if order % 2 == 0 and order > 0:
            norm += 2.0 * j
        if abs(j) > _RESCALE:
            j /= _RESCALE
            j_next /= _RESCALE
            norm /= _RESCALE
            out /= _RESCALE
    norm += j
    return out / norm


def bessel_j_table(nmax: int, x: float) -> np.ndarray:
    """Return ``[J_0(x), ..., J_nmax(x)]``.

    Uses the power series for |x| <= 2 and a single Miller pass otherwise.
    """
    nmax = int(nmax)
    if nmax < 0:
        raise ParameterError("nmax must be non-negative")
    _check_args(nmax, x)
    if x == 0.0:
        out = np.zeros(nmax + 1)
        out[0] = 1.0
        return out
    ax = abs(x)
    if ax <= SERIES_LIMIT:
        out = np.array([_series(n, ax) for n in range(nmax + 1)])
    else:
        out = _miller(nmax, ax)
    if x < 0:
        out[1::2] *= -1.0
    return out


def bessel_j(n: int, x: float) -> float:
    """Bessel function of the first kind J_n(x) for integer n, real x.

    Raises
    ------
    BesselDomainError
        If ``x`` is not finite.
    BesselOrderError
        If ``|n|`` exceeds ``MAX_ORDER``.
    """
    n = int(n)
    x = float(x)
    _check_args(n, x)
    sign = -1.0 if (n < 0 and n % 2) else 1.0
    n = abs(n)
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    ax = abs(x)
    if ax <= SERIES_LIMIT:
        value = _series(n, ax)
    else:
        value = _miller(n, ax)[n]
    if x < 0 and n % 2:
        value = -value
    return sign * value


class BesselLadder:
    """J_n(x) for all integer n at fixed x, vectorized over integer arrays.

    The underlying table grows on demand; orders never requested are never
    computed.
    """

    def __init__(self, x: float, nmax: int = 0):
        self.x = float(x)
        self._table = bessel_j_table(max(int(nmax), 8), self.x)

    @property
    def nmax(self) -> int:
        return len(self._table) - 1

    def _ensure(self, nmax: int) -> None:
        if nmax > self.nmax:
            self._table = bessel_j_table(max(nmax, 2 * self.nmax), self.x)

    def __call__(self, n):
        n = np.asarray(n, dtype=int)
        if n.size == 0:
            return np.zeros(n.shape)
        self._ensure(int(np.max(np.abs(n))))
        an = np.abs(n)
        vals = self._table[an]
        flip = (n < 0) & (an % 2 == 1)
        vals = np.where(flip, -vals, vals)
        return vals if vals.ndim else float(vals)


class DressedDeltas:
    """Dressed tunneling elements Delta_n = J_n(A/omega) * Delta as a callable."""

    def __init__(self, p: SystemParams, nmax: int = 0):
        self.p = p
        self._ladder = BesselLadder(p.drive_ratio, nmax)

    def __call__(self, n):
        return self.p.delta * self._ladder(n)


def dressed_delta(n: int, p: SystemParams) -> float:
    """Dressed tunneling element J_n(A/omega) * Delta."""
    return bessel_j(n, p.drive_ratio) * p.delta


def bessel_zero(m: int, k: int = 1) -> float:
    """k-th positive zero of J_m, bracketed from a sign-change scan."""
    from scipy.optimize import brentq

    m = abs(int(m))
    found = 0
    step = 0.05
    a = 1e-9 if m == 0 else step
    fa = bessel_j(m, a)
    while True:
        b = a + step
        fb = bessel_j(m, b)
        if fa == 0.0:
            found += 1
            if found == k:
                return a
        elif fa * fb < 0:
            found += 1
            if found == k:
                return brentq(lambda z: bessel_j(m, z), a, b, xtol=1e-15, rtol=1e-15)
        a, fa = b, fb
        if a > 4 * MAX_ORDER:
            raise ParameterError(f"zero {k} of J_{m} not found")
