"""Truncated Floquet matrix of the driven two-level system and its spectrum.

The matrix is written in the unperturbed (Delta = 0) Floquet basis
``|u0_{s,n}>`` with s in {up, down} and photon index n.  Diagonal entries are
``-/+ epsilon/2 - n*omega`` and the up/down blocks carry ``-Delta_{n-l}/2``.
Every entry is real, so the diagonalization runs on a real symmetric matrix.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

from .errors import AmbiguousDoubletError, EigensolverError, ParameterError, TruncationWarning
from .special_functions import DressedDeltas, SystemParams

_SPINOR_CHUNK = 4096


class Spin(Enum):
    UP = 0
    DOWN = 1


class FloquetBasisIndex(NamedTuple):
    spin: Spin
    photon: int


@dataclass(frozen=True)
class TruncationConfig:
    n_tr: int
    tol_conv: float = 1e-10

    def __post_init__(self):
        if self.n_tr < 4:
            raise ParameterError(f"n_tr must be >= 4, got {self.n_tr}")
        if not self.tol_conv > 0:
            raise ParameterError("tol_conv must be positive")

    @classmethod
    def default_for(cls, p: SystemParams, tol_conv: float | None = None) -> TruncationConfig:
        """ceil(2A/omega + |epsilon|/omega) + 10 photons on each side."""
        n_tr = math.ceil(2 * p.amp / p.omega + abs(p.epsilon) / p.omega) + 10
        tol = 1e-10 * p.delta if tol_conv is None else tol_conv
        return cls(n_tr=n_tr, tol_conv=tol)


def fold_quasienergy(e, omega: float):
    """Map an energy into the first Brillouin zone ``[-omega/2, omega/2)``."""
    if omega <= 0:
        raise ParameterError("omega must be positive")
    e = np.asarray(e, dtype=float)
    f = e - omega * np.floor((e + 0.5 * omega) / omega)
    f = np.where(f >= 0.5 * omega, f - omega, f)
    f = np.where(f < -0.5 * omega, f + omega, f)
    return f if f.ndim else float(f)


@dataclass(frozen=True)
class CompositeState:
    """Vector in the extended space, amplitudes on ``|u0_{s,n}>``.

    ``up[k]`` and ``down[k]`` belong to photon index ``n0 + k``.
    """

    n0: int
    up: np.ndarray
    down: np.ndarray

    @property
    def photons(self) -> np.ndarray:
        return np.arange(self.n0, self.n0 + len(self.up))

    def amplitude(self, spin: Spin, photon: int) -> complex:
        k = photon - self.n0
        if 0 <= k < len(self.up):
            return (self.up if spin is Spin.UP else self.down)[k]
        return 0.0

    def as_dict(self) -> dict[FloquetBasisIndex, complex]:
        out = {}
        for n, a, b in zip(self.photons, self.up, self.down):
            out[FloquetBasisIndex(Spin.UP, int(n))] = a
            out[FloquetBasisIndex(Spin.DOWN, int(n))] = b
        return out

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.up) ** 2) + np.sum(np.abs(self.down) ** 2)))

    def normalized(self) -> CompositeState:
        nrm = self.norm()
        return CompositeState(self.n0, self.up / nrm, self.down / nrm)

    def shift(self, k: int) -> CompositeState:
        """Photon shift: the state ``exp(-i k omega t) |Phi(t)>``, quasienergy lowered by k*omega."""
        return CompositeState(self.n0 + int(k), self.up, self.down)

    def scaled(self, c) -> CompositeState:
        return CompositeState(self.n0, c * self.up, c * self.down)

    def _window(self, other: CompositeState):
        lo = max(self.n0, other.n0)
        hi = min(self.n0 + len(self.up), other.n0 + len(other.up))
        if hi <= lo:
            return None
        return slice(lo - self.n0, hi - self.n0), slice(lo - other.n0, hi - other.n0)

    def inner(self, other: CompositeState) -> complex:
        """Composite inner product <<self|other>>."""
        w = self._window(other)
        if w is None:
            return 0.0
        a, b = w
        return np.vdot(self.up[a], other.up[b]) + np.vdot(self.down[a], other.down[b])

    def spinor(self, t, p: SystemParams) -> tuple[np.ndarray, np.ndarray]:
        """Time-periodic spinor components ``(<up|Phi(t)>, <down|Phi(t)>)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        up = np.empty(t.shape, dtype=complex)
        down = np.empty(t.shape, dtype=complex)
        # chunked so long grids never build a (len(t), n_photons) matrix at once
        for lo in range(0, len(t), _SPINOR_CHUNK):
            tt = t[lo : lo + _SPINOR_CHUNK]
            phase = np.exp(-1j * np.outer(tt * p.omega, self.photons))
            up[lo : lo + _SPINOR_CHUNK] = phase @ self.up
            down[lo : lo + _SPINOR_CHUNK] = phase @ self.down
        gauge = np.exp(0.5j * p.drive_ratio * np.sin(p.omega * t))
        return gauge * up, np.conj(gauge) * down


@dataclass(frozen=True)
class FloquetMatrix:
    matrix: np.ndarray
    photons: np.ndarray
    params: SystemParams

    def index(self, spin: Spin, photon: int) -> int:
        return 2 * (photon - int(self.photons[0])) + spin.value

    def basis(self) -> list[FloquetBasisIndex]:
        return [FloquetBasisIndex(s, int(n)) for n in self.photons for s in Spin]


def build_floquet_matrix(p: SystemParams, tr: TruncationConfig, center: int = 0) -> FloquetMatrix:
    """Real symmetric Floquet matrix on photons ``center - n_tr .. center + n_tr``."""
    photons = np.arange(center - tr.n_tr, center + tr.n_tr + 1)
    size = 2 * len(photons)
    deltas = DressedDeltas(p, 2 * tr.n_tr)
    h = np.zeros((size, size))
    idx = np.arange(len(photons))
    h[2 * idx, 2 * idx] = -0.5 * p.epsilon - photons * p.omega
    h[2 * idx + 1, 2 * idx + 1] = 0.5 * p.epsilon - photons * p.omega
    coupling = -0.5 * deltas(photons[:, None] - photons[None, :])
    h[0::2, 1::2] = coupling
    h[1::2, 0::2] = coupling.T
    return FloquetMatrix(h, photons, p)


@dataclass(frozen=True)
class FloquetSpectrum:
    energies: np.ndarray
    vectors: np.ndarray
    photons: np.ndarray
    omega: float

    @property
    def folded(self) -> np.ndarray:
        return fold_quasienergy(self.energies, self.omega)

    @property
    def brillouin_copy(self) -> np.ndarray:
        return np.rint((self.energies - self.folded) / self.omega).astype(int)

    def state(self, i: int) -> CompositeState:
        v = self.vectors[:, i]
        return CompositeState(int(self.photons[0]), v[0::2], v[1::2])

    def labels(self, tol: float | None = None) -> list[tuple[str, int]]:
        """(branch, brillouin copy) per eigenstate.

        Folded energies split into two ladders; the ladder with the lower
        folded value is branch '-'.
        """
        f = self.folded
        tol = 1e-6 * self.omega if tol is None else tol
        ref = f[np.argmin(np.abs(self.energies - np.median(self.energies)))]
        dist = np.abs(fold_quasienergy(f - ref, self.omega))
        same = dist < max(tol, 0.25 * np.min(np.where(dist > tol, dist, np.inf), initial=np.inf))
        other = f[~same]
        ref_other = np.median(other) if other.size else ref
        ref_is_lower = ref <= ref_other
        copies = self.brillouin_copy
        out = []
        for s, k in zip(same, copies):
            lower = s == ref_is_lower
            out.append(("-" if lower else "+", int(k)))
        return out

    def gram_deviation(self) -> float:
        g = self.vectors.T @ self.vectors
        return float(np.max(np.abs(g - np.eye(len(g)))))


def diagonalize_floquet(fm: FloquetMatrix) -> FloquetSpectrum:
    """Dense symmetric eigendecomposition of a Floquet matrix."""
    try:
        energies, vectors = np.linalg.eigh(fm.matrix)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(
            f"eigensolver did not converge for {fm.matrix.shape[0]}x{fm.matrix.shape[0]} matrix: {exc}"
        ) from exc
    return FloquetSpectrum(energies, vectors, fm.photons, fm.params.omega)


@dataclass(frozen=True)
class Doublet:
    """The pair of Floquet states connected by an m-photon resonance.

    ``state_minus`` is Phi_{-,0} (near |u0_{up,0}>, |u0_{down,m}>) and
    ``state_plus`` is its partner Phi_{+,m}; ``omega_numeric = e_plus - e_minus``.
    """

    m: int
    e_minus: float
    e_plus: float
    state_minus: CompositeState
    state_plus: CompositeState
    scores: tuple[float, float] = field(default=(1.0, 1.0))

    @property
    def omega_numeric(self) -> float:
        return self.e_plus - self.e_minus

    def representatives(self, omega: float) -> tuple[float, float, CompositeState, CompositeState]:
        """Quasienergies and states of Phi_{-,0} and Phi_{+,0}."""
        return (
            self.e_minus,
            self.e_plus + self.m * omega,
            self.state_minus,
            self.state_plus.shift(-self.m),
        )


def _rwa_reference(p: SystemParams, m: int, photons: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    dm = DressedDeltas(p)(-m)
    theta = math.atan2(abs(dm), -p.epsilon + m * p.omega)
    if abs(dm) == 0.0 and -p.epsilon + m * p.omega == 0.0:
        theta = 0.5 * math.pi
    sgn = 1.0 if dm >= 0 else -1.0
    s, c = math.sin(0.5 * theta), math.cos(0.5 * theta)
    size = 2 * len(photons)
    i_up = 2 * (0 - int(photons[0]))
    i_dn = 2 * (m - int(photons[0])) + 1
    ref_minus = np.zeros(size)
    ref_plus = np.zeros(size)
    ref_minus[i_up], ref_minus[i_dn] = -s, -sgn * c
    ref_plus[i_up], ref_plus[i_dn] = c, -sgn * s
    return ref_minus, ref_plus


def _fix_sign(v: np.ndarray, ref: np.ndarray) -> np.ndarray:
    ov = float(ref @ v)
    if ov < 0 or (ov == 0 and v[np.argmax(np.abs(v))] < 0):
        return -v
    return v


def central_doublet(
    s: FloquetSpectrum, p: SystemParams, m: int, ambiguity_tol: float = 1e-6
) -> Doublet:
    """Pick the eigenpair with maximal weight on ``|u0_{up,0}>`` and ``|u0_{down,m}>``.

    Eigenvector signs follow the RWA reference states so that analytic and
    numeric amplitudes can be compared component-wise.
    """
    n_lo, n_hi = int(s.photons[0]), int(s.photons[-1])
    if not (n_lo < 0 < n_hi and n_lo < m < n_hi):
        raise ParameterError(f"photon window [{n_lo}, {n_hi}] does not contain 0 and m={m}")
    i_up = 2 * (0 - n_lo)
    i_dn = 2 * (m - n_lo) + 1
    weights = s.vectors[i_up] ** 2 + s.vectors[i_dn] ** 2
    order = np.argsort(weights)[::-1]
    w = weights[order]
    if w[1] - w[2] < ambiguity_tol:
        raise AmbiguousDoubletError(
            f"doublet candidates tie: states {order[1]} and {order[2]} have weights "
            f"{w[1]:.12f} and {w[2]:.12f}"
        )
    i, j = sorted(order[:2], key=lambda k: s.energies[k])
    ref_minus, ref_plus = _rwa_reference(p, m, s.photons)
    v_minus = _fix_sign(s.vectors[:, i], ref_minus)
    v_plus = _fix_sign(s.vectors[:, j], ref_plus)
    n0 = int(s.photons[0])
    return Doublet(
        m=m,
        e_minus=float(s.energies[i]),
        e_plus=float(s.energies[j]),
        state_minus=CompositeState(n0, v_minus[0::2], v_minus[1::2]),
        state_plus=CompositeState(n0, v_plus[0::2], v_plus[1::2]),
        scores=(float(weights[i]), float(weights[j])),
    )


def solve_doublet(
    p: SystemParams, m: int, tr: TruncationConfig | None = None, max_doublings: int = 4
) -> Doublet:
    """Central doublet with adaptive truncation.

    Starts from ``tr`` (default rule if omitted) and doubles ``n_tr`` until both
    doublet quasienergies move by less than ``tol_conv``.
    """
    tr = TruncationConfig.default_for(p) if tr is None else tr
    tr = TruncationConfig(max(tr.n_tr, abs(m) + 6), tr.tol_conv)
    prev = central_doublet(diagonalize_floquet(build_floquet_matrix(p, tr)), p, m)
    for _ in range(max_doublings):
        tr = TruncationConfig(2 * tr.n_tr, tr.tol_conv)
        cur = central_doublet(diagonalize_floquet(build_floquet_matrix(p, tr)), p, m)
        if abs(cur.e_minus - prev.e_minus) < tr.tol_conv and abs(cur.e_plus - prev.e_plus) < tr.tol_conv:
            return prev
        prev = cur
    warnings.warn(f"doublet not converged to {tr.tol_conv} after {max_doublings} doublings", TruncationWarning)
    return prev


def track_doublets(
    params: Sequence[SystemParams], m: int, tr: TruncationConfig | None = None
) -> list[Doublet]:
    """Follow the doublet through a parameter sweep by eigenvector continuity.

    The first point is identified by unperturbed-state weight; later points take
    the eigenvectors with maximal overlap with the previous point's pair, which
    keeps branches from swapping at avoided crossings.  All points share one
    truncation so overlaps are taken in a common basis.
    """
    if tr is None:
        n_tr = max(TruncationConfig.default_for(q).n_tr for q in params)
        tr = TruncationConfig(max(n_tr, abs(m) + 6))
    out: list[Doublet] = []
    prev_minus = prev_plus = None
    for q in params:
        spec = diagonalize_floquet(build_floquet_matrix(q, tr))
        if prev_minus is None:
            d = central_doublet(spec, q, m)
        else:
            ov_minus = np.abs(prev_minus @ spec.vectors)
            ov_plus = np.abs(prev_plus @ spec.vectors)
            i = int(np.argmax(ov_minus))
            ov_plus[i] = -1.0
            j = int(np.argmax(ov_plus))
            if spec.energies[i] > spec.energies[j]:
                i, j = j, i
                prev_minus, prev_plus = prev_plus, prev_minus
            v_minus = _fix_sign(spec.vectors[:, i], prev_minus)
            v_plus = _fix_sign(spec.vectors[:, j], prev_plus)
            n0 = int(spec.photons[0])
            d = Doublet(
                m,
                float(spec.energies[i]),
                float(spec.energies[j]),
                CompositeState(n0, v_minus[0::2], v_minus[1::2]),
                CompositeState(n0, v_plus[0::2], v_plus[1::2]),
            )
        prev_minus = np.empty(2 * len(d.state_minus.up))
        prev_minus[0::2], prev_minus[1::2] = d.state_minus.up, d.state_minus.down
        prev_plus = np.empty_like(prev_minus)
        prev_plus[0::2], prev_plus[1::2] = d.state_plus.up, d.state_plus.down
        out.append(d)
    return out


def numeric_position_coeffs(
    state_a: CompositeState, state_b: CompositeState, n: int, tol: float = 1e-8
) -> complex:
    """Fourier coefficient X^(n)_{ab} = <<Phi_{a,0}| sz/2 |Phi_{b,n}>>."""
    shifted = state_b.shift(n)
    w = state_a._window(shifted)
    total = shifted.norm() ** 2
    if w is None:
        lost = total
        value = 0.0
    else:
        a, b = w
        kept = np.sum(np.abs(shifted.up[b]) ** 2) + np.sum(np.abs(shifted.down[b]) ** 2)
        lost = total - kept
        value = 0.5 * (np.vdot(state_a.up[a], shifted.up[b]) - np.vdot(state_a.down[a], shifted.down[b]))
    if lost > tol:
        warnings.warn(f"photon shift {n} pushes weight {lost:.2e} past the ladder edge", TruncationWarning)
    if np.iscomplexobj(value):
        return complex(value)
    return float(value)


def position_coefficient_table(
    state_minus: CompositeState, state_plus: CompositeState, n_max: int
) -> np.ndarray:
    """Array ``X[a, b, n + n_max]`` with a, b in (0='-', 1='+') for |n| <= n_max.

    The states must be the Phi_{alpha,0} representatives.
    """
    states = (state_minus, state_plus)
    dtype = complex if any(np.iscomplexobj(s.up) for s in states) else float
    out = np.zeros((2, 2, 2 * n_max + 1), dtype=dtype)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        for a in range(2):
            for b in range(2):
                for k, n in enumerate(range(-n_max, n_max + 1)):
                    out[a, b, k] = numeric_position_coeffs(states[a], states[b], n)
    return out


def orthonormal_frames(up_minus, dn_minus, up_plus, dn_plus):
    """Nearest unitary (polar factor) to the pointwise 2x2 matrix [[up_-, up_+], [dn_-, dn_+]]."""
    u = np.stack([np.stack([up_minus, up_plus], -1), np.stack([dn_minus, dn_plus], -1)], -2)
    w, _, vh = np.linalg.svd(u)
    q = w @ vh
    return q[:, 0, 0], q[:, 1, 0], q[:, 0, 1], q[:, 1, 1]


@dataclass(frozen=True)
class FloquetPair:
    """Floquet states Phi_{-,0}, Phi_{+,0} with quasienergies, tagged by the tier that built them.

    ``spinors`` returns the time-periodic amplitudes <g|Phi_a(t)>; with
    ``orthonormalize`` the two spinors are replaced pointwise by the nearest
    orthonormal pair, which keeps probabilities inside [0, 1] for
    approximate states.
    """

    state_minus: CompositeState
    state_plus: CompositeState
    e_minus: float
    e_plus: float
    params: SystemParams
    tier: str
    orthonormalize: bool = True

    @classmethod
    def from_doublet(cls, d: Doublet, p: SystemParams) -> FloquetPair:
        e_m, e_p, s_m, s_p = d.representatives(p.omega)
        return cls(s_m, s_p, e_m, e_p, p, "numeric", orthonormalize=False)

    def spinors(self, t) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(<up|Phi_->, <down|Phi_->, <up|Phi_+>, <down|Phi_+>) on the grid ``t``."""
        um, dm = self.state_minus.spinor(t, self.params)
        up, dp = self.state_plus.spinor(t, self.params)
        if self.orthonormalize:
            return orthonormal_frames(um, dm, up, dp)
        return um, dm, up, dp

    def target_amplitudes(self, t, target: str = "down") -> tuple[np.ndarray, np.ndarray]:
        um, dm, up, dp = self.spinors(t)
        if target == "down":
            return dm, dp
        if target == "up":
            return um, up
        raise ParameterError(f"target must be 'up' or 'down', got {target!r}")

    def initial_density(self, target: str = "down") -> tuple[float, complex]:
        """(rho_--(0), rho_-+(0)) for the pure state |target> at t = 0."""
        a_m, a_p = self.target_amplitudes([0.0], target)
        return float(abs(a_m[0]) ** 2), complex(np.conj(a_m[0]) * a_p[0])

    def survival(self, rho_mm, rho_mp, t, target: str = "down") -> np.ndarray:
        """P_{g->g}(t) = 2 Re{<g|Phi_->(<g|Phi_+>)^* rho_-+} + |<g|Phi_+>|^2 + (|<g|Phi_->|^2 - |<g|Phi_+>|^2) rho_--."""
        a_m, a_p = self.target_amplitudes(t, target)
        rho_mm = np.asarray(rho_mm, dtype=float)
        rho_mp = np.asarray(rho_mp, dtype=complex)
        wm, wp = np.abs(a_m) ** 2, np.abs(a_p) ** 2
        return 2 * np.real(a_m * np.conj(a_p) * rho_mp) + wp + (wm - wp) * rho_mm

    def coherent_density(self, t, target: str = "down") -> tuple[np.ndarray, np.ndarray]:
        """Closed-system density elements: rho_-- constant, rho_-+ rotating at e_+ - e_-."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        r_mm, r_mp = self.initial_density(target)
        return np.full(t.shape, r_mm), r_mp * np.exp(-1j * (self.e_minus - self.e_plus) * t)
