"""Weak coupling to an Ohmic bath: rates, MRWA dynamics and the full
Floquet-Bloch-Redfield integrator.

The density matrix is kept in the Floquet basis (Phi_{-,0}, Phi_{+,0}) with
rho_++ = 1 - rho_-- and rho_+- = conj(rho_-+).  Index 0 stands for '-' and
1 for '+' in every coefficient array.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationError, ParameterError, PositivityWarning, TruncationWarning
from .floquet_engine import FloquetPair, position_coefficient_table, solve_doublet, TruncationConfig
from .special_functions import SystemParams
from .vanvleck import (
    Order,
    ResonanceContext,
    floquet_pair,
    mixing_angle,
    rwa_frequency,
    vv2_frequency,
)


@dataclass(frozen=True)
class BathParams:
    """Bath coupling and inverse temperature (hbar*beta, time units).

    ``spectral_density`` replaces the Ohmic G(nu) = kappa*nu when given; it
    must be odd in nu.
    """

    kappa: float
    beta: float
    spectral_density: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and self.kappa >= 0):
            raise ParameterError(f"kappa must be finite and >= 0, got {self.kappa}")
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ParameterError(f"beta must be finite and > 0, got {self.beta}")

    def G(self, nu):
        nu = np.asarray(nu, dtype=float)
        if self.spectral_density is None:
            return self.kappa * nu
        return np.asarray(self.spectral_density(nu), dtype=float)


def bath_N(nu, b: BathParams):
    """N(nu) = G(nu) n_th(nu) with n_th = [coth(beta nu/2) - 1]/2 = 1/(exp(beta nu) - 1).

    Continuous through nu = 0, where the Ohmic value is kappa/beta.
    """
    nu = np.asarray(nu, dtype=float)
    x = b.beta * nu
    small = np.abs(x) < 1e-12
    xs = np.where(small, 1.0, x)
    if b.spectral_density is None:
        # kappa*nu/(e^x - 1) = (kappa/beta) * x/expm1(x)
        with np.errstate(over="ignore"):
            out = np.where(small, b.kappa / b.beta, (b.kappa / b.beta) * xs / np.expm1(xs))
    else:
        h = 1e-6
        slope = (b.G(h) - b.G(-h)) / (2 * h)
        out = np.where(small, slope / b.beta, b.G(np.where(small, 1.0, nu)) / np.expm1(xs))
    return out if out.ndim else float(out)


def bath_sym(nu, b: BathParams):
    """N(nu) + N(-nu) = G(nu) coth(beta nu/2)."""
    nu = np.asarray(nu, dtype=float)
    return bath_N(nu, b) + bath_N(-nu, b)


# ---------------------------------------------------------------------------
# position-matrix Fourier coefficients


@dataclass(frozen=True)
class PositionCoefficients:
    """X[a, b, n + n_max] with quasienergies (e_minus, e_plus) of Phi_{-,0}, Phi_{+,0}."""

    table: np.ndarray
    n_max: int
    e_minus: float
    e_plus: float
    omega: float
    source: str

    def __call__(self, a: int, b: int, n: int) -> complex:
        if abs(n) > self.n_max:
            return 0.0
        return self.table[a, b, n + self.n_max]

    @property
    def harmonics(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    @property
    def energies(self) -> np.ndarray:
        return np.array([self.e_minus, self.e_plus])

    def symmetry_residual(self) -> float:
        """max of |X^(-n)_ab - conj(X^(n)_ba)| and |X_++ + X_--|."""
        x = self.table
        conj_res = np.max(np.abs(x[:, :, ::-1] - np.conj(np.swapaxes(x, 0, 1))))
        diag_res = np.max(np.abs(x[1, 1] + x[0, 0]))
        return float(max(conj_res, diag_res))

    def tail_fraction(self) -> float:
        w = np.abs(self.table) ** 2
        total = np.sum(w)
        if total == 0:
            return 0.0
        edge = np.sum(w[:, :, [0, -1]])
        return float(edge / total)


def _x_minus_plus_first(ctx: ResonanceContext, n: np.ndarray, xi: float) -> np.ndarray:
    eps, om, m = ctx.p.epsilon, ctx.p.omega, ctx.m
    s2, c2 = math.sin(0.5 * xi) ** 2, math.cos(0.5 * xi) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        a = ctx.delta(-n) / (-eps + n * om)
        b = ctx.delta(n - 2 * m) / (eps + (n - 2 * m) * om)
        corr = -0.5 * ctx.sign_dm * (s2 * a + c2 * b)
    return np.where(n == m, 0.5 * math.sin(xi), corr)


def _x_minus_minus_first(ctx: ResonanceContext, n: np.ndarray, xi: float) -> np.ndarray:
    eps, om, m = ctx.p.epsilon, ctx.p.omega, ctx.m
    with np.errstate(divide="ignore", invalid="ignore"):
        a = ctx.delta(-m - n) / (-eps + (m + n) * om)
        b = ctx.delta(n - m) / (eps + (n - m) * om)
        corr = 0.25 * ctx.sign_dm * math.sin(xi) * (a - b)
    return np.where(n == 0, -0.5 * math.cos(xi), corr)


def _second_order_sum(ctx: ResonanceContext, n: np.ndarray, shift: int) -> np.ndarray:
    """sum_k Delta_j Delta_{-k} / ([eps + j om][-eps + k om]) with j = n - k - shift.

    The resonant terms j = -m and k = m are excluded.
    """
    eps, om, m = ctx.p.epsilon, ctx.p.omega, ctx.m
    k = np.arange(-ctx.l_max, ctx.l_max + 1)[None, :]
    nn = n[:, None]
    j = nn - k - shift
    keep = (j != -m) & (k != m)
    with np.errstate(divide="ignore", invalid="ignore"):
        term = ctx.delta(j) * ctx.delta(-k) / ((eps + j * om) * (-eps + k * om))
    return np.sum(np.where(keep, term, 0.0), axis=1)


def analytic_position_coeffs(ctx: ResonanceContext, a: str, b: str, n: int, order: str = "vv2") -> float:
    """Fourier coefficient X^(n)_{ab} for a, b in {'-', '+'} at the given order.

    rwa: only X_{-+}^(m) and X_{--}^(0) survive.  vv1: first-order kernels with
    Theta^RWA.  vv2: first-order kernels with the shifted angle plus the
    second-order sums.  X_{++} = -X_{--}; X_{+-}^(n) = conj(X_{-+}^(-n)).
    """
    idx = {"-": 0, "+": 1}
    if a not in idx or b not in idx:
        raise ParameterError(f"state labels must be '-' or '+', got {a!r}, {b!r}")
    tab = position_table(ctx, order, max(abs(n), 1))
    return float(tab(idx[a], idx[b], n))


def position_table(ctx: ResonanceContext, order: str = "vv2", n_max: int | None = None) -> PositionCoefficients:
    """Analytic coefficient table for all four (a, b) pairs and |n| <= n_max."""
    if order not in ("rwa", "vv1", "vv2"):
        raise ParameterError(f"order must be rwa, vv1 or vv2, got {order!r}")
    n_max = ctx.l_max + abs(ctx.m) if n_max is None else int(n_max)
    n = np.arange(-n_max, n_max + 1)
    m = ctx.m
    if order == "rwa":
        th = mixing_angle(ctx, Order.RWA)
        xmp = np.where(n == m, 0.5 * math.sin(th), 0.0)
        xmm = np.where(n == 0, -0.5 * math.cos(th), 0.0)
        big = rwa_frequency(ctx)
    elif order == "vv1":
        th = mixing_angle(ctx, Order.RWA)
        xmp = _x_minus_plus_first(ctx, n, th)
        xmm = _x_minus_minus_first(ctx, n, th)
        big = rwa_frequency(ctx)
    else:
        th = mixing_angle(ctx, Order.VV2)
        xmp = _x_minus_plus_first(ctx, n, th) + math.sin(th) / 8 * _second_order_sum(ctx, n, m)
        xmm = _x_minus_minus_first(ctx, n, th) - math.cos(th) / 8 * _second_order_sum(ctx, n, 0)
        big = vv2_frequency(ctx)
    table = np.zeros((2, 2, 2 * n_max + 1))
    table[0, 0] = xmm
    table[1, 1] = -xmm
    table[0, 1] = xmp
    table[1, 0] = xmp[::-1]
    om = ctx.p.omega
    return PositionCoefficients(table, n_max, -0.5 * (m * om + big), 0.5 * (m * om + big), om, order)


def default_harmonic_cutoff(p: SystemParams) -> int:
    return 2 * math.ceil(p.amp / p.omega) + 8


def numeric_position_table(
    p: SystemParams, m: int, n_max: int | None = None, tr: TruncationConfig | None = None
) -> tuple[PositionCoefficients, FloquetPair]:
    """Exact coefficients from the converged central doublet."""
    n_max = default_harmonic_cutoff(p) + abs(m) if n_max is None else int(n_max)
    pair = FloquetPair.from_doublet(solve_doublet(p, m, tr), p)
    table = position_coefficient_table(pair.state_minus, pair.state_plus, n_max)
    coeffs = PositionCoefficients(table, n_max, pair.e_minus, pair.e_plus, p.omega, "numeric")
    tail = coeffs.tail_fraction()
    if tail > 1e-10:
        warnings.warn(f"harmonic cutoff n_max={n_max} leaves tail weight {tail:.2e}", TruncationWarning)
    return coeffs, pair


# ---------------------------------------------------------------------------
# MRWA tensor and rates


def _n_matrix(x: PositionCoefficients, b: BathParams) -> np.ndarray:
    """N_{ab,n} = N(e_a - e_b + n omega) as an array [a, b, n]."""
    e = x.energies
    nu = e[:, None, None] - e[None, :, None] + x.harmonics[None, None, :] * x.omega
    return bath_N(nu, b)


def mrwa_tensor(x: PositionCoefficients, b: BathParams) -> np.ndarray:
    """Time-independent rate tensor L[a, b, a', b'] (harmonic pairs n' = -n only)."""
    X = x.table
    Xr = X[:, :, ::-1]  # X[.., -n]
    N = _n_matrix(x, b)
    Nr = N[:, :, ::-1]
    eye = np.eye(2)
    first = np.einsum("acn,dbn->abcd", (N * X), Xr) + np.einsum("acn,bdn,dbn->abcd", X, N, Xr)
    # -delta_{bb'} sum_{b''} X_{a b'', -n} N_{b'' a', n} X_{b'' a', n}
    second = np.einsum("aen,ecn,ecn->ac", Xr, N, X)
    # -delta_{aa'} sum_{a''} N_{a'' b', -n} X_{b' a'', n} X_{a'' b, -n}
    third = np.einsum("edn,den,ebn->db", Nr, X, Xr)
    L = first - np.einsum("ac,bd->abcd", second, eye) - np.einsum("ac,db->abcd", eye, third)
    return np.real_if_close(L, tol=1e6)


def mrwa_symmetry_residual(L: np.ndarray) -> float:
    res = [
        np.abs(L[0, 0, 0, 1] - L[0, 0, 1, 0]),
        np.abs(L[1, 1, 0, 1] - L[1, 1, 1, 0]),
        np.abs(L[0, 1, 0, 0] - L[1, 0, 0, 0]),
        np.abs(L[0, 1, 1, 1] - L[1, 0, 1, 1]),
        np.abs(L[0, 1, 0, 1] - L[1, 0, 1, 0]),
        np.abs(L[0, 1, 1, 0] - L[1, 0, 0, 1]),
    ]
    return float(max(res))


@dataclass(frozen=True)
class RateSet:
    gamma_rel: float
    gamma_deph: float
    per_harmonic: dict[int, tuple[float, float]]
    method: str

    def check(self, tol: float = 1e-12) -> None:
        rel = sum(v[0] for v in self.per_harmonic.values())
        deph = sum(v[1] for v in self.per_harmonic.values())
        if abs(rel - self.gamma_rel) > tol * max(1.0, abs(rel)) or abs(deph - self.gamma_deph) > tol * max(
            1.0, abs(deph)
        ):
            raise AssertionError("per-harmonic contributions do not add up")


def rates_from_tensor(L: np.ndarray) -> tuple[float, float]:
    """gamma_rel = pi (L_{--,++} - L_{--,--}), gamma_deph = -pi Re L_{-+,-+}."""
    return float(math.pi * np.real(L[0, 0, 1, 1] - L[0, 0, 0, 0])), float(-math.pi * np.real(L[0, 1, 0, 1]))


def rates_from_coefficients(x: PositionCoefficients, b: BathParams) -> RateSet:
    """Rates from any coefficient table.

    gamma_rel = 4 pi sum_n [N_{-+,n} + G(e_- - e_+ + n omega)/2] |X_{-+}^(n)|^2,
    gamma_deph = gamma_rel/2 + 4 pi sum_n N_{--,n} |X_{--}^(n)|^2.
    Harmonic keys are shifted by the resonance order so that key 0 holds the
    dressed-frequency term.
    """
    nus = x.e_minus - x.e_plus + x.harmonics * x.omega
    rel_terms = 4 * math.pi * (bath_N(nus, b) + 0.5 * b.G(nus)) * np.abs(x.table[0, 1]) ** 2
    deph_terms = 4 * math.pi * bath_N(x.harmonics * x.omega, b) * np.abs(x.table[0, 0]) ** 2
    g_rel = float(np.sum(rel_terms))
    per = {int(n): (float(r), float(d)) for n, r, d in zip(x.harmonics, rel_terms, deph_terms)}
    per[0] = (per[0][0], per[0][1] + 0.5 * g_rel)
    g_deph = float(sum(v[1] for v in per.values()))
    return RateSet(g_rel, g_deph, per, "generic")


def rates(ctx: ResonanceContext, b: BathParams, method: str = "vv2", deph_denominator: str = "consistent") -> RateSet:
    """Closed-form relaxation and dephasing rates.

    vv2: per-harmonic contributions gamma^0 and gamma^n (n != 0) with the
    squared coefficients expanded to second order.  vv2_mrwa: the same sums
    evaluated with the full second-order coefficient table, i.e. the decay
    rates of the analytic MRWA density evolution.  rwa: the two-level rates
    with Omega^RWA and Theta^RWA.

    The dephasing kernel of gamma^n contains Delta_{n-m}/(epsilon + (n-m) omega),
    the same term as the first-order X_{--}^(n).  ``deph_denominator='printed'``
    switches it to -epsilon + (n-m) omega for comparison.
    """
    if method == "rwa":
        big = rwa_frequency(ctx)
        th = mixing_angle(ctx, Order.RWA)
        g_rel = math.pi * 0.5 * float(bath_sym(big, b)) * math.sin(th) ** 2
        g_deph = 0.5 * g_rel + math.pi * float(bath_N(0.0, b)) * math.cos(th) ** 2
        return RateSet(g_rel, g_deph, {0: (g_rel, g_deph)}, "rwa")
    if method == "vv2_mrwa":
        out = rates_from_coefficients(position_table(ctx, "vv2"), b)
        return RateSet(out.gamma_rel, out.gamma_deph, out.per_harmonic, "vv2_mrwa")
    if method != "vv2":
        raise ParameterError(f"method must be rwa, vv2 or vv2_mrwa, got {method!r}")
    eps, om, m = ctx.p.epsilon, ctx.p.omega, ctx.m
    big = vv2_frequency(ctx)
    th = mixing_angle(ctx, Order.VV2)
    s2, c2 = math.sin(0.5 * th) ** 2, math.cos(0.5 * th) ** 2
    k = np.arange(-ctx.l_max, ctx.l_max + 1)
    k = k[k != m]
    norm = 1.0 - 0.5 * float(np.sum(ctx.delta(-k) ** 2 / (eps - k * om) ** 2))
    rel0 = math.pi * 0.5 * float(bath_sym(big, b)) * math.sin(th) ** 2 * norm
    n_all = np.arange(-(ctx.l_max + abs(m)), ctx.l_max + abs(m) + 1)
    n = n_all[n_all != 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        kern_rel = -s2 * ctx.delta(-(n + m)) / (eps - (n + m) * om) + c2 * ctx.delta(n - m) / (eps + (n - m) * om)
        second_den = (eps + (n - m) * om) if deph_denominator == "consistent" else (-eps + (n - m) * om)
        kern_deph = ctx.delta(-m - n) / (-eps + (m + n) * om) - ctx.delta(n - m) / second_den
    rel_n = math.pi * 0.5 * bath_sym(big - n * om, b) * kern_rel**2
    deph_n = math.pi / 4 * bath_N(n * om, b) * math.sin(th) ** 2 * kern_deph**2
    g_rel = rel0 + float(np.sum(rel_n))
    deph0 = 0.5 * g_rel + math.pi * float(bath_N(0.0, b)) * math.cos(th) ** 2 * norm
    per = {0: (rel0, deph0)}
    for nn, r, d in zip(n, rel_n, deph_n):
        per[int(nn)] = (float(r), float(d))
    g_deph = deph0 + float(np.sum(deph_n))
    return RateSet(g_rel, g_deph, per, "vv2")


# ---------------------------------------------------------------------------
# density-matrix evolution


@dataclass(frozen=True)
class DensityTrajectory:
    times: np.ndarray
    rho_mm: np.ndarray
    rho_mp: np.ndarray
    source: str
    tier: str

    @property
    def rho_pp(self) -> np.ndarray:
        return 1.0 - self.rho_mm

    def positivity_violation(self) -> float:
        """Largest negative eigenvalue magnitude of rho along the trajectory."""
        det = self.rho_mm * (1 - self.rho_mm) - np.abs(self.rho_mp) ** 2
        lam = 0.5 - np.sqrt(np.maximum(0.25 - det, 0.0))
        return float(max(0.0, -np.min(lam)))


def _generator(energies: np.ndarray, L: np.ndarray) -> np.ndarray:
    """4x4 generator on vec(rho) = (rho_--, rho_-+, rho_+-, rho_++)."""
    M = math.pi * np.asarray(L, dtype=complex).reshape(4, 4)
    for i, (a, b) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
        M[i, i] += -1j * (energies[a] - energies[b])
    return M


@dataclass(frozen=True)
class MRWASolution:
    """Exact solution of the constant-coefficient MRWA equations."""

    generator: np.ndarray
    eigvals: np.ndarray
    modes: np.ndarray
    weights: np.ndarray

    def vec(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return (self.modes @ (self.weights[:, None] * np.exp(np.outer(self.eigvals, t)))).T

    def residual(self, t) -> np.ndarray:
        """|d rho/dt - M rho| from the modal derivative."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        e = np.exp(np.outer(self.eigvals, t))
        rho = self.modes @ (self.weights[:, None] * e)
        drho = self.modes @ ((self.weights * self.eigvals)[:, None] * e)
        return np.max(np.abs(drho - self.generator @ rho), axis=0)


def mrwa_solution(x: PositionCoefficients, b: BathParams, rho_mm0: float, rho_mp0: complex) -> MRWASolution:
    L = mrwa_tensor(x, b)
    M = _generator(x.energies, L)
    lam, V = np.linalg.eig(M)
    z0 = np.array([rho_mm0, rho_mp0, np.conj(rho_mp0), 1.0 - rho_mm0], dtype=complex)
    w = np.linalg.solve(V, z0)
    return MRWASolution(M, lam, V, w)


def first_order_mrwa(
    x: PositionCoefficients, b: BathParams, rho_mm0: float, rho_mp0: complex, t
) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form first-order-in-kappa MRWA solution with rates from the tensor.

    rho_-- = pi L_{--,++}/g_rel + c_rel (i w/pi) e^{-g_rel t} + 2 L_{--,-+} Re{c_deph e^{-i w t}} e^{-g_deph t}
    rho_-+ = c_rel (L_{-+,++} - L_{-+,--}) e^{-g_rel t} + L_{-+,+-} c_deph e^{-i w t} e^{-g_deph t}/2
             + conj(c_deph) (i w/pi) e^{i w t} e^{-g_deph t}
    with w = e_+ - e_-; c_rel and c_deph fixed by the initial values.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    L = mrwa_tensor(x, b).astype(complex)
    g_rel, g_deph = rates_from_tensor(L)
    w = x.e_plus - x.e_minus
    ss = math.pi * L[0, 0, 1, 1].real / g_rel if g_rel > 0 else rho_mm0
    k_rel = L[0, 1, 1, 1] - L[0, 1, 0, 0]
    # unknowns: c_rel = i r, c_deph = u + i v
    A = np.zeros((3, 3))
    rhs = np.array([rho_mm0 - ss, rho_mp0.real, rho_mp0.imag])
    A[0] = [-w / math.pi, 2 * L[0, 0, 0, 1].real, -2 * L[0, 0, 0, 1].imag]
    c_r = 1j * k_rel
    c_u = 0.5 * L[0, 1, 1, 0] + 1j * w / math.pi
    c_v = 0.5j * L[0, 1, 1, 0] + w / math.pi
    A[1] = [c_r.real, c_u.real, c_v.real]
    A[2] = [c_r.imag, c_u.imag, c_v.imag]
    r, u, v = np.linalg.solve(A, rhs)
    c_rel, c_deph = 1j * r, u + 1j * v
    er, ed = np.exp(-g_rel * t), np.exp(-g_deph * t)
    rot = np.exp(-1j * w * t)
    rho_mm = ss + np.real(c_rel * 1j * w / math.pi) * er + 2 * np.real(L[0, 0, 0, 1] * c_deph * rot) * ed
    rho_mp = c_rel * k_rel * er + 0.5 * L[0, 1, 1, 0] * c_deph * rot * ed + np.conj(c_deph) * 1j * w / math.pi * np.conj(rot) * ed
    return np.real(rho_mm), rho_mp


def analytic_density_evolution(
    ctx: ResonanceContext,
    b: BathParams,
    t,
    tier: str = "vv2",
    rho0: tuple[float, complex] | None = None,
    method: str = "exact",
    target: str = "down",
) -> DensityTrajectory:
    """MRWA density evolution with analytic coefficients.

    ``rho0`` defaults to the localized state ``|target>`` projected onto the
    tier's own Floquet states at t = 0.  ``method='exact'`` solves the
    constant-coefficient MRWA system through its eigenmodes;
    ``method='first_order'`` uses the closed forms that are first order in kappa.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if tier not in ("rwa", "vv2"):
        raise ParameterError(f"analytic dissipative tier must be rwa or vv2, got {tier!r}")
    x = position_table(ctx, tier)
    if rho0 is None:
        rho0 = floquet_pair(ctx, tier).initial_density(target)
    rho_mm0, rho_mp0 = float(rho0[0]), complex(rho0[1])
    if method == "exact":
        z = mrwa_solution(x, b, rho_mm0, rho_mp0).vec(t)
        rho_mm, rho_mp = np.real(z[:, 0]), z[:, 1]
    elif method == "first_order":
        rho_mm, rho_mp = first_order_mrwa(x, b, rho_mm0, rho_mp0, t)
    else:
        raise ParameterError(f"method must be exact or first_order, got {method!r}")
    traj = DensityTrajectory(t, rho_mm, rho_mp, "analytic_mrwa", tier)
    _check_positivity(traj)
    return traj


def _check_positivity(traj: DensityTrajectory) -> None:
    v = traj.positivity_violation()
    if v > 1e-3:
        warnings.warn(f"density matrix leaves the physical set by {v:.2e} ({traj.source})", PositivityWarning)


class _FBRGenerator:
    """Time-dependent Floquet-Bloch-Redfield generator for the real vector
    (rho_--, Re rho_-+, Im rho_-+, 1)."""

    def __init__(self, x: PositionCoefficients, b: BathParams):
        self.x = x
        self.n = x.harmonics
        self.om = x.omega
        self.E = np.diag(x.energies).astype(complex)
        N = _n_matrix(x, b)
        self.X = x.table.astype(complex)
        self.NX = N * self.X

    def rhs_matrix(self, t: float) -> np.ndarray:
        ph = np.exp(1j * self.n * self.om * t)
        Y = self.X @ ph
        Zp = self.NX @ ph
        Zm = Zp.conj().T
        # rho -> -i[E, rho] + pi (Zp rho Y + Y rho Zm - Y Zp rho - rho Zm Y)
        cols = []
        for rho in _BASIS:
            d = -1j * (self.E @ rho - rho @ self.E) + math.pi * (
                Zp @ rho @ Y + Y @ rho @ Zm - Y @ Zp @ rho - rho @ Zm @ Y
            )
            cols.append([d[0, 0].real, d[0, 1].real, d[0, 1].imag, 0.0])
        return np.array(cols).T


# affine basis: rho(y) = sum_i y_i B_i with y = (p, re, im, 1)
_BASIS = [
    np.array([[1, 0], [0, -1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, 1j], [-1j, 0]], dtype=complex),
    np.array([[0, 0], [0, 1]], dtype=complex),
]


def numeric_fbr_solve(
    p: SystemParams,
    b: BathParams,
    t_grid,
    m: int,
    rho0: tuple[float, complex] | None = None,
    n_max: int | None = None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    target: str = "down",
) -> tuple[DensityTrajectory, FloquetPair]:
    """Integrate the full time-dependent master equation with exact coefficients.

    The generator is T-periodic, so the one-period propagator U(tau) is
    integrated once (adaptive Runge-Kutta, dense output) and the trajectory
    is assembled as U(tau) U(T)^k y0.
    """
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if np.any(t < 0):
        raise ParameterError("t_grid must be non-negative")
    x, pair = numeric_position_table(p, m, n_max)
    if rho0 is None:
        rho0 = pair.initial_density(target)
    gen = _FBRGenerator(x, b)
    T = p.period

    def f(tau, u):
        return (gen.rhs_matrix(tau) @ u.reshape(4, 4)).ravel()

    sol = solve_ivp(f, (0.0, T), np.eye(4).ravel(), method="DOP853", rtol=rtol, atol=atol, dense_output=True)
    if not sol.success:
        raise IntegrationError(f"one-period propagator failed at t={sol.t[-1]:.6g}: {sol.message}")
    U_T = sol.y[:, -1].reshape(4, 4)
    y0 = np.array([rho0[0], complex(rho0[1]).real, complex(rho0[1]).imag, 1.0])
    k = np.floor(t / T).astype(int)
    tau = t - k * T
    out = np.empty((len(t), 4))
    cache = {0: y0}
    kmax = int(k.max()) if len(k) else 0
    yk = y0
    for j in range(1, kmax + 1):
        yk = U_T @ yk
        cache[j] = yk
    U_tau = sol.sol(tau).T.reshape(-1, 4, 4)
    for i in range(len(t)):
        out[i] = U_tau[i] @ cache[int(k[i])]
    traj = DensityTrajectory(t, out[:, 0], out[:, 1] + 1j * out[:, 2], "numeric_fbr", "numeric")
    _check_positivity(traj)
    return traj, pair
