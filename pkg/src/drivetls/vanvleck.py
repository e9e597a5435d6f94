"""Closed-form analytics at an m-photon resonance.

RWA and second-order Van Vleck quasienergies, mixing angles, the shifted
resonance condition, perturbative Floquet states and the nondissipative
survival probability P_{down->down}(t).

Conventions: the resonant doublet is (|u0_{up,n}>, |u0_{down,n+m}>); the
lower state is Phi_{-,n} and the upper one Phi_{+,n+m}.  Amplitudes live on
the unperturbed basis used by :mod:`drivetls.floquet_engine`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .errors import ParameterError, RootFindingError, SingularDenominatorError, TruncationWarning
from .floquet_engine import CompositeState, FloquetPair
from .special_functions import DressedDeltas, SystemParams


class Order(str, Enum):
    RWA = "rwa"
    VV2 = "vv2"


class StateOrder(str, Enum):
    ORDER1 = "order1"
    ORDER2 = "order2"


class Tier(str, Enum):
    RWA = "rwa"
    VV1 = "vv1"
    VV2 = "vv2"
    VV2_AVERAGED = "vv2_averaged"


def _sign(x: float) -> float:
    return 1.0 if x >= 0 else -1.0


@dataclass(frozen=True)
class ResonanceContext:
    """Resonance order, drive parameters and series controls.

    Dressed elements with ``|index| > l_max`` are treated as zero in every
    series.  Denominators ``epsilon + l*omega`` for the retained indices
    (all except ``l = -m``) must exceed ``delta_den`` in magnitude.
    """

    m: int
    p: SystemParams
    l_max: int = 40
    delta_den: float | None = None

    def __post_init__(self):
        if self.l_max < 1:
            raise ParameterError("l_max must be >= 1")
        if self.delta_den is None:
            object.__setattr__(self, "delta_den", 1e-6 * self.p.delta)
        if not self.delta_den > 0:
            raise ParameterError("delta_den must be positive")
        object.__setattr__(self, "m", int(self.m))
        deltas = DressedDeltas(self.p, self.l_max + 2 * abs(self.m) + 2)
        object.__setattr__(self, "_deltas", deltas)
        ks = self.indices()
        den = self.p.epsilon + ks * self.p.omega
        bad = np.abs(den) <= self.delta_den
        if np.any(bad):
            k = int(ks[bad][0])
            raise SingularDenominatorError(
                f"|epsilon + l*omega| = {abs(den[bad][0]):.3e} <= delta_den at l={k} (m={self.m}); "
                "near-degenerate coupling outside the resonant pair"
            )

    def with_l_max(self, l_max: int) -> ResonanceContext:
        return ResonanceContext(self.m, self.p, l_max, self.delta_den)

    def indices(self) -> np.ndarray:
        """Retained series indices l != -m, |l| <= l_max."""
        ks = np.arange(-self.l_max, self.l_max + 1)
        return ks[ks != -self.m]

    def delta(self, n):
        """Dressed element Delta_n, zero beyond the series cut."""
        n = np.asarray(n, dtype=int)
        vals = np.where(np.abs(n) <= self.l_max, self._deltas(np.clip(n, -self.l_max, self.l_max)), 0.0)
        return vals if vals.ndim else float(vals)

    @property
    def delta_res(self) -> float:
        """Resonant coupling Delta_{-m}."""
        return float(self.delta(-self.m))

    @property
    def sign_dm(self) -> float:
        return _sign(self.delta_res)

    @property
    def cdt_flag(self) -> bool:
        return abs(self.delta_res) <= self.delta_den

    def ratio(self, k):
        """Delta_k / (epsilon + k omega) with the resonant index k = -m set to 0."""
        k = np.asarray(k, dtype=int)
        den = self.p.epsilon + k * self.p.omega
        safe = np.where(k == -self.m, 1.0, den)
        out = np.where(k == -self.m, 0.0, self.delta(k) / safe)
        return out if out.ndim else float(out)

    def shift_sum(self) -> float:
        """Sum_{l != -m} Delta_l^2 / (epsilon + l omega)."""
        ks = self.indices()
        return float(np.sum(self.delta(ks) ** 2 / (self.p.epsilon + ks * self.p.omega)))

    def detuning(self, include_shift: bool = True) -> float:
        det = -self.p.epsilon + self.m * self.p.omega
        if include_shift:
            det -= 0.5 * self.shift_sum()
        return det


def check_series_convergence(ctx: ResonanceContext, rtol: float = 1e-10) -> float:
    """Change of the second-order shift sum when l_max is doubled.

    Measured relative to the sum of term magnitudes, since the signed sum
    cancels to zero at epsilon = m omega on a zero of J_m.
    """
    wide = ctx.with_l_max(2 * ctx.l_max)
    a = ctx.shift_sum()
    b = wide.shift_sum()
    ks = wide.indices()
    scale = float(np.sum(wide.delta(ks) ** 2 / np.abs(ctx.p.epsilon + ks * ctx.p.omega)))
    rel = abs(a - b) / max(scale, 1e-300)
    if rel > rtol:
        warnings.warn(f"shift sum not converged at l_max={ctx.l_max}: rel change {rel:.2e}", TruncationWarning)
    return rel


def rwa_frequency(ctx: ResonanceContext) -> float:
    """Omega^RWA = sqrt((-epsilon + m omega)^2 + Delta_{-m}^2)."""
    return math.hypot(ctx.detuning(include_shift=False), ctx.delta_res)


def vv2_frequency(ctx: ResonanceContext, include_shift: bool = True) -> float:
    """Second-order Van Vleck frequency; ``include_shift=False`` gives the RWA value."""
    return math.hypot(ctx.detuning(include_shift=include_shift), ctx.delta_res)


def _angle(det: float, dm: float) -> float:
    if dm == 0.0 and det == 0.0:
        return 0.5 * math.pi
    return math.atan2(abs(dm), det)


def mixing_angle(ctx: ResonanceContext, order: Order | str = Order.RWA) -> float:
    """Mixing angle in [0, pi]: tan(Theta) = |Delta_{-m}| / detuning.

    At a zero of Delta_{-m} with vanishing detuning the angle is pi/2 and
    ``ctx.cdt_flag`` is set.  For exactly vanishing Delta_{-m} and positive
    detuning the limiting value 0 is returned.
    """
    order = Order(order)
    return _angle(ctx.detuning(include_shift=order is Order.VV2), ctx.delta_res)


def resonance_bias(
    m: int, p: SystemParams, l_max: int = 40, xtol: float = 1e-12, n_scan: int = 400
) -> float:
    """Bias solving epsilon = m omega - (1/2) sum_{l != -m} Delta_l^2/(epsilon + l omega).

    The root is bracketed inside (m omega - omega/2, m omega + omega/2); the
    bracket is scanned first so that missing or multiple roots are reported.
    """
    m = int(m)
    ks = np.arange(-l_max, l_max + 1)
    ks = ks[ks != -m]
    d2 = DressedDeltas(p, l_max)(ks) ** 2

    def g(eps: float) -> float:
        return eps - m * p.omega + 0.5 * float(np.sum(d2 / (eps + ks * p.omega)))

    lo = (m - 0.5) * p.omega
    hi = (m + 0.5) * p.omega
    pad = 1e-9 * p.omega
    grid = np.linspace(lo + pad, hi - pad, n_scan)
    vals = np.array([g(e) for e in grid])
    # a sign change across a pole is not a root
    poles = -ks * p.omega
    changes = []
    for i in range(n_scan - 1):
        if vals[i] == 0.0:
            changes.append((grid[i], grid[i]))
        elif vals[i] * vals[i + 1] < 0:
            if np.any((poles > grid[i]) & (poles < grid[i + 1])):
                continue
            changes.append((grid[i], grid[i + 1]))
    if not changes:
        raise RootFindingError(
            f"no resonance root for m={m} in ({lo:.6g}, {hi:.6g}); g(lo)={vals[0]:.3e}, g(hi)={vals[-1]:.3e}"
        )
    if len(changes) > 1:
        raise RootFindingError(
            f"{len(changes)} resonance roots for m={m} in ({lo:.6g}, {hi:.6g}): brackets {changes}"
        )
    a, b = changes[0]
    if a == b:
        return float(a)
    return float(brentq(g, a, b, xtol=xtol * p.delta, rtol=4 * np.finfo(float).eps))


# ---------------------------------------------------------------------------
# perturbative Floquet states


def effective_states(ctx: ResonanceContext, theta: float, half_width: int) -> tuple[CompositeState, CompositeState]:
    """Eigenstates Phi_{-,0} and Phi_{+,m} of the 2x2 effective block."""
    n0 = -half_width
    size = 2 * half_width + 1
    s, c = math.sin(0.5 * theta), math.cos(0.5 * theta)
    sg = ctx.sign_dm
    up_m, dn_m = np.zeros(size), np.zeros(size)
    up_p, dn_p = np.zeros(size), np.zeros(size)
    up_m[0 - n0], dn_m[ctx.m - n0] = -s, -sg * c
    up_p[0 - n0], dn_p[ctx.m - n0] = c, -sg * s
    return CompositeState(n0, up_m, dn_m), CompositeState(n0, up_p, dn_p)


def _is1_block(ctx: ResonanceContext, photons: np.ndarray) -> np.ndarray:
    """<u_up,n| iS1 |u_down,l> on the photon window (rows up, columns down)."""
    diff = photons[:, None] - photons[None, :]
    vals = 0.5 * ctx.ratio(diff)
    vals[-diff == ctx.m] = 0.0
    return vals


def _is2_up_column(ctx: ResonanceContext, photons: np.ndarray, j: int) -> np.ndarray:
    """<u_up,n| iS2 |u_up,j> for all n in the window."""
    eps, om, m = ctx.p.epsilon, ctx.p.omega, ctx.m
    n = photons[:, None]
    k = np.arange(j - ctx.l_max, j + ctx.l_max + 1)[None, :]
    keep = (k != n + m) & (k != j + m)
    with np.errstate(divide="ignore", invalid="ignore"):
        term = 0.5 * ctx.delta(n - k) * ctx.delta(j - k) * (1.0 / (eps + (n - k) * om) + 1.0 / (eps + (j - k) * om))
    sums = np.sum(np.where(keep, term, 0.0), axis=1)
    nn = photons
    dm = ctx.delta_res
    extra = ctx.delta(nn - j - m) * dm * _safe_inv(eps + (nn - j - m) * om) + ctx.delta(j - nn - m) * dm * _safe_inv(
        eps + (j - nn - m) * om
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        col = (sums + extra) / (4.0 * (nn - j) * om)
    col[nn == j] = 0.0
    return col


def _is2_down_column(ctx: ResonanceContext, photons: np.ndarray, j: int) -> np.ndarray:
    """<u_down,n| iS2 |u_down,j> for all n in the window."""
    eps, om, m = ctx.p.epsilon, ctx.p.omega, ctx.m
    n = photons[:, None]
    k = np.arange(j - ctx.l_max, j + ctx.l_max + 1)[None, :]
    keep = (k != n - m) & (k != j - m)
    with np.errstate(divide="ignore", invalid="ignore"):
        term = 0.5 * ctx.delta(k - n) * ctx.delta(k - j) * (1.0 / (-eps + (n - k) * om) + 1.0 / (-eps + (j - k) * om))
    sums = np.sum(np.where(keep, term, 0.0), axis=1)
    nn = photons
    dm = ctx.delta_res
    extra = ctx.delta(j - m - nn) * dm * _safe_inv(-eps + (nn - j + m) * om) + ctx.delta(nn - m - j) * dm * _safe_inv(
        -eps + (j - nn + m) * om
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        col = (sums + extra) / (4.0 * (nn - j) * om)
    col[nn == j] = 0.0
    return col


def _safe_inv(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(x == 0.0, 0.0, 1.0 / np.where(x == 0.0, 1.0, x))


def vv_eigenstates(
    ctx: ResonanceContext,
    order: StateOrder | str = StateOrder.ORDER2,
    theta: float | None = None,
    normalize: bool = True,
) -> tuple[CompositeState, CompositeState]:
    """Perturbative Floquet states ``(Phi_{-,0}, Phi_{+,m})``.

    The effective eigenstates are mapped back with
    ``exp(-iS) = 1 - iS1 - iS2 + (iS1)^2/2`` (order2) or ``1 - iS1`` (order1),
    then renormalized unless ``normalize`` is False.  The mixing angle defaults to Theta^RWA for order1 and
    the shifted angle for order2.
    """
    order = StateOrder(order)
    if theta is None:
        theta = mixing_angle(ctx, Order.RWA if order is StateOrder.ORDER1 else Order.VV2)
    hw = 2 * ctx.l_max + abs(ctx.m) + 2
    photons = np.arange(-hw, hw + 1)
    eff_minus, eff_plus = effective_states(ctx, theta, hw)
    s1 = _is1_block(ctx, photons)

    def apply_s1(up, dn):
        return s1 @ dn, -s1.T @ up

    i0 = 0 + hw
    im = ctx.m + hw
    s2_up = _is2_up_column(ctx, photons, 0) if order is StateOrder.ORDER2 else None
    s2_dn = _is2_down_column(ctx, photons, ctx.m) if order is StateOrder.ORDER2 else None

    out = []
    for eff in (eff_minus, eff_plus):
        up, dn = eff.up.copy(), eff.down.copy()
        a_up, a_dn = apply_s1(eff.up, eff.down)
        up -= a_up
        dn -= a_dn
        if order is StateOrder.ORDER2:
            up -= s2_up * eff.up[i0]
            dn -= s2_dn * eff.down[im]
            b_up, b_dn = apply_s1(a_up, a_dn)
            up += 0.5 * b_up
            dn += 0.5 * b_dn
        state = CompositeState(-hw, up, dn)
        out.append(state.normalized() if normalize else state)
    return out[0], out[1]


# ---------------------------------------------------------------------------
# solution bundle and harmonic constants


@dataclass(frozen=True)
class VanVleckSolution:
    omega_rwa: float
    omega_vv2: float
    theta_rwa: float
    theta_vv2: float
    sign_dm: float
    cdt_flag: bool
    states_order1: tuple[CompositeState, CompositeState]
    states_order2: tuple[CompositeState, CompositeState]

    def quasienergies(self, m: int, omega: float, order: Order | str = Order.VV2) -> tuple[float, float]:
        """(epsilon_{-,0}, epsilon_{+,m}) = -m omega/2 -/+ Omega/2."""
        big = self.omega_vv2 if Order(order) is Order.VV2 else self.omega_rwa
        return -0.5 * m * omega - 0.5 * big, -0.5 * m * omega + 0.5 * big


def solve_vanvleck(ctx: ResonanceContext) -> VanVleckSolution:
    return VanVleckSolution(
        omega_rwa=rwa_frequency(ctx),
        omega_vv2=vv2_frequency(ctx),
        theta_rwa=mixing_angle(ctx, Order.RWA),
        theta_vv2=mixing_angle(ctx, Order.VV2),
        sign_dm=ctx.sign_dm,
        cdt_flag=ctx.cdt_flag,
        states_order1=vv_eigenstates(ctx, StateOrder.ORDER1),
        states_order2=vv_eigenstates(ctx, StateOrder.ORDER2),
    )


@dataclass(frozen=True)
class HarmonicConstants:
    a0: float
    b0: float
    c0: float
    d: float
    f: float
    resonant_branch: bool


def _b1_coeffs(ctx: ResonanceContext, n: np.ndarray) -> np.ndarray:
    """Coefficients of exp(i n omega t) in B(t) without the |A(t)|^2/8 part (n != 0)."""
    eps, om, m = ctx.p.epsilon, ctx.p.omega, ctx.m
    dm = ctx.delta_res
    t1 = ctx.delta(n - m) * dm * _safe_inv(eps + (n - m) * om)
    t2 = ctx.delta(-m - n) * dm * _safe_inv(eps - (n + m) * om)
    return (t1 + t2) / (4.0 * n * om)


def _c_coeffs(ctx: ResonanceContext, n: np.ndarray) -> np.ndarray:
    """Coefficients of exp(i n omega t) in C(t) (n != 0)."""
    eps, om, m = ctx.p.epsilon, ctx.p.omega, ctx.m
    p = np.arange(-ctx.l_max, ctx.l_max + 1)[None, :]
    nn = n[:, None]
    keep = (p != -m) & (p != -nn - m)
    with np.errstate(divide="ignore", invalid="ignore"):
        term = ctx.delta(p) * ctx.delta(p + nn) / (8.0 * nn * om) * (1.0 / (eps + p * om) + 1.0 / (eps + (p + nn) * om))
    return np.sum(np.where(keep, term, 0.0), axis=1)


def harmonic_series(ctx: ResonanceContext, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """A(t), B(t), C(t) on a time grid."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    om = ctx.p.omega
    ks = ctx.indices()
    a_t = np.exp(1j * om * np.outer(t, ks)) @ ctx.ratio(ks)
    ns = np.arange(-2 * ctx.l_max, 2 * ctx.l_max + 1)
    ns = ns[ns != 0]
    ph = np.exp(1j * om * np.outer(t, ns))
    b_t = ph @ _b1_coeffs(ctx, ns) + 0.125 * np.abs(a_t) ** 2
    c_t = ph @ _c_coeffs(ctx, ns)
    return a_t, b_t, c_t


def harmonic_constants(ctx: ResonanceContext, strict: bool = True) -> HarmonicConstants:
    """A(0), B(0), C(0) and the constants d, f of the expanded survival formula.

    In the generic branch ``d`` and ``f`` divide by ``a^2/4 - 2b - 2c cos(Theta)``
    (with a = A(0)/Delta etc.); below 1e-14 this raises, or yields NaN when
    ``strict`` is False.
    """
    a_t, b_t, c_t = harmonic_series(ctx, 0.0)
    a0, b0, c0 = float(a_t[0].real), float(b_t[0].real), float(c_t[0].real)
    dl = ctx.p.delta
    resonant = abs(ctx.p.epsilon - ctx.m * ctx.p.omega) < 1e-9 * dl
    if resonant:
        return HarmonicConstants(a0, b0, c0, b0, -b0, True)
    a, b, c = a0 / dl, b0 / dl**2, c0 / dl**2
    cos_t = math.cos(mixing_angle(ctx, Order.VV2))
    den = 0.25 * a * a - 2 * b - 2 * c * cos_t
    if den < 1e-14:
        if strict:
            raise SingularDenominatorError(f"a^2/4 - 2b - 2c cos(Theta) = {den:.3e} < 1e-14")
        return HarmonicConstants(a0, b0, c0, math.nan, math.nan, False)
    rad = 0.25 * a * a - 2 * b - c - 3 * c * cos_t
    root = math.sqrt(rad) if rad >= 0 else math.nan
    cos2 = math.cos(2 * mixing_angle(ctx, Order.VV2))
    d = dl**2 / den * (
        a / 16 - 0.75 * b * a * a + 2 * b + 2 * c * c - 2 * c * (0.5 * a * a - 3 * b) * cos_t + 2 * c * c * cos2
        - 0.5 * a * rad * root
    )
    f = dl**2 / den * (0.25 * c * a * a - 2 * b * c - 2 * c * c * cos_t)
    return HarmonicConstants(a0, b0, c0, d, f, False)


def closed_form_down_spinors(ctx: ResonanceContext, t, theta: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """<down|Phi_-(t)> and <down|Phi_+(t)> of the unnormalized second-order states via A(t), B(t), C(t)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    theta = mixing_angle(ctx, Order.VV2) if theta is None else theta
    s, c = math.sin(0.5 * theta), math.cos(0.5 * theta)
    sg = ctx.sign_dm
    om, m = ctx.p.omega, ctx.m
    a_t, b_t, c_t = harmonic_series(ctx, t)
    gauge = np.exp(-0.5j * ctx.p.drive_ratio * np.sin(om * t))
    rot = np.exp(-1j * m * om * t)
    minus = gauge * (-sg * c * rot - 0.5 * s * a_t + sg * c * rot * (b_t + c_t))
    plus = gauge * (-sg * s + 0.5 * c * np.conj(rot) * a_t + sg * s * (b_t - np.conj(c_t)))
    return minus, plus


# ---------------------------------------------------------------------------
# survival probability


def rwa_survival(omega: float, theta: float, t) -> np.ndarray:
    """cos^2(Omega t/2) + cos^2(Theta) sin^2(Omega t/2)."""
    t = np.asarray(t, dtype=float)
    s2 = np.sin(0.5 * omega * t) ** 2
    return 1.0 - s2 + math.cos(theta) ** 2 * s2


def floquet_pair(ctx: ResonanceContext, tier: Tier | str) -> FloquetPair:
    """Analytic Floquet pair for the rwa, vv1 or vv2 tier."""
    tier = Tier(tier)
    m, om = ctx.m, ctx.p.omega
    if tier is Tier.RWA:
        big = rwa_frequency(ctx)
        hw = abs(m) + 1
        s_m, s_p = effective_states(ctx, mixing_angle(ctx, Order.RWA), hw)
    elif tier is Tier.VV1:
        big = rwa_frequency(ctx)
        s_m, s_p = vv_eigenstates(ctx, StateOrder.ORDER1)
    elif tier is Tier.VV2:
        big = vv2_frequency(ctx)
        s_m, s_p = vv_eigenstates(ctx, StateOrder.ORDER2)
    else:
        raise ParameterError(f"no Floquet pair for tier {tier.value}")
    return FloquetPair(s_m, s_p.shift(-m), -0.5 * m * om - 0.5 * big, 0.5 * m * om + 0.5 * big, ctx.p, tier.value)


def survival_nondissipative(ctx: ResonanceContext, tier: Tier | str, t) -> np.ndarray:
    """P_{down->down}(t) for a system starting in |down>.

    rwa and vv2_averaged use the two-level formula with (Omega^RWA, Theta^RWA)
    and (Omega^(2), Theta) respectively; vv1 and vv2 assemble the return
    probability from the first- and second-order Floquet states, whose
    spinors are orthonormalized pointwise.
    """
    tier = Tier(tier)
    t = np.asarray(t, dtype=float)
    if tier is Tier.RWA:
        return rwa_survival(rwa_frequency(ctx), mixing_angle(ctx, Order.RWA), t)
    if tier is Tier.VV2_AVERAGED:
        return rwa_survival(vv2_frequency(ctx), mixing_angle(ctx, Order.VV2), t)
    pair = floquet_pair(ctx, tier)
    tt = np.ravel(t)
    rho_mm, rho_mp = pair.coherent_density(tt)
    return pair.survival(rho_mm, rho_mp, tt).reshape(t.shape)


def survival_expanded(ctx: ResonanceContext, t, sign_index: str = "-m") -> np.ndarray:
    """Term-by-term expanded second-order return probability.

    Sum of the averaged two-level part, the first-order harmonic part and the
    second-order part written with A(0), B(0), C(0), d and f.  Kept as an
    independent cross-check of :func:`survival_nondissipative`; the square
    root is taken on the complex plane and only the real part is returned.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    om, m = ctx.p.omega, ctx.m
    big = vv2_frequency(ctx)
    th = mixing_angle(ctx, Order.VV2)
    hc = harmonic_constants(ctx, strict=False)
    d, f = (hc.d, hc.f) if math.isfinite(hc.d) and math.isfinite(hc.f) else (hc.b0, -hc.b0)
    sg = _sign(float(ctx.delta(m))) if sign_index == "m" else ctx.sign_dm
    ks = ctx.indices()
    r = ctx.ratio(ks)
    arg = np.outer(t, (ks + m) * om)
    s_sum = np.sin(arg) @ r
    c_sum = np.cos(arg) @ r
    s2 = np.sin(0.5 * big * t) ** 2
    c2 = np.cos(0.5 * big * t) ** 2
    ct = math.cos(th)
    p_avg = c2 + ct**2 * s2
    p1 = -0.5 * sg * math.sin(th) * np.sin(big * t) * s_sum + sg * math.sin(2 * th) * s2 * (0.5 * c_sum + 0.5 * hc.a0)
    root = np.sqrt(complex(0.25 * hc.a0**2 - 2 * (hc.b0 + hc.c0 * ct)))
    q = 0.5 * hc.a0 - root
    ns = np.arange(-2 * ctx.l_max, 2 * ctx.l_max + 1)
    ns = ns[ns != 0]
    cos_n = np.cos(np.outer(t, ns * om))
    b1 = _b1_coeffs(ctx, ns) * 2.0
    cc = _c_coeffs(ctx, ns) * 2.0
    # sum_{j,k} r_j r_k cos((j-k) omega t) = |sum_k r_k e^{i k omega t}|^2
    a_abs2 = np.abs(np.exp(1j * om * np.outer(t, ks)) @ r) ** 2
    p2 = (
        -sg * math.sin(2 * th) * s2 * root
        + math.sin(th) ** 2 * s2 * (0.25 * s_sum**2 + 0.25 * c_sum**2 + q**2)
        + q * (c_sum * c2 + ct * s_sum * np.sin(big * t) - c_sum * ct**2 * s2)
        - (c2 - ct**2 * s2) * (cos_n @ b1)
        - 0.25 * (c2 + ct**2 * s2) * a_abs2
        - f * ct
        + ct * (cos_n @ cc)
        - 2 * d * (c2 + ct * s2)
    )
    return np.real(p_avg + p1 + p2)
