"""Observables built on the Floquet machinery: survival probabilities, their
Fourier spectra, RWA/Van Vleck validity maps and the CDT / DITO scenarios.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.signal import find_peaks, peak_widths

from .bath_dissipation import BathParams, DensityTrajectory, analytic_density_evolution, numeric_fbr_solve
from .errors import (
    AmbiguousDoubletError,
    NumericalError,
    ParameterError,
    PositivityWarning,
    SingularDenominatorError,
    SpectrumResolutionError,
    TierMismatchError,
)
from .floquet_engine import FloquetPair, TruncationConfig, build_floquet_matrix, central_doublet, diagonalize_floquet, solve_doublet
from .special_functions import SystemParams, bessel_zero
from .vanvleck import (
    ResonanceContext,
    floquet_pair,
    resonance_bias,
    rwa_frequency,
    survival_nondissipative,
    vv2_frequency,
)

THREADS_ENV = "DRIVETLS_THREADS"
PROB_TOL = 1e-9
CLIP_LEVEL = 0.15
SINGULAR_LEVEL = 1e-9


def worker_count(default: int | None = None) -> int:
    """Thread count from ``DRIVETLS_THREADS`` (falls back to the CPU count)."""
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            n = int(raw)
        except ValueError as exc:
            raise ParameterError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
        if n < 1:
            raise ParameterError(f"{THREADS_ENV} must be >= 1")
        return n
    return default or os.cpu_count() or 1


# ---------------------------------------------------------------------------
# trajectories


@dataclass(frozen=True)
class Trajectory:
    """Probability series on a uniform time grid, with a parameter snapshot in ``meta``."""

    times: np.ndarray
    values: np.ndarray
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape:
            raise ParameterError("times and values must be 1-d arrays of equal length")
        if len(t) > 1:
            dt = np.diff(t)
            if np.any(dt <= 0):
                raise ParameterError("times must be strictly increasing")
            if np.max(np.abs(dt - dt[0])) > 1e-9 * max(abs(t[-1]), 1.0):
                raise ParameterError("times must be uniformly spaced")
        if np.any(v < -PROB_TOL) or np.any(v > 1 + PROB_TOL):
            raise ParameterError(f"values leave [0, 1]: min {v.min():.3e}, max {v.max():.3e}")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0]) + self.dt

    @property
    def tier(self) -> str:
        return str(self.meta.get("tier", ""))

    def transition(self) -> np.ndarray:
        return 1.0 - self.values


def time_grid(p: SystemParams, t_max: float, points_per_period: int = 2048) -> np.ndarray:
    """Uniform grid on [0, t_max] with a whole number of points per drive period."""
    if t_max <= 0:
        raise ParameterError("t_max must be positive")
    if points_per_period < 4:
        raise ParameterError("points_per_period must be >= 4")
    dt = p.period / points_per_period
    n = int(math.floor(t_max / dt + 1e-9)) + 1
    return dt * np.arange(n)


def _as_probability(values: np.ndarray, what: str) -> np.ndarray:
    lo, hi = float(np.min(values)), float(np.max(values))
    if lo < -PROB_TOL or hi > 1 + PROB_TOL:
        excess = max(-lo, hi - 1)
        warnings.warn(f"{what} leaves [0, 1] by {excess:.2e}; clipped", PositivityWarning)
    return np.clip(values, 0.0, 1.0)


def _snapshot(p: SystemParams, **extra) -> dict:
    out = asdict(p)
    out.update(extra)
    return out


def survival_from_density(traj: DensityTrajectory, states: FloquetPair, target: str = "down") -> Trajectory:
    """Return probability of ``|target>`` from a density trajectory in the Floquet basis.

    Analytic MRWA densities must be paired with states of the same analytic
    tier and numeric master-equation densities with numeric states.
    """
    if traj.source == "numeric_fbr" and states.tier != "numeric":
        raise TierMismatchError(f"numeric density trajectory paired with {states.tier!r} states")
    if traj.source == "analytic_mrwa" and states.tier != traj.tier:
        raise TierMismatchError(f"{traj.tier!r} density trajectory paired with {states.tier!r} states")
    if traj.source == "coherent" and states.tier != traj.tier:
        raise TierMismatchError(f"{traj.tier!r} coherent trajectory paired with {states.tier!r} states")
    values = states.survival(traj.rho_mm, traj.rho_mp, traj.times, target)
    meta = _snapshot(states.params, tier=traj.tier, source=traj.source, target=target)
    return Trajectory(traj.times, _as_probability(values, "survival probability"), meta)


def coherent_trajectory(pair: FloquetPair, t, target: str = "down") -> DensityTrajectory:
    """Closed-system density trajectory of the pure state ``|target>`` at t = 0."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    rho_mm, rho_mp = pair.coherent_density(t, target)
    return DensityTrajectory(t, rho_mm, rho_mp, "coherent", pair.tier)


def survival_trajectory(
    p: SystemParams,
    m: int,
    tier: str,
    t,
    bath: BathParams | None = None,
    target: str = "down",
    l_max: int = 40,
) -> Trajectory:
    """P_{target->target}(t) for one tier ('rwa', 'vv1', 'vv2', 'vv2_averaged' or 'numeric').

    Without a bath (or with kappa = 0) the closed-system result is returned;
    otherwise analytic tiers go through the MRWA solution and the numeric
    tier through the full time-dependent master equation.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    dissipative = bath is not None and bath.kappa > 0
    if tier == "numeric":
        if dissipative:
            dens, pair = numeric_fbr_solve(p, bath, t, m, target=target)
        else:
            pair = FloquetPair.from_doublet(solve_doublet(p, m), p)
            dens = coherent_trajectory(pair, t, target)
        out = survival_from_density(dens, pair, target)
        rabi = pair.e_plus - pair.e_minus - m * p.omega
    else:
        ctx = ResonanceContext(m, p, l_max=l_max)
        rabi = rwa_frequency(ctx) if tier in ("rwa", "vv1") else vv2_frequency(ctx)
        if dissipative:
            if tier not in ("rwa", "vv2"):
                raise ParameterError(f"dissipative analytic dynamics exist for rwa and vv2, not {tier!r}")
            dens = analytic_density_evolution(ctx, bath, t, tier=tier, target=target)
            out = survival_from_density(dens, floquet_pair(ctx, tier), target)
        elif target == "down":
            values = survival_nondissipative(ctx, tier, t)
            out = Trajectory(t, _as_probability(values, "survival probability"), _snapshot(p, tier=tier, source="coherent", target=target))
        else:
            pair = floquet_pair(ctx, tier)
            out = survival_from_density(coherent_trajectory(pair, t, target), pair, target)
    out.meta.update(m=m, rabi=float(rabi), kappa=0.0 if bath is None else bath.kappa, beta=None if bath is None else bath.beta)
    return out


# ---------------------------------------------------------------------------
# spectra

PEAK_CLASSES = ("relaxation", "dressed", "harmonic", "sideband")


@dataclass(frozen=True)
class Peak:
    nu: float
    height: float
    width: float
    kind: str
    coefficient: complex | None = None

    @property
    def is_delta(self) -> bool:
        return self.coefficient is not None


@dataclass(frozen=True)
class SpectrumEstimate:
    """|F(nu)| on nu >= 0 with classified peaks.

    Undamped drive lines removed by asymptote subtraction appear in ``peaks``
    with zero width and their complex Fourier coefficient; their height is the
    value an undamped line of that coefficient takes on the record.
    """

    frequencies: np.ndarray
    magnitudes: np.ndarray
    peaks: tuple[Peak, ...]
    omega: float
    rabi: float | None
    resolution: float

    def significant(self, rel: float, exclude: Sequence[str] = ()) -> list[Peak]:
        """Peaks above ``rel`` times the largest peak not in ``exclude``."""
        kept = [pk for pk in self.peaks if pk.kind not in exclude]
        if not kept:
            return []
        top = max(pk.height for pk in kept)
        return [pk for pk in kept if pk.height >= rel * top]

    def unclassified(self, rel: float = 0.01) -> list[Peak]:
        return [pk for pk in self.significant(rel) if pk.kind not in PEAK_CLASSES]


def classify_frequency(nu: float, omega: float, rabi: float | None, tol: float, n_max: int = 64) -> str:
    """Assign a line at ``nu`` to relaxation, dressed, harmonic or sideband."""
    nu = abs(nu)
    if nu <= tol:
        return "relaxation"
    if rabi is not None and abs(nu - rabi) <= tol:
        return "dressed"
    n = round(nu / omega)
    if n >= 1 and abs(nu - n * omega) <= tol:
        return "harmonic"
    if rabi is not None:
        for k in range(1, n_max + 1):
            if abs(nu - k * omega - rabi) <= tol or abs(nu - abs(k * omega - rabi)) <= tol:
                return "sideband"
    return "unclassified"


def fit_asymptote(t: np.ndarray, y: np.ndarray, omega: float, n_harm: int, fraction: float = 0.25) -> np.ndarray:
    """Least-squares trigonometric polynomial in n*omega on the last ``fraction`` of the record.

    Returns complex coefficients c_n (n = 0..n_harm) of y ~ c_0 + 2 Re sum c_n e^{i n omega t}.
    """
    k0 = int(len(t) * (1 - fraction))
    tt, yy = t[k0:], y[k0:]
    cols = [np.ones_like(tt)]
    for n in range(1, n_harm + 1):
        cols += [np.cos(n * omega * tt), np.sin(n * omega * tt)]
    design = np.stack(cols, axis=1)
    coef, *_ = np.linalg.lstsq(design, yy, rcond=None)
    c = np.zeros(n_harm + 1, dtype=complex)
    c[0] = coef[0]
    c[1:] = 0.5 * (coef[1::2] - 1j * coef[2::2])
    return c


def _eval_asymptote(c: np.ndarray, t: np.ndarray, omega: float) -> np.ndarray:
    n = np.arange(1, len(c))
    return np.real(c[0]) + 2 * np.real(np.exp(1j * omega * np.outer(t, n)) @ c[1:])


def _leakage_bound(d_bins: np.ndarray, window: str) -> np.ndarray:
    """Upper envelope of the window kernel's sidelobes, relative to its peak, at d bins."""
    x = np.maximum(np.abs(d_bins), 1e-12)
    if window == "hann":
        env = np.where(x > 2.0, 1.0 / (math.pi * x * np.abs(x**2 - 1)), 1.0)
    else:
        env = np.where(x > 1.0, 1.0 / (math.pi * x), 1.0)
    return env


def fourier_spectrum(
    traj: Trajectory,
    window: str = "hann",
    subtract_asymptote: bool = True,
    omega: float | None = None,
    rabi: float | None = None,
    pad_factor: int = 8,
    threshold: float = 0.01,
    n_harm: int | None = None,
    min_periods: int = 20,
) -> SpectrumEstimate:
    """Discrete estimate of F(nu) = int dt P(t) e^{i nu t} for nu >= 0.

    With ``subtract_asymptote`` the last quarter of the record is fitted by a
    trigonometric polynomial in the drive frequency; that fit is removed from
    the whole series and its lines are reported as zero-width peaks.  The
    remainder is windowed, zero-padded, transformed, and its local maxima above
    ``threshold`` of the largest line are located by quadratic interpolation.
    Magnitudes are scaled by dt / mean(window), so a line a*cos(nu0 t) shows a
    peak of height a*duration/2.
    """
    if window not in ("none", "hann"):
        raise ParameterError(f"window must be 'none' or 'hann', got {window!r}")
    omega = float(traj.meta.get("omega")) if omega is None else float(omega)
    if rabi is None and traj.meta.get("rabi") is not None:
        rabi = float(traj.meta["rabi"])
    t, y = traj.times, traj.values
    dt, duration = traj.dt, traj.duration
    if len(t) < 16:
        raise ParameterError("trajectory too short for a spectrum")
    if duration < min_periods * 2 * math.pi / omega:
        raise ParameterError(f"trajectory covers {duration * omega / (2 * math.pi):.1f} drive periods, need {min_periods}")
    resolution = 2 * math.pi / duration
    if rabi is not None and rabi > 0 and resolution > rabi / 10:
        raise SpectrumResolutionError(f"frequency spacing {resolution:.3g} exceeds Omega/10 = {rabi / 10:.3g}")
    nyquist = math.pi / dt
    tol = omega / 50

    delta_lines: list[Peak] = []
    series = y.astype(float)
    if subtract_asymptote:
        if n_harm is None:
            n_harm = max(0, min(int(0.5 * nyquist / omega), 16))
        c = fit_asymptote(t, y, omega, n_harm)
        series = y - _eval_asymptote(c, t, omega)
        for n, cn in enumerate(c):
            height = abs(cn) * duration
            kind = classify_frequency(n * omega, omega, rabi, tol)
            delta_lines.append(Peak(n * omega, float(height), 0.0, kind, complex(cn)))

    w = np.hanning(len(series)) if window == "hann" else np.ones(len(series))
    nfft = int(2 ** math.ceil(math.log2(len(series) * max(1, pad_factor))))
    spec = np.abs(np.fft.rfft(series * w, nfft)) * dt / np.mean(w)
    freqs = 2 * math.pi * np.fft.rfftfreq(nfft, dt)
    bin_per_step = nfft / len(series)

    top = max([float(np.max(spec))] + [pk.height for pk in delta_lines])
    floor = threshold * top
    # include nu = 0 as a candidate by mirroring the spectrum
    mirrored = np.concatenate([spec[1:][::-1], spec])
    idx, _ = find_peaks(mirrored, height=floor)
    idx = idx[idx >= len(spec) - 1] - (len(spec) - 1)
    widths = peak_widths(spec, idx[idx > 0], rel_height=0.5)[0] if np.any(idx > 0) else np.array([])
    wmap = dict(zip(idx[idx > 0].tolist(), widths.tolist()))

    cands = []
    for i in idx:
        if 0 < i < len(spec) - 1:
            a, b, cc = spec[i - 1], spec[i], spec[i + 1]
            den = a - 2 * b + cc
            off = 0.5 * (a - cc) / den if den != 0 else 0.0
            nu = freqs[i] + off * (freqs[1] - freqs[0])
            h = b - 0.25 * (a - cc) * off
        else:
            nu, h = freqs[i], spec[i]
        width = wmap.get(int(i), 0.0) * (freqs[1] - freqs[0])
        cands.append((float(nu), float(h), float(width)))

    # drop peaks that sit under the sidelobe envelope of a stronger line
    cands.sort(key=lambda c: -c[1])
    kept: list[tuple[float, float, float]] = []
    for nu, h, width in cands:
        leak = False
        for nu2, h2, _ in kept:
            d_bins = (nu - nu2) / (freqs[1] - freqs[0]) / bin_per_step
            if h < 2.0 * h2 * _leakage_bound(np.array(d_bins), window):
                leak = True
                break
        if not leak:
            kept.append((nu, h, width))
    peaks = [Peak(nu, h, width, classify_frequency(nu, omega, rabi, tol)) for nu, h, width in kept]
    peaks += [pk for pk in delta_lines if pk.height >= floor]
    peaks.sort(key=lambda pk: pk.nu)
    return SpectrumEstimate(freqs, spec, tuple(peaks), omega, rabi, resolution)


# ---------------------------------------------------------------------------
# validity maps


@dataclass(frozen=True)
class DeviationMap:
    """Relative frequency deviation over (omega, A) at fixed bias.

    ``values`` holds raw deviations (NaN where singular); ``clipped()`` applies
    the reporting clip.  ``reference`` names the denominator: 'vv2' gives
    |Omega^RWA - Omega^(2)| / Omega^(2), 'numeric' gives
    |Omega^(2) - Omega^num| / Omega^num.
    """

    omegas: np.ndarray
    amps: np.ndarray
    epsilon: float
    reference: str
    values: np.ndarray
    singular: np.ndarray
    photon_numbers: np.ndarray
    clip: float = CLIP_LEVEL

    def clipped(self) -> np.ndarray:
        return np.minimum(self.values, self.clip)

    def at(self, omega: float, amp: float) -> float:
        i = int(np.argmin(np.abs(self.omegas - omega)))
        j = int(np.argmin(np.abs(self.amps - amp)))
        return float(self.values[i, j])


def photon_number(epsilon: float, omega: float) -> int:
    """Resonance order m = round(epsilon / omega) used by the maps."""
    return int(math.floor(epsilon / omega + 0.5))


def _numeric_gap(p: SystemParams, m: int) -> float:
    tr = TruncationConfig.default_for(p)
    tr = TruncationConfig(max(tr.n_tr, abs(m) + 6), tr.tol_conv)
    d = central_doublet(diagonalize_floquet(build_floquet_matrix(p, tr)), p, m)
    return d.omega_numeric


def deviation_cell(epsilon: float, omega: float, amp: float, reference: str = "vv2", l_max: int = 40) -> tuple[float, bool, int]:
    """(deviation, singular, m) at one grid point."""
    p = SystemParams(1.0, epsilon, amp, omega)
    m = photon_number(epsilon, omega)
    try:
        ctx = ResonanceContext(m, p, l_max=l_max)
    except SingularDenominatorError:
        return math.nan, True, m
    om2 = vv2_frequency(ctx)
    if reference == "vv2":
        num, ref = rwa_frequency(ctx), om2
    elif reference == "numeric":
        try:
            ref = _numeric_gap(p, m)
        except (AmbiguousDoubletError, NumericalError):
            return math.nan, True, m
        num = om2
    else:
        raise ParameterError(f"reference must be 'vv2' or 'numeric', got {reference!r}")
    if not ref >= SINGULAR_LEVEL * p.delta:
        return math.nan, True, m
    return abs(num - ref) / ref, False, m


def deviation_map(
    omegas: Sequence[float],
    amps: Sequence[float],
    epsilon: float,
    reference: str = "vv2",
    clip: float = CLIP_LEVEL,
    workers: int | None = None,
    l_max: int = 40,
) -> DeviationMap:
    """Relative deviation of the main oscillation frequency on an (omega, A) grid.

    Each cell uses the nearest resonance order m = round(epsilon/omega).
    Cells whose reference frequency is below 1e-9 (or whose denominators hit a
    pole) are flagged singular and left as NaN.
    """
    omegas = np.asarray(omegas, dtype=float)
    amps = np.asarray(amps, dtype=float)
    if reference not in ("vv2", "numeric"):
        raise ParameterError(f"reference must be 'vv2' or 'numeric', got {reference!r}")
    if np.any(omegas <= 0) or np.any(amps < 0):
        raise ParameterError("omega must be positive and A non-negative on the grid")
    cells = [(i, j) for i in range(len(omegas)) for j in range(len(amps))]

    def work(ij):
        i, j = ij
        return deviation_cell(epsilon, omegas[i], amps[j], reference, l_max)

    n = worker_count() if workers is None else workers
    if n > 1:
        with ThreadPoolExecutor(n) as ex:
            results = list(ex.map(work, cells))
    else:
        results = [work(c) for c in cells]
    values = np.full((len(omegas), len(amps)), np.nan)
    singular = np.zeros(values.shape, dtype=bool)
    ms = np.zeros(values.shape, dtype=int)
    for (i, j), (v, s, m) in zip(cells, results):
        values[i, j], singular[i, j], ms[i, j] = v, s, m
    return DeviationMap(omegas, amps, float(epsilon), reference, values, singular, ms, clip)


# ---------------------------------------------------------------------------
# scenarios


@dataclass(frozen=True)
class ScenarioConfig:
    """Inputs of the CDT / DITO runs; bias and amplitude are derived when omitted.

    cdt: epsilon = m*omega and A = omega * (zero_index-th zero of J_m).
    dito: A is required, epsilon comes from the shifted resonance condition.
    """

    m: int = 3
    omega: float = 2.0
    kappa: float = 0.0
    beta: float = 10.0
    amp: float | None = None
    epsilon: float | None = None
    zero_index: int = 1
    t_max: float | None = None
    points_per_period: int = 256
    detuned_omega: float | None = None
    tiers: tuple[str, ...] = ("rwa", "vv2", "numeric")
    l_max: int = 40

    def __post_init__(self):
        if self.m == 0:
            raise ParameterError("scenario needs a multiphoton resonance, m != 0")
        if self.omega <= 0 or self.kappa < 0 or self.beta <= 0:
            raise ParameterError("need omega > 0, kappa >= 0, beta > 0")
        for tier in self.tiers:
            if tier not in ("rwa", "vv1", "vv2", "vv2_averaged", "numeric"):
                raise ParameterError(f"unknown tier {tier!r}")


@dataclass
class ScenarioReport:
    kind: str
    params: SystemParams
    config: ScenarioConfig
    trajectories: dict[str, Trajectory]
    detuned: dict[str, Trajectory]
    spectra: dict[str, SpectrumEstimate]
    numbers: dict[str, float]


def scenario_params(kind: str, cfg: ScenarioConfig) -> SystemParams:
    if kind == "cdt":
        eps = cfg.m * cfg.omega if cfg.epsilon is None else cfg.epsilon
        amp = cfg.omega * bessel_zero(cfg.m, cfg.zero_index) if cfg.amp is None else cfg.amp
        return SystemParams(1.0, eps, amp, cfg.omega)
    if kind == "dito":
        if cfg.amp is None:
            raise ParameterError("dito needs the drive amplitude")
        base = SystemParams(1.0, 0.0, cfg.amp, cfg.omega)
        eps = resonance_bias(cfg.m, base, l_max=cfg.l_max) if cfg.epsilon is None else cfg.epsilon
        return base.replace(epsilon=eps)
    raise ParameterError(f"scenario kind must be 'cdt' or 'dito', got {kind!r}")


def _run_tiers(p: SystemParams, m: int, tiers: Sequence[str], t: np.ndarray, bath: BathParams | None, l_max: int, workers: int) -> dict[str, Trajectory]:
    def one(tier):
        return tier, survival_trajectory(p, m, tier, t, bath, l_max=l_max)

    if workers > 1 and len(tiers) > 1:
        with ThreadPoolExecutor(min(workers, len(tiers))) as ex:
            return dict(ex.map(one, tiers))
    return dict(one(tier) for tier in tiers)


def run_scenario(kind: str, cfg: ScenarioConfig, workers: int | None = None) -> ScenarioReport:
    """Survival trajectories per tier at a CDT point or a DITO resonance.

    Also runs a detuned comparison at ``detuned_omega`` (dito defaults to
    omega - 0.1) with the same bias and amplitude, and collects spectra of
    every trajectory long enough for one.
    """
    p = scenario_params(kind, cfg)
    ctx = ResonanceContext(cfg.m, p, l_max=cfg.l_max)
    om2 = vv2_frequency(ctx)
    om_rwa = rwa_frequency(ctx)
    numbers = {
        "epsilon": p.epsilon,
        "amp": p.amp,
        "omega": p.omega,
        "m": float(cfg.m),
        "omega_vv2": om2,
        "omega_rwa": om_rwa,
        "omega_numeric": solve_doublet(p, cfg.m).omega_numeric,
    }
    bath = BathParams(cfg.kappa, cfg.beta) if cfg.kappa > 0 else None
    t_max = cfg.t_max
    if t_max is None:
        t_max = 50.0 if kind == "cdt" else 200.0
    t = time_grid(p, t_max, cfg.points_per_period)
    n = worker_count() if workers is None else workers
    trajs = _run_tiers(p, cfg.m, cfg.tiers, t, bath, cfg.l_max, n)

    detuned: dict[str, Trajectory] = {}
    d_om = cfg.detuned_omega if cfg.detuned_omega is not None else (cfg.omega - 0.1 if kind == "dito" else None)
    if d_om is not None:
        pd = p.replace(omega=d_om)
        td = time_grid(pd, t_max, cfg.points_per_period)
        tiers = [tier for tier in cfg.tiers if tier != "numeric"]
        detuned = _run_tiers(pd, cfg.m, tiers, td, bath, cfg.l_max, n)
        numbers["detuned_omega"] = d_om
        for tier, tr in detuned.items():
            numbers[f"detuned_min_{tier}"] = float(np.min(tr.values))

    spectra: dict[str, SpectrumEstimate] = {}
    for tier, tr in trajs.items():
        numbers[f"min_{tier}"] = float(np.min(tr.values))
        rabi = tr.meta.get("rabi")
        try:
            spectra[tier] = fourier_spectrum(tr, "hann", subtract_asymptote=bath is not None, rabi=rabi if rabi and rabi > SINGULAR_LEVEL else None)
        except (SpectrumResolutionError, ParameterError):
            pass
    if om2 > SINGULAR_LEVEL:
        numbers["t_half_period_vv2"] = math.pi / om2
    return ScenarioReport(kind, p, cfg, trajs, detuned, spectra, numbers)


def coarse_grain(traj: Trajectory, period: float) -> tuple[np.ndarray, np.ndarray]:
    """Averages over consecutive whole drive periods: (period centers, means)."""
    per = int(round(period / traj.dt))
    if per < 1:
        raise ParameterError("drive period shorter than the grid step")
    k = len(traj.values) // per
    if k == 0:
        return np.empty(0), np.empty(0)
    means = traj.values[: k * per].reshape(k, per).mean(axis=1)
    centers = traj.times[0] + (np.arange(k) + 0.5) * per * traj.dt
    return centers, means
