import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from drivetls.bath_dissipation import BathParams, DensityTrajectory, analytic_density_evolution, numeric_fbr_solve
from drivetls.dynamics_analysis import (
    THREADS_ENV,
    ScenarioConfig,
    Trajectory,
    classify_frequency,
    coarse_grain,
    coherent_trajectory,
    deviation_cell,
    deviation_map,
    fourier_spectrum,
    photon_number,
    run_scenario,
    scenario_params,
    survival_from_density,
    survival_trajectory,
    time_grid,
    worker_count,
)
from drivetls.errors import ParameterError, PositivityWarning, SpectrumResolutionError, TierMismatchError
from drivetls.floquet_engine import FloquetPair, solve_doublet
from drivetls.special_functions import SystemParams, bessel_zero
from drivetls.vanvleck import ResonanceContext, floquet_pair

from oracles import schrodinger_survival

FIG7 = SystemParams(1.0, 4.0, 4.1, 4.0)
FIG13 = SystemParams(1.0, 4.1, 3.0, 2.0)


def test_trajectory_validation():
    t = np.linspace(0, 1, 11)
    Trajectory(t, np.full(11, 0.5))
    Trajectory(t, np.full(11, 1 + 5e-10))
    with pytest.raises(ParameterError):
        Trajectory(t, np.full(11, 1.1))
    with pytest.raises(ParameterError):
        Trajectory(t[::-1], np.full(11, 0.5))
    with pytest.raises(ParameterError):
        Trajectory(np.r_[t[:-1], 1.5], np.full(11, 0.5))
    with pytest.raises(ParameterError):
        Trajectory(t, np.full(10, 0.5))
    tr = Trajectory(t, np.full(11, 0.25), {"tier": "vv2"})
    assert tr.dt == pytest.approx(0.1) and tr.duration == pytest.approx(1.1)
    assert tr.tier == "vv2"
    assert np.allclose(tr.transition(), 0.75)


@given(st.floats(0.5, 6.0), st.floats(1.0, 300.0), st.integers(4, 512))
def test_time_grid(om, t_max, ppp):
    p = SystemParams(1.0, 0.0, 0.0, om)
    t = time_grid(p, t_max, ppp)
    assert t[0] == 0.0 and t[-1] <= t_max * (1 + 1e-12)
    assert t_max - t[-1] < p.period / ppp * (1 + 1e-9)
    assert np.allclose(np.diff(t), p.period / ppp)


def test_time_grid_errors():
    p = SystemParams(1.0, 0.0, 0.0, 1.0)
    with pytest.raises(ParameterError):
        time_grid(p, 0.0)
    with pytest.raises(ParameterError):
        time_grid(p, 1.0, 3)


def test_tier_mismatch():
    ctx = ResonanceContext(2, FIG13)
    t = np.linspace(0, 10, 11)
    b = BathParams(0.01, 10.0)
    vv2 = floquet_pair(ctx, "vv2")
    rwa = floquet_pair(ctx, "rwa")
    dens, num = numeric_fbr_solve(FIG13, b, t, 2)
    with pytest.raises(TierMismatchError):
        survival_from_density(dens, vv2)
    ana = analytic_density_evolution(ctx, b, t, tier="rwa")
    with pytest.raises(TierMismatchError):
        survival_from_density(ana, vv2)
    with pytest.raises(TierMismatchError):
        survival_from_density(coherent_trajectory(vv2, t), rwa)
    assert survival_from_density(ana, rwa).meta["tier"] == "rwa"
    assert survival_from_density(dens, num).meta["source"] == "numeric_fbr"


def test_out_of_range_survival_is_flagged_and_clipped():
    pair = floquet_pair(ResonanceContext(2, FIG13), "vv2")
    t = np.linspace(0, 1, 5)
    dens = DensityTrajectory(t, np.full(5, 1.5), np.zeros(5, complex), "analytic_mrwa", "vv2")
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        out = survival_from_density(dens, pair)
    assert any(issubclass(w.category, PositivityWarning) for w in rec)
    assert np.all(out.values <= 1.0) and np.all(out.values >= 0.0)


@pytest.mark.parametrize("params,m", [((1.0, 4.1, 3.0, 2.0), 2), ((1.0, 4.0, 4.1, 4.0), 1), ((1.0, 5.901193593914434, 3.0, 2.0), 3)])
def test_numeric_survival_matches_schrodinger(params, m):
    p = SystemParams(*params)
    t = time_grid(p, 80.0, 64)
    for bath in (None, BathParams(0.0, 10.0)):
        tr = survival_trajectory(p, m, "numeric", t, bath)
        assert np.max(np.abs(tr.values - schrodinger_survival(*params, t))) < 1e-5


def test_up_target_round_trip():
    t = time_grid(FIG13, 30.0, 64)
    tr = survival_trajectory(FIG13, 2, "numeric", t, target="up")
    ref = schrodinger_survival(1.0, 4.1, 3.0, 2.0, t, start="up")
    assert np.max(np.abs(tr.values - ref)) < 1e-5
    vv2 = survival_trajectory(FIG13, 2, "vv2", t, target="up")
    assert vv2.values[0] == pytest.approx(1.0, abs=1e-12)


def test_trajectory_metadata():
    t = time_grid(FIG13, 10.0, 32)
    tr = survival_trajectory(FIG13, 2, "vv2", t, BathParams(0.01, 10.0))
    for key in ("delta", "epsilon", "amp", "omega", "tier", "m", "rabi", "kappa", "beta"):
        assert key in tr.meta
    assert tr.meta["rabi"] == pytest.approx(0.3296469925150758, rel=1e-12)
    with pytest.raises(ParameterError):
        survival_trajectory(FIG13, 2, "vv1", t, BathParams(0.01, 10.0))


def test_classification():
    om, rabi, tol = 2.0, 0.33, 0.04
    assert classify_frequency(0.01, om, rabi, tol) == "relaxation"
    assert classify_frequency(0.34, om, rabi, tol) == "dressed"
    assert classify_frequency(4.02, om, rabi, tol) == "harmonic"
    assert classify_frequency(2.33, om, rabi, tol) == "sideband"
    assert classify_frequency(1.67, om, rabi, tol) == "sideband"
    assert classify_frequency(1.0, om, rabi, tol) == "unclassified"
    assert classify_frequency(1.0, om, None, tol) == "unclassified"


def test_cosine_line_height():
    om = 2.0
    dt = math.pi / om / 64
    t = dt * np.arange(64 * 2 * 60)
    nu0 = 0.7
    y = 0.5 + 0.3 * np.cos(nu0 * t)
    tr = Trajectory(t, y, {"omega": om})
    spec = fourier_spectrum(tr, window="hann", subtract_asymptote=False, rabi=nu0)
    line = min(spec.peaks, key=lambda pk: abs(pk.nu - nu0))
    assert line.nu == pytest.approx(nu0, abs=spec.resolution / 20)
    assert line.height == pytest.approx(0.3 * tr.duration / 2, rel=0.01)
    assert line.kind == "dressed"
    dc = min(spec.peaks, key=lambda pk: pk.nu)
    assert dc.nu == 0.0 and dc.kind == "relaxation"


def test_spectrum_guards():
    om = 2.0
    t = np.linspace(0, 10, 200, endpoint=False)
    with pytest.raises(ParameterError):
        fourier_spectrum(Trajectory(t, np.full(200, 0.5), {"omega": om}))
    t = (math.pi / 32) * np.arange(32 * 25)
    tr = Trajectory(t, np.full(len(t), 0.5), {"omega": om})
    with pytest.raises(SpectrumResolutionError):
        fourier_spectrum(tr, rabi=0.01)
    with pytest.raises(ParameterError):
        fourier_spectrum(tr, window="blackman")


def test_asymptote_lines_reported_as_delta_peaks():
    om = 2.0
    t = (math.pi / 64) * np.arange(64 * 100)
    y = 0.5 + 0.3 * np.exp(-0.02 * t) * np.cos(0.4 * t) + 0.1 * np.cos(om * t)
    spec = fourier_spectrum(Trajectory(t, y, {"omega": om}), rabi=0.4)
    deltas = [pk for pk in spec.peaks if pk.is_delta]
    harm = [pk for pk in deltas if pk.kind == "harmonic"]
    assert len(harm) == 1 and abs(harm[0].coefficient) == pytest.approx(0.05, rel=1e-3)
    dc = [pk for pk in deltas if pk.nu == 0.0][0]
    assert dc.coefficient.real == pytest.approx(0.5, abs=1e-3)
    damped = [pk for pk in spec.peaks if not pk.is_delta and pk.kind == "dressed"]
    assert len(damped) == 1 and damped[0].width > 0


def test_rwa_spectrum_single_line_and_vv2_sidebands():
    t = time_grid(FIG7, 300.0, 64)
    rwa = fourier_spectrum(survival_trajectory(FIG7, 1, "rwa", t), subtract_asymptote=False)
    vv2 = fourier_spectrum(survival_trajectory(FIG7, 1, "vv2", t), subtract_asymptote=False)
    assert len(rwa.significant(0.05, exclude=("relaxation",))) == 1
    kinds = {pk.kind for pk in vv2.significant(0.01, exclude=("relaxation",))}
    assert "dressed" in kinds and kinds <= {"dressed", "harmonic", "sideband"}
    assert not vv2.unclassified(0.01)


def test_photon_number():
    assert photon_number(4.0, 2.0) == 2
    assert photon_number(4.0, 1.6) == 3
    assert photon_number(4.0, 8.0) == 1
    assert photon_number(4.0, 9.0) == 0


def test_deviation_map_properties():
    omegas = np.linspace(0.5, 6.0, 12)
    amps = np.linspace(0.0, 12.0, 13)
    dm = deviation_map(omegas, amps, 4.0, "vv2", workers=1)
    ok = ~dm.singular
    assert np.all(dm.values[ok] >= 0)
    assert np.all(np.isnan(dm.values[dm.singular]))
    assert np.all(dm.clipped()[ok] <= dm.clip)
    # halving the grid reproduces the shared cells
    coarse = deviation_map(omegas[::2], amps[::2], 4.0, "vv2", workers=1)
    a, b = coarse.values, dm.values[::2, ::2]
    both = ~np.isnan(a) & ~np.isnan(b)
    assert np.max(np.abs(a[both] - b[both])) < 1e-3
    threaded = deviation_map(omegas, amps, 4.0, "vv2", workers=3)
    assert np.array_equal(np.nan_to_num(threaded.values, nan=-1), np.nan_to_num(dm.values, nan=-1))
    assert dm.at(2.0, 0.0) == dm.values[np.argmin(abs(omegas - 2.0)), 0]


def test_deviation_cell_singular_cases():
    value, singular, m = deviation_cell(4.0, 2.0, 2 * bessel_zero(2, 1), "vv2")
    assert singular and math.isnan(value) and m == 2
    value, singular, m = deviation_cell(4.0, 2.0, 3.0, "vv2")
    assert not singular and value > 0 and m == 2
    with pytest.raises(ParameterError):
        deviation_map([1.0], [1.0], 4.0, "rwa")
    with pytest.raises(ParameterError):
        deviation_map([-1.0], [1.0], 4.0)


def test_worker_count(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert worker_count() == 3
    for bad in ("0", "two"):
        monkeypatch.setenv(THREADS_ENV, bad)
        with pytest.raises(ParameterError):
            worker_count()
    monkeypatch.delenv(THREADS_ENV)
    assert worker_count() >= 1


def test_scenario_config_and_params():
    with pytest.raises(ParameterError):
        ScenarioConfig(m=0)
    with pytest.raises(ParameterError):
        ScenarioConfig(tiers=("exact",))
    with pytest.raises(ParameterError):
        scenario_params("dito", ScenarioConfig())
    with pytest.raises(ParameterError):
        scenario_params("cdt-ish", ScenarioConfig())
    p = scenario_params("cdt", ScenarioConfig())
    assert p.epsilon == 6.0 and p.amp == pytest.approx(12.7603, abs=1e-4)
    q = scenario_params("dito", ScenarioConfig(amp=3.0))
    assert q.epsilon == pytest.approx(5.9011, abs=5e-4)


def test_small_cdt_scenario():
    rep = run_scenario("cdt", ScenarioConfig(tiers=("rwa", "vv2"), t_max=30.0, points_per_period=64), workers=1)
    assert set(rep.trajectories) == {"rwa", "vv2"}
    assert rep.numbers["omega_vv2"] < 1e-6
    assert 0 < rep.numbers["omega_numeric"] < 0.05
    assert rep.numbers["min_vv2"] > 0.85
    assert not rep.detuned


def test_coarse_grain():
    t = 0.1 * np.arange(100)
    tr = Trajectory(t, (np.arange(100) % 10) / 10.0)
    centers, means = coarse_grain(tr, 1.0)
    assert len(means) == 10 and np.allclose(means, 0.45)
    assert centers[0] == pytest.approx(0.5)
    with pytest.raises(ParameterError):
        coarse_grain(tr, 0.01)
