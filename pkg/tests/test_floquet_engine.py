import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from drivetls.errors import AmbiguousDoubletError, ParameterError, TruncationWarning
from drivetls.floquet_engine import (
    FloquetMatrix,
    FloquetPair,
    FloquetSpectrum,
    Spin,
    TruncationConfig,
    build_floquet_matrix,
    central_doublet,
    diagonalize_floquet,
    fold_quasienergy,
    numeric_position_coeffs,
    position_coefficient_table,
    solve_doublet,
    track_doublets,
)
from drivetls.special_functions import SystemParams

from oracles import bisection_eigenvalues


def spectrum(p, n_tr=None):
    tr = TruncationConfig.default_for(p) if n_tr is None else TruncationConfig(n_tr)
    return diagonalize_floquet(build_floquet_matrix(p, tr))


def test_truncation_config():
    p = SystemParams(1.0, 4.0, 3.0, 2.0)
    assert TruncationConfig.default_for(p).n_tr == math.ceil(3.0 + 2.0) + 10
    assert TruncationConfig.default_for(p).tol_conv == pytest.approx(1e-10)
    with pytest.raises(ParameterError):
        TruncationConfig(3)
    with pytest.raises(ParameterError):
        TruncationConfig(5, 0.0)


def test_matrix_is_exactly_symmetric():
    fm = build_floquet_matrix(SystemParams(1.0, 4.1, 7.3, 1.7), TruncationConfig(12))
    assert np.max(np.abs(fm.matrix - fm.matrix.T)) == 0.0


def test_undriven_limits():
    p = SystemParams(1e-300, 1.3, 2.0, 2.0)
    fm = build_floquet_matrix(p, TruncationConfig(5))
    off = fm.matrix - np.diag(np.diag(fm.matrix))
    assert np.max(np.abs(off)) < 1e-299
    n = fm.photons
    expected = np.sort(np.concatenate([-0.65 - n * 2.0, 0.65 - n * 2.0]))
    assert np.allclose(np.sort(np.diag(fm.matrix)), expected, atol=0, rtol=0)

    q = SystemParams(1.0, 0.0, 0.0, 3.0)
    s = spectrum(q, 4)
    folded = np.sort(fold_quasienergy(s.energies, q.omega))
    assert np.allclose(np.unique(np.round(folded, 12)), [-0.5, 0.5])

    r = SystemParams(1.0, 2.5, 0.0, 3.0)
    fm = build_floquet_matrix(r, TruncationConfig(4))
    blocks = fm.matrix.copy()
    for k in range(len(fm.photons)):
        blocks[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = 0
    assert np.max(np.abs(blocks)) == 0.0
    ev = np.linalg.eigvalsh(fm.matrix[0:2, 0:2])
    assert ev[1] - ev[0] == pytest.approx(math.hypot(2.5, 1.0), abs=1e-14)


def test_sideband_coupling_entry():
    p = SystemParams(1.0, 4.0, 3.0, 2.0)
    fm = build_floquet_matrix(p, TruncationConfig(6))
    for n in (-2, 0, 1):
        i = fm.index(Spin.UP, n)
        j = fm.index(Spin.DOWN, n + 2)
        # -Delta_{-2}/2 with J_2(1.5) from the power series
        assert fm.matrix[i, j] == pytest.approx(-0.23208767214421475 / 2, abs=1e-13)


def test_eigenvalues_against_bisection_oracle():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(20, 20))
    sym = 0.5 * (a + a.T)
    fm = FloquetMatrix(sym, np.arange(-5, 5), SystemParams(1.0, 0.0, 0.0, 1.0))
    assert np.allclose(diagonalize_floquet(fm).energies, bisection_eigenvalues(sym), atol=1e-9, rtol=0)

    ladder = build_floquet_matrix(SystemParams(1.0, 1.7, 2.3, 1.1), TruncationConfig(4))
    assert np.allclose(diagonalize_floquet(ladder).energies, bisection_eigenvalues(ladder.matrix), atol=1e-9)


@pytest.mark.parametrize("params", [(1.0, 4.0, 3.0, 2.0), (1.0, 6.0, 12.7603, 2.0), (0.5, -1.3, 5.0, 0.9)])
def test_orthonormal_and_ladder(params):
    p = SystemParams(*params)
    s = spectrum(p)
    assert s.gram_deviation() < 1e-10
    n_tr = (len(s.photons) - 1) // 2
    om = p.omega
    # interior states: photon weight concentrated away from the edges
    for i in range(len(s.energies)):
        st = s.state(i)
        w = np.abs(st.up) ** 2 + np.abs(st.down) ** 2
        centre = float(np.sum(w * st.photons))
        if abs(centre) > n_tr / 3:
            continue
        target = s.energies[i] - om
        j = int(np.argmin(np.abs(s.energies - target)))
        assert abs(s.energies[j] - target) < 1e-8 * om
        shifted = st.shift(1)
        other = s.state(j)
        assert abs(shifted.inner(other)) > 1 - 1e-8


def test_fold_examples():
    om = 2.0
    assert fold_quasienergy(0.3 * om, om) == pytest.approx(0.3 * om)
    assert fold_quasienergy(0.5 * om, om) == -0.5 * om
    assert fold_quasienergy(-2.7 * om, om) == pytest.approx(0.3 * om)
    with pytest.raises(ParameterError):
        fold_quasienergy(1.0, 0.0)


@given(st.floats(-1e3, 1e3), st.floats(0.1, 10.0))
def test_fold_properties(e, om):
    f = fold_quasienergy(e, om)
    assert -0.5 * om <= f < 0.5 * om
    k = (e - f) / om
    assert abs(k - round(k)) < 1e-9 * max(1.0, abs(k))
    assert fold_quasienergy(f, om) == f


def test_labels_two_ladders():
    p = SystemParams(1.0, 4.1, 3.0, 2.0)
    s = spectrum(p)
    labels = s.labels()
    branches = {b for b, _ in labels}
    assert branches == {"-", "+"}
    f = s.folded
    n_tr = (len(s.photons) - 1) // 2
    interior = []
    for i in range(len(f)):
        st = s.state(i)
        w = np.abs(st.up) ** 2 + np.abs(st.down) ** 2
        interior.append(abs(float(np.sum(w * st.photons))) < n_tr / 3)
    lower = [f[i] for i, (b, _) in enumerate(labels) if b == "-" and interior[i]]
    upper = [f[i] for i, (b, _) in enumerate(labels) if b == "+" and interior[i]]
    assert np.mean(upper) > np.mean(lower)
    assert np.ptp(lower) < 1e-6 and np.ptp(upper) < 1e-6


def test_fig7_gap():
    d = solve_doublet(SystemParams(1.0, 4.0, 4.1, 4.0), 1)
    assert d.omega_numeric == pytest.approx(0.45, abs=0.01)


def test_cdt_gap_small_but_finite():
    d = solve_doublet(SystemParams(1.0, 6.0, 12.7603, 2.0), 3)
    assert 0.0 < d.omega_numeric < 0.05


def test_gap_closes_without_tunneling():
    # at epsilon = m omega the gap is |Delta_m| + O(Delta^3): it closes linearly
    for delta in (1e-2, 1e-4, 1e-6):
        p = SystemParams(delta, 4.0, 3.0, 2.0)
        d = solve_doublet(p, 2, TruncationConfig(15, 1e-13))
        assert d.omega_numeric / delta == pytest.approx(0.23208767214421475, rel=1e-3)


@pytest.mark.parametrize("params,m", [((1.0, 4.1, 3.0, 2.0), 2), ((1.0, 4.0, 4.1, 4.0), 1), ((1.0, 6.0, 12.7603, 2.0), 3)])
def test_gap_stable_under_truncation(params, m):
    p = SystemParams(*params)
    base = TruncationConfig.default_for(p).n_tr
    g1 = central_doublet(spectrum(p, base), p, m).omega_numeric
    g2 = central_doublet(spectrum(p, base + 4), p, m).omega_numeric
    assert abs(g1 - g2) < 1e-8 * p.omega
    d = solve_doublet(p, m)
    big = central_doublet(spectrum(p, 2 * base), p, m)
    assert abs(d.e_minus - big.e_minus) < 1e-10 and abs(d.e_plus - big.e_plus) < 1e-10


def test_ambiguous_doublet_reported():
    p = SystemParams(1.0, 2.0, 0.0, 2.0)
    photons = np.arange(-3, 4)
    size = 2 * len(photons)
    vecs = np.eye(size)
    i_up, i_dn, i_x = 2 * 3, 2 * 4 + 1, 2 * 5
    r = 1 / math.sqrt(2)
    vecs[:, i_dn] = 0
    vecs[:, i_x] = 0
    vecs[i_dn, i_dn], vecs[i_x, i_dn] = r, r
    vecs[i_dn, i_x], vecs[i_x, i_x] = r, -r
    s = FloquetSpectrum(np.arange(size, dtype=float), vecs, photons, p.omega)
    with pytest.raises(AmbiguousDoubletError):
        central_doublet(s, p, 1)


def test_window_must_contain_resonant_pair():
    p = SystemParams(1.0, 20.0, 0.0, 2.0)
    with pytest.raises(ParameterError):
        central_doublet(spectrum(p, 5), p, 10)


def test_tracking_is_continuous_through_resonance():
    eps = np.linspace(3.6, 4.4, 41)
    ds = track_doublets([SystemParams(1.0, e, 3.0, 2.0) for e in eps], 2)
    gaps = np.array([d.omega_numeric for d in ds])
    assert np.all(gaps > 0)
    lower = np.array([d.e_minus for d in ds])
    assert np.max(np.abs(np.diff(lower))) < 0.05
    # minimum gap at the shifted resonance, near |Delta_2| = 0.232
    assert gaps.min() == pytest.approx(0.2321, rel=0.05)


def test_position_coefficients_symmetry_and_undriven_limit():
    p = SystemParams(1.0, 4.1, 3.0, 2.0)
    pair = FloquetPair.from_doublet(solve_doublet(p, 2), p)
    x = position_coefficient_table(pair.state_minus, pair.state_plus, 10)
    assert np.max(np.abs(x[:, :, ::-1] - np.conj(np.swapaxes(x, 0, 1)))) < 1e-12
    assert np.max(np.abs(x[1, 1] + x[0, 0])) < 1e-12

    q = SystemParams(1.0, 0.7, 0.0, 2.0)
    pq = FloquetPair.from_doublet(solve_doublet(q, 0), q)
    xq = position_coefficient_table(pq.state_minus, pq.state_plus, 4)
    for a in range(2):
        nonzero = np.flatnonzero(np.abs(xq[a, a]) > 1e-12)
        assert list(nonzero) == [4]


def test_photon_shift_warning():
    p = SystemParams(1.0, 4.1, 3.0, 2.0)
    d = solve_doublet(p, 2)
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        numeric_position_coeffs(d.state_minus, d.state_plus, 10_000)
    assert any(issubclass(w.category, TruncationWarning) for w in rec)


def test_spinors_orthonormal_for_numeric_pair():
    p = SystemParams(1.0, 4.1, 3.0, 2.0)
    pair = FloquetPair.from_doublet(solve_doublet(p, 2), p)
    t = np.linspace(0, 5, 37)
    um, dm, up, dp = pair.spinors(t)
    assert np.allclose(np.abs(um) ** 2 + np.abs(dm) ** 2, 1, atol=1e-10)
    assert np.allclose(np.abs(up) ** 2 + np.abs(dp) ** 2, 1, atol=1e-10)
    assert np.allclose(np.conj(um) * up + np.conj(dm) * dp, 0, atol=1e-10)
