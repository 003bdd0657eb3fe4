import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import williamson_sample
from ncent.symplectic_core import (Basis, BasisError, Coord, SpectrumError, SymplecticError, VarianceMatrix,
                                   as_variance, block_invariants, build_omega, is_physical_commutative,
                                   is_physical_psd, is_symplectic, partial_transpose, random_symplectic,
                                   sector_eigs, sector_eigs_invariant, standard_form, symplectic_congruence, symplectic_spectrum,
                                   uncertainty_min_eig, williamson)

nu_lists = st.lists(st.floats(0.3, 6.0), min_size=1, max_size=4)


def test_coord_labels_roundtrip():
    c = Coord("p", 2, 1)
    assert c.label == "p1@2"
    assert Coord.parse("p1@2") == c
    assert Coord.parse("x@1") == Coord("x", 1, 1)
    with pytest.raises(BasisError):
        Coord.parse("q1@1")


def test_basis_rejects_unpaired_and_repeated():
    with pytest.raises(BasisError):
        Basis((("x", 1, 1), ("x", 1, 2)))
    with pytest.raises(BasisError):
        Basis((("x", 1, 1), ("p", 1, 1), ("x", 1, 1), ("p", 1, 1)))


def test_basis_permutation_between_orderings():
    blocked, inter = Basis.pair_blocked(), Basis.pair_interleaved()
    perm = blocked.permutation_to(inter)
    assert [blocked.labels[i] for i in perm] == inter.labels


def test_omega_is_antisymmetric_and_basis_aware():
    for basis in (Basis.two_mode(), Basis.plane(), Basis.pair_blocked()):
        om = build_omega(basis)
        assert np.array_equal(om, -om.T)
        i, j = basis.index("x", 1, 1), basis.index("p", 1, 1)
        assert om[i, j] == 1.0


def test_variance_matrix_must_be_symmetric():
    with pytest.raises(ValueError):
        VarianceMatrix(np.array([[1.0, 0.1], [0.0, 1.0]]), Basis.single_mode())


def test_vacuum_spectrum():
    V = as_variance(np.eye(2) / 2)
    assert symplectic_spectrum(V) == pytest.approx([1.0], abs=1e-14)
    assert is_physical_commutative(V) == (True, pytest.approx(0.0, abs=1e-14))


def test_thermal_below_vacuum_is_unphysical():
    ok, margin = is_physical_commutative(as_variance(np.eye(2) * 0.4))
    assert not ok
    assert margin == pytest.approx(-0.2)


@settings(max_examples=60, deadline=None)
@given(nus=nu_lists, seed=st.integers(0, 2 ** 32 - 1))
def test_spectrum_recovers_williamson_input(nus, seed):
    V = williamson_sample(nus, np.random.default_rng(seed))
    assert symplectic_spectrum(V) == pytest.approx(sorted(nus), rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(nus=nu_lists, seed=st.integers(0, 2 ** 32 - 1))
def test_spectrum_invariant_under_congruence(nus, seed):
    rng = np.random.default_rng(seed)
    V = williamson_sample(nus, rng)
    S = random_symplectic(len(nus), rng)
    assert symplectic_spectrum(symplectic_congruence(V, S)) == pytest.approx(symplectic_spectrum(V), rel=1e-9)


def test_congruence_rejects_non_symplectic():
    V = as_variance(np.eye(4))
    with pytest.raises(SymplecticError):
        symplectic_congruence(V, np.diag([2.0, 1.0, 1.0, 1.0]))


@pytest.mark.parametrize("n", [1, 2, 4])
def test_williamson_diagonalizes(n, rng):
    nus = rng.uniform(1.0, 4.0, n)
    V = williamson_sample(nus, rng)
    S, spec = williamson(V)
    assert is_symplectic(S, build_omega(V.basis))
    D = S @ V.matrix @ S.T
    assert np.max(np.abs(D - np.diag(np.diag(D)))) < 1e-10
    assert sorted(np.diag(D) * 2) == pytest.approx(sorted(np.repeat(nus, 2)), rel=1e-9)
    assert spec == pytest.approx(sorted(nus), rel=1e-9)


def test_williamson_in_blocked_basis(rng):
    V = williamson_sample([1.3, 2.0, 1.1, 3.0], rng).relabel(Basis.pair_interleaved())
    W = V.in_basis(Basis.pair_blocked())
    S, spec = williamson(W)
    assert is_symplectic(S, build_omega(W.basis))
    assert spec == pytest.approx([1.1, 1.3, 2.0, 3.0], rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(nus=st.lists(st.floats(0.2, 4.0), min_size=2, max_size=2), seed=st.integers(0, 2 ** 32 - 1))
def test_psd_test_agrees_with_spectrum(nus, seed):
    V = williamson_sample(nus, np.random.default_rng(seed))
    ok, margin = is_physical_commutative(V)
    if abs(margin) > 1e-7:
        assert ok == is_physical_psd(V)


def test_uncertainty_min_eig_of_vacuum_is_zero():
    assert uncertainty_min_eig(as_variance(np.eye(4) / 2)) == pytest.approx(0.0, abs=1e-15)


def test_partial_transpose_flips_only_target_momenta(rng):
    V = williamson_sample([1.2, 1.7], rng)
    T = partial_transpose(V, 2).matrix
    flip = np.diag([1, 1, 1, -1])
    assert np.array_equal(T, flip @ V.matrix @ flip)
    assert np.array_equal(partial_transpose(partial_transpose(V, 2), 2).matrix, V.matrix)


def test_partial_transpose_unknown_particle():
    with pytest.raises(BasisError):
        partial_transpose(as_variance(np.eye(4) / 2), 3)


def test_two_mode_squeezed_state_log_negativity():
    r = 0.5
    c, s = np.cosh(2 * r) / 2, np.sinh(2 * r) / 2
    V = as_variance([[c, 0, s, 0], [0, c, 0, -s], [s, 0, c, 0], [0, -s, 0, c]])
    assert symplectic_spectrum(V) == pytest.approx([1, 1])
    assert symplectic_spectrum(partial_transpose(V, 2)).min() == pytest.approx(np.exp(-2 * r))


def _pair_sample(rng):
    """Two particles on the plane with x and y sectors uncoupled."""
    Vx = williamson_sample(rng.uniform(1, 3, 2), rng)
    Vy = williamson_sample(rng.uniform(1, 3, 2), rng)
    m = np.zeros((8, 8))
    inter = Basis.pair_interleaved()
    for axis, sub in ((1, Vx), (2, Vy)):
        idx = [inter.index(k, i, axis) for i in (1, 2) for k in "xp"]
        m[np.ix_(idx, idx)] = sub.matrix
    return VarianceMatrix(m, inter).in_basis(Basis.pair_blocked())


def test_sector_eigs_match_full_spectrum(rng):
    for _ in range(20):
        V = _pair_sample(rng)
        eig = sector_eigs(V)
        full = symplectic_spectrum(V)
        assert sorted([*eig["x"], *eig["y"]]) == pytest.approx(full, rel=1e-9)
        eig_t = sector_eigs(V, transposed=True)
        full_t = symplectic_spectrum(partial_transpose(V, 2))
        assert sorted([*eig_t["x"], *eig_t["y"]]) == pytest.approx(full_t, rel=1e-9)


def test_block_invariants_keys(rng):
    inv = block_invariants(_pair_sample(rng))
    assert {"det_alpha_a", "det_gamma_b", "det_delta_a", "Delta_x", "Delta_y"} <= set(inv)


def test_standard_form_preserves_spectra(rng):
    for _ in range(10):
        V = _pair_sample(rng)
        sf = standard_form(V)
        W = sf.assemble()
        assert symplectic_spectrum(W) == pytest.approx(symplectic_spectrum(V), rel=1e-8)
        assert symplectic_spectrum(partial_transpose(W, 2)) == pytest.approx(
            symplectic_spectrum(partial_transpose(V, 2)), rel=1e-8)


def test_standard_form_needs_eight_by_eight():
    with pytest.raises(BasisError):
        standard_form(as_variance(np.eye(4)))


def test_odd_dimension_rejected():
    with pytest.raises((BasisError, SpectrumError, ValueError)):
        symplectic_spectrum(as_variance(np.eye(3)))


def test_invariant_formula_matches_eigen_route(rng):
    for _ in range(20):
        V = _pair_sample(rng)
        for t in (False, True):
            a, b = sector_eigs(V, t), sector_eigs_invariant(V, t)
            for ax in "xy":
                if a[ax][1] - a[ax][0] > 1e-3:
                    assert b[ax] == pytest.approx(a[ax], rel=1e-9)


def test_zero_cross_blocks_give_additive_delta():
    V = _pair_sample(np.random.default_rng(3)).matrix.copy()
    blocked = Basis.pair_blocked()
    V[:4, 4:] = 0
    V[4:, :4] = 0
    inv = block_invariants(VarianceMatrix(V, blocked))
    assert inv["det_gamma_a"] == 0 and inv["det_gamma_b"] == 0
    assert inv["Delta_x"] == pytest.approx(inv["det_alpha_a"] + inv["det_beta_a"])
