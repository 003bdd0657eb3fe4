import numpy as np
import pytest

from ncent.commutative_states import Pair1D, variance_1d_pair
from ncent.nc_bipartite import NCPair, nc_blocks, normalization
from ncent.nc_kinematics import WavePacket, single_particle_nc_variance
from ncent.oracle_integrals import (BLOCK_NAMES, ConvergenceError, OperatorSpec, QuadratureConfig, _gate,
                                    _hermgauss_long, direct_moment, oracle_blocks, oracle_nc_variance,
                                    pair_1d_moments, twisted_expectation, twisted_expectation_fourier,
                                    verification_report, verify_block)


def test_long_double_rule_matches_numpy():
    t, w = _hermgauss_long(40)
    t0, w0 = np.polynomial.hermite.hermgauss(40)
    assert np.allclose(t.astype(float), t0, atol=1e-13)
    assert np.allclose(w.astype(float), w0, rtol=1e-11)
    assert float(np.sum(w)) == pytest.approx(np.sqrt(np.pi), rel=1e-15)


def test_operator_spec_parsing():
    assert OperatorSpec.parse("x1*p2").orderings() == [(0.5, (0, 3)), (0.5, (3, 0))]
    assert OperatorSpec.parse("p1*p1").orderings() == [(1.0, (2, 2))]
    assert OperatorSpec.parse("").factors == ()
    with pytest.raises(ValueError):
        OperatorSpec.parse("y1")


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(order=8)
    assert QuadratureConfig().doubled().order == 128


def test_gate_flags_unconverged_results():
    with pytest.raises(ConvergenceError):
        _gate(lambda c: 1.0 / c.order, QuadratureConfig())
    assert _gate(lambda c: 2.0, QuadratureConfig()) == 2.0


def test_single_packet_moments_match_closed_form():
    pk = WavePacket(1.3, a=(0.4, -0.2), p0=(0.6, 0.2), theta=0.8)
    ops = ("x1", "x2", "p1", "p2")
    mean = np.array([direct_moment(OperatorSpec.parse(o), pk).real for o in ops])
    assert mean == pytest.approx([0.4, -0.2, 0.3, 0.1], abs=1e-12)
    V = np.array([[direct_moment(OperatorSpec.parse(f"{a}*{b}"), pk).real for b in ops] for a in ops])
    V -= np.outer(mean, mean)
    assert V == pytest.approx(single_particle_nc_variance(pk).matrix, abs=1e-12)


def test_fourier_route_agrees_with_direct_route():
    p = NCPair.figure_point(1.4, 1.0)
    for a, b in (("x1*p2", "p1"), ("x1", "x2"), ("", "p2*p2")):
        A, B = OperatorSpec.parse(a), OperatorSpec.parse(b)
        direct = twisted_expectation(A, B, p)
        fourier = twisted_expectation_fourier(A, B, p)
        assert abs(direct - fourier) <= 1e-9 * max(1.0, abs(direct))


def test_oracle_normalization_and_blocks_at_one_point():
    p = NCPair.figure_point(1.4, 1.0)
    V, n2 = oracle_nc_variance(p)
    assert n2 == pytest.approx(normalization(p), rel=1e-12)
    ob, cb = oracle_blocks(p), nc_blocks(p)
    for name in BLOCK_NAMES:
        assert getattr(ob, name) == pytest.approx(getattr(cb, name), rel=1e-6, abs=1e-12)
    assert verify_block(p, "Abar", 0, 0) < 1e-9


def test_verification_report_rows():
    rows = verification_report([NCPair.figure_point(1.4, 1.0)])
    assert len(rows) == 24
    assert all(r["converged"] and r["rel_error"] < 1e-6 for r in rows)
    assert {"block", "i", "j", "params", "oracle", "closed_form", "rel_error", "converged"} == set(rows[0])


def test_oracle_off_figure_regime_runs():
    # general packets: oracle and closed form are compared, not presumed equal
    p = NCPair(1.2, 0.7, (0.5, 0.3), (0.4, -0.2))
    V, n2 = oracle_nc_variance(p)
    assert np.allclose(V.matrix, V.matrix.T)
    assert n2 == pytest.approx(normalization(p), rel=1e-10)


@pytest.mark.parametrize("eta,zeta", [(1.0, 2.0), (2.0, 1.5), (0.5, 3.0)])
def test_one_dimensional_pair_moments(eta, zeta):
    pair = Pair1D.from_reduced(eta, zeta)
    mom = pair_1d_moments(pair)
    assert mom["raw"] == pytest.approx(variance_1d_pair(pair).matrix, abs=1e-12)
    assert mom["centered"] == pytest.approx(variance_1d_pair(pair, centered=True).matrix, abs=1e-12)


@pytest.mark.parametrize("alpha,theta,p0", [(1.0, 1.0, 0.5), (2.0, 1.0, 1.0), (1.0, 2.0, 1.0)])
def test_moving_packets_cross_block_residual(alpha, theta, p0):
    # with a momentum split the reference cross-position block is off by a
    # p0 p0^T term; every other block agrees with the quadrature
    from ncent.nc_bipartite import _overlap
    p = NCPair(alpha, theta, (0.3, 0.0), (p0, 0.0))
    ob, cb = oracle_blocks(p), nc_blocks(p)
    den, e0 = _overlap(p)
    expected = -32 * theta ** 2 * alpha ** 2 * e0 * normalization(p) / den ** 3 * np.outer([p0, 0], [p0, 0])
    assert ob.Cbar - cb.Cbar == pytest.approx(expected, abs=1e-12)
    for name in ("Abar", "Bbar", "Dbar", "Ebar", "Gbar"):
        assert getattr(ob, name) == pytest.approx(getattr(cb, name), rel=1e-6, abs=1e-12)
