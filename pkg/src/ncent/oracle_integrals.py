"""Brute-force quadrature oracle for the twisted two-particle moments.

Everything here is computed from the momentum-space wave functions alone,
independently of the closed forms in `nc_bipartite`. Position operators act
as x̄_i = i d/dp_i - (theta/2) eps_ij p_j and are applied analytically, so
each integrand is a polynomial times a Gaussian, evaluated by tensor
Gauss-Hermite quadrature.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .commutative_states import Pair1D
from .nc_bipartite import NCBlocks, NCPair, nc_blocks
from .nc_kinematics import LEVI_CIVITA as EPS, WavePacket
from .symplectic_core import Basis, VarianceMatrix

FACTORS = ("x1", "x2", "p1", "p2")
GATE_TOL = 1e-8
BLOCK_NAMES = ("Abar", "Bbar", "Cbar", "Dbar", "Ebar", "Gbar")


class ConvergenceError(RuntimeError):
    def __init__(self, delta: float):
        super().__init__(f"quadrature not converged: doubling the order changed results by {delta:.3g}")
        self.delta = delta


@dataclass(frozen=True)
class QuadratureConfig:
    """Nodes per axis and the truncation radius (units of sqrt(alpha)) beyond the packet centres."""

    order: int = 64
    extent: float = 8.0
    extended: bool = True  # long-double arithmetic, so exact zeros come out ~1e-20

    def __post_init__(self):
        if self.order < 16:
            raise ValueError("quadrature order must be at least 16")
        if not self.extent > 0:
            raise ValueError("extent must be positive")

    def doubled(self) -> "QuadratureConfig":
        return QuadratureConfig(2 * self.order, self.extent, self.extended)

    @property
    def dtype(self):
        return np.longdouble if self.extended else np.float64


LONG_PI = np.longdouble("3.14159265358979323846264338327950288")


@lru_cache(maxsize=16)
def _hermgauss_long(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Hermite rule refined in long double (Newton on orthonormal recurrence)."""
    t0, _ = np.polynomial.hermite.hermgauss(n)
    x = t0.astype(np.longdouble)
    for _ in range(3):
        p_prev, p = np.zeros_like(x), np.full_like(x, LONG_PI ** np.longdouble(-0.25))
        total = p * p
        for k in range(n):
            p_prev, p = p, (np.sqrt(np.longdouble(2) / (k + 1)) * x * p
                            - np.sqrt(np.longdouble(k) / (k + 1)) * p_prev)
            if k < n - 1:
                total += p * p
        # p is now p_n, p_prev is p_{n-1}; p_n' = sqrt(2n) p_{n-1}
        x = x - p / (np.sqrt(np.longdouble(2 * n)) * p_prev)
    weights = 1 / total
    x.setflags(write=False)
    weights.setflags(write=False)
    return x, weights


@dataclass(frozen=True)
class OperatorSpec:
    """Product of at most two single-particle factors from x1, x2, p1, p2.

    factors=(f, g) means f*g (g acts first); with symmetrize the operator is
    (f*g + g*f)/2.
    """

    factors: tuple = ()
    symmetrize: bool = True

    def __post_init__(self):
        if len(self.factors) > 2 or any(f not in FACTORS for f in self.factors):
            raise ValueError(f"unsupported operator {self.factors}")

    @classmethod
    def parse(cls, text: str, symmetrize: bool = True) -> "OperatorSpec":
        text = text.strip()
        if text in ("", "I", "1"):
            return cls((), symmetrize)
        return cls(tuple(t.strip() for t in text.split("*")), symmetrize)

    def orderings(self) -> list[tuple[float, tuple]]:
        idx = tuple(FACTORS.index(f) for f in self.factors)
        if len(idx) == 2 and self.symmetrize and idx[0] != idx[1]:
            return [(0.5, idx), (0.5, idx[::-1])]
        return [(1.0, idx)]


def _nodes(cfg: QuadratureConfig, scale: float, centres) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Hermite nodes x = scale*t with weights that undo the e^{-t^2} factor."""
    if cfg.extended:
        t, w = _hermgauss_long(cfg.order)
        scale = np.longdouble(scale)
    else:
        t, w = np.polynomial.hermite.hermgauss(cfg.order)
    x = scale * t
    weights = scale * w * np.exp(t ** 2)
    reach = max(abs(c) for c in centres) + cfg.extent * scale
    weights = np.where(np.abs(x) <= reach, weights, 0.0)
    return x, weights


def _packet_table(alpha, centre, phase, theta, K1, K2) -> dict:
    """psi and ordered products op_a op_o psi on a grid.

    psi(p) = (pi alpha)^{-1/2} exp(-|p - centre|^2 / (2 alpha) - i p.phase).
    Keys: () -> psi, (o,) -> op_o psi, (a, o) -> op_a op_o psi.
    """
    c, b = np.asarray(centre, float), np.asarray(phase, float)
    P = (K1, K2)
    pi = LONG_PI if K1.dtype == np.longdouble else np.pi
    psi = (pi * alpha) ** -0.5 * np.exp(-((K1 - c[0]) ** 2 + (K2 - c[1]) ** 2) / (2 * alpha)
                                           - 1j * (K1 * b[0] + K2 * b[1]))
    g = [-(P[i] - c[i]) / alpha - 1j * b[i] for i in range(2)]  # d log psi / dp_i

    def mult(o):
        if o >= 2:
            return P[o - 2]
        return 1j * g[o] - theta / 2 * (EPS[o, 0] * P[0] + EPS[o, 1] * P[1])

    def dmult(o, i):
        if o >= 2:
            return 1.0 if o - 2 == i else 0.0
        return 1j * (-1.0 / alpha if o == i else 0.0) - theta / 2 * EPS[o, i]

    out = {(): psi}
    for o in range(4):
        out[(o,)] = mult(o) * psi
    for a in range(4):
        for o in range(4):
            m = mult(o)
            if a >= 2:
                mm = P[a - 2] * m
            else:
                shift = theta / 2 * (EPS[a, 0] * P[0] + EPS[a, 1] * P[1])
                mm = 1j * (dmult(o, a) + m * g[a]) - shift * m
            out[(a, o)] = mm * psi
    return out


class _PairGrid:
    def __init__(self, params: NCPair, cfg: QuadratureConfig):
        self.params = params
        p0, b = np.array(params.p0), params.b
        x, w = _nodes(cfg, np.sqrt(params.alpha), p0 / 2)
        self.x = x
        K1, K2 = np.meshgrid(x, x, indexing="ij")
        self.W = np.outer(w, w)
        self.psi1 = _packet_table(params.alpha, p0 / 2, b, params.theta, K1, K2)
        self.psi2 = _packet_table(params.alpha, -p0 / 2, -b, params.theta, K1, K2)
        th = params.theta
        self.P = np.exp(1j * th * np.outer(x, x))  # e^{i theta k1 l2}
        self.Q = np.exp(-1j * th * np.outer(x, x))  # e^{-i theta k2 l1}

    def inner(self, fa, fb):
        return np.sum(self.W * np.conj(fa) * fb)

    def twist(self, f, g) -> complex:
        """int d2k d2l e^{i theta (k1 l2 - k2 l1)} f(k) g(l)."""
        return np.einsum("ab,cd,ad,bc->", self.W * f, self.W * g, self.P, self.Q, optimize=True)

    def apply(self, table, spec: OperatorSpec):
        return sum(c * table[idx] for c, idx in spec.orderings())


def _gate(fn, cfg: QuadratureConfig):
    lo, hi = fn(cfg), fn(cfg.doubled())
    lo_a, hi_a = np.atleast_1d(lo), np.atleast_1d(hi)
    scale = max(np.max(np.abs(hi_a)), 1e-300)
    delta = float(np.max(np.abs(lo_a - hi_a)) / scale)
    if delta > GATE_TOL:
        raise ConvergenceError(delta)
    return hi


def twisted_expectation(A: OperatorSpec, B: OperatorSpec, params: NCPair,
                        cfg: QuadratureConfig = QuadratureConfig()) -> complex:
    """<(A x B) F^-2 tau0> on psi1 x psi2:
    int e^{i theta eps_ij k_i l_j} conj(A psi1)(k) psi2(k) conj(B psi2)(l) psi1(l)."""

    def run(c):
        grid = _PairGrid(params, c)
        f = np.conj(grid.apply(grid.psi1, A)) * grid.psi2[()]
        g = np.conj(grid.apply(grid.psi2, B)) * grid.psi1[()]
        return grid.twist(f, g)

    return complex(_gate(run, cfg))


def twisted_expectation_fourier(A: OperatorSpec, B: OperatorSpec, params: NCPair,
                                cfg: QuadratureConfig = QuadratureConfig(), spacing: float = 0.2) -> complex:
    """Same element by the reduced route: substitute q = theta eps l, take the
    Fourier transform of g on a uniform q grid (trapezoid rule), then integrate
    f against it: (2 pi / theta^2) int d2k f(k) gg(k)."""
    th = params.theta
    if not th > 0:
        raise ValueError("the Fourier route needs theta > 0")
    al = params.alpha
    p0, b = np.array(params.p0), params.b
    x, w = _nodes(cfg, np.sqrt(al), p0 / 2)
    K1, K2 = np.meshgrid(x, x, indexing="ij")
    t1 = _packet_table(al, p0 / 2, b, th, K1, K2)
    t2 = _packet_table(al, -p0 / 2, -b, th, K1, K2)
    f = np.conj(sum(c * t1[i] for c, i in A.orderings())) * t2[()]

    half = cfg.extent * np.sqrt(al) + np.max(np.abs(p0)) / 2
    h = spacing * np.sqrt(al)
    ls = np.arange(-half, half + h / 2, h)
    L1, L2 = np.meshgrid(ls, ls, indexing="ij")
    u1 = _packet_table(al, p0 / 2, b, th, L1, L2)
    u2 = _packet_table(al, -p0 / 2, -b, th, L1, L2)
    g = np.conj(sum(c * u2[i] for c, i in B.orderings())) * u1[()]
    # q = theta eps l  ->  q1 = theta l2, q2 = -theta l1, |dq| = theta^2 |dl|
    q1, q2 = th * L2, -th * L1
    dq = (th * h) ** 2
    # gg(k) = (1/2pi) sum_q e^{i k.q} g dq, separable in the two axes
    e1 = np.exp(1j * np.outer(x, ls * th))       # k1 * q1, q1 depends on l2
    e2 = np.exp(-1j * np.outer(x, ls * th))      # k2 * q2, q2 depends on l1
    gg = np.einsum("ad,bc,cd->ab", e1, e2, g) * dq / (2 * np.pi)
    del q1, q2
    return complex(2 * np.pi / th ** 2 * np.sum(np.outer(w, w) * f * gg))


def direct_moment(A: OperatorSpec, packet: WavePacket, cfg: QuadratureConfig = QuadratureConfig()) -> complex:
    """<psi|A|psi> for one packet with mean position a and mean momentum p0/2."""
    p0 = np.array(packet.p0)

    def run(c):
        x, w = _nodes(c, np.sqrt(packet.alpha), p0 / 2)
        K1, K2 = np.meshgrid(x, x, indexing="ij")
        tab = _packet_table(packet.alpha, p0 / 2, packet.b, packet.theta, K1, K2)
        val = sum(coef * tab[idx] for coef, idx in A.orderings())
        return complex(np.sum(np.outer(w, w) * np.conj(tab[()]) * val))

    return complex(_gate(run, cfg))


def _twist_matrices(theta: float):
    """Observable maps: rows give F^-1 xi F (twisted observables) and T^dag xi T in the 8 basic operators."""
    Fm, Tm = np.eye(8), np.eye(8)
    for i in range(2):
        for l in range(2):
            Fm[i, 6 + l] += theta / 2 * EPS[i, l]
            Fm[4 + i, 2 + l] -= theta / 2 * EPS[i, l]
            Tm[i, 6 + l] -= theta * EPS[i, l]
            Tm[4 + i, 2 + l] += theta * EPS[i, l]
    return Fm, Tm


def _oracle_pieces(params: NCPair, cfg: QuadratureConfig):
    grid = _PairGrid(params, cfg)
    t1, t2 = grid.psi1, grid.psi2

    def split(ops):
        return tuple(o for o in ops if o < 4), tuple(o - 4 for o in ops if o >= 4)

    def direct(u, v, ops):
        o1, o2 = split(ops)
        return grid.inner(u[()], u[o1]) * grid.inner(v[()], v[o2])

    def cross(ops):  # <psi1 psi2| T ops |psi2 psi1>
        o1, o2 = split(ops)
        return grid.twist(np.conj(t1[()]) * t2[o1], np.conj(t2[()]) * t1[o2])

    def moments(fn):
        m1 = np.array([fn((a,)) for a in range(8)])
        m2 = np.array([[fn((a, b)) for b in range(8)] for a in range(8)])
        return fn(()), m1, m2

    return (moments(lambda ops: direct(t1, t2, ops)),
            moments(lambda ops: direct(t2, t1, ops)),
            moments(cross))


def _oracle_matrix_once(params: NCPair, cfg: QuadratureConfig) -> np.ndarray:
    """Flattened [N^2, 8x8 Vbar] at one quadrature order."""
    (d0, d1, d2), (e0, e1, e2), (c0, c1, c2) = _oracle_pieces(params, cfg)
    Fm, Tm = _twist_matrices(params.theta)
    Lt = Fm @ Tm
    sym = lambda m: 0.5 * (m + m.T)  # noqa: E731
    norm = (d0 + e0 + 2 * c0).real
    mean = (Fm @ d1 + Lt @ e1 + 2 * (Lt @ c1).real).real / norm
    second = (Fm @ sym(d2) @ Fm.T + Lt @ sym(e2) @ Lt.T + 2 * (Lt @ sym(c2) @ Lt.T).real).real / norm
    V = second - np.outer(mean, mean)
    return np.concatenate([[1.0 / norm], V.ravel()])


@lru_cache(maxsize=256)
def _oracle_cached(params: NCPair, cfg: QuadratureConfig) -> np.ndarray:
    out = _gate(lambda c: _oracle_matrix_once(params, c), cfg)
    out.setflags(write=False)
    return out


def oracle_nc_variance(params: NCPair, cfg: QuadratureConfig = QuadratureConfig()) -> tuple[VarianceMatrix, float]:
    """Quadrature Vbar (pair-blocked ordering) and N^2."""
    out = _oracle_cached(params, cfg)
    V = out[1:].reshape(8, 8).astype(float)
    return VarianceMatrix(0.5 * (V + V.T), Basis.pair_blocked()), float(out[0])


def oracle_blocks(params: NCPair, cfg: QuadratureConfig = QuadratureConfig()) -> NCBlocks:
    V, _ = oracle_nc_variance(params, cfg)
    m = V.matrix
    return NCBlocks(m[0:2, 0:2], m[0:2, 2:4], m[0:2, 4:6], m[0:2, 6:8], m[2:4, 2:4], m[2:4, 6:8])


def verify_block(params: NCPair, block: str, i: int, j: int,
                 cfg: QuadratureConfig = QuadratureConfig()) -> float:
    """|oracle - closed form| / max(|closed form|, 1e-12) for one entry."""
    if block not in BLOCK_NAMES:
        raise ValueError(f"block must be one of {BLOCK_NAMES}")
    oracle = getattr(oracle_blocks(params, cfg), block)[i, j]
    closed = getattr(nc_blocks(params), block)[i, j]
    return float(abs(oracle - closed) / max(abs(closed), 1e-12))


def verification_report(points, cfg: QuadratureConfig = QuadratureConfig()) -> list[dict]:
    """Entry-by-entry comparison over parameter points, as JSON-ready dicts."""
    rows = []
    for params in points:
        try:
            ob = oracle_blocks(params, cfg)
            converged = True
        except ConvergenceError:
            ob, converged = None, False
        cb = nc_blocks(params)
        for name in BLOCK_NAMES:
            for i in range(2):
                for j in range(2):
                    closed = float(getattr(cb, name)[i, j])
                    oracle = float(getattr(ob, name)[i, j]) if converged else float("nan")
                    rows.append({"block": name, "i": i, "j": j,
                                 "params": {"alpha": params.alpha, "theta": params.theta,
                                            "a": list(params.a), "p0": list(params.p0)},
                                 "oracle": oracle, "closed_form": closed,
                                 "rel_error": abs(oracle - closed) / max(abs(closed), 1e-12),
                                 "converged": converged})
    return rows


def report_json(rows: list[dict]) -> str:
    return json.dumps(rows, indent=1)


def pair_1d_moments(params: Pair1D, cfg: QuadratureConfig = QuadratureConfig()) -> dict[str, np.ndarray]:
    """Quadrature variance matrices of the symmetrized 1D pair.

    Returns 'raw' (momentum second moments not mean-subtracted, the reference
    convention) and 'centered'. Position moments use x = i d/dp analytically.
    """

    def run(c):
        sc = np.sqrt(max(params.alpha, params.beta))
        x, w = _nodes(c, sc, (params.p0 / 2,))
        P1, P2 = np.meshgrid(x, x, indexing="ij")
        W = np.outer(w, w)

        def g(p, centre, width):
            return (np.pi * width) ** -0.25 * np.exp(-(p - centre) ** 2 / (2 * width))

        def dg(p, centre, width):
            return -(p - centre) / width * g(p, centre, width)

        a, bb, half = params.alpha, params.beta, params.p0 / 2
        f1, f2 = (lambda p: g(p, half, a)), (lambda p: g(p, -half, bb))
        d1, d2 = (lambda p: dg(p, half, a)), (lambda p: dg(p, -half, bb))
        psi = f1(P1) * f2(P2) + f2(P1) * f1(P2)
        D1 = d1(P1) * f2(P2) + d2(P1) * f1(P2)
        D2 = f1(P1) * d2(P2) + f2(P1) * d1(P2)
        norm = np.sum(W * psi ** 2)
        E = lambda arr: np.sum(W * arr) / norm  # noqa: E731
        mp = E(P1 * psi ** 2)
        return np.array([E(D1 ** 2), E(D1 * D2), E(P1 ** 2 * psi ** 2), E(P1 * P2 * psi ** 2), mp])

    v11, v13, v22, v24, mp = _gate(run, cfg)

    def mat(p22, p24):
        return np.array([[v11, 0, v13, 0], [0, p22, 0, p24], [v13, 0, v11, 0], [0, p24, 0, p22]])

    return {"raw": mat(v22, v24), "centered": mat(v22 - mp ** 2, v24 - mp ** 2), "mean_p": mp}


def config_dict(cfg: QuadratureConfig) -> dict:
    return asdict(cfg)
