"""Twisted two-particle Gaussian state on the noncommutative plane.

Pipeline: closed-form NC blocks -> 8x8 matrix -> effective commutative matrix
(M2 congruence) -> [partial transpose] -> per-axis invariants -> eigenvalues.
The reference fully expanded eigenvalue expressions are kept separately in
`expanded_closed_forms`; they do not agree with the pipeline (see README).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .commutative_states import ConsistencyError, assemble_blocks
from .nc_kinematics import LEVI_CIVITA as EPS, m2_matrix
from .symplectic_core import Basis, VarianceMatrix, partial_transpose, sector_eigs

VERDICT_DEAD_BAND = 1e-9
CONSISTENCY_TOL = 1e-9
PINNED_ALPHA_THETA = {3: 1.4, 4: 1.6, 5: 1.8}


@dataclass(frozen=True)
class NCPair:
    alpha: float
    theta: float
    a: tuple = (0.0, 0.0)
    p0: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.theta >= 0:
            raise ValueError("theta must be nonnegative")
        object.__setattr__(self, "a", tuple(float(x) for x in np.reshape(self.a, 2)))
        object.__setattr__(self, "p0", tuple(float(x) for x in np.reshape(self.p0, 2)))

    @classmethod
    def figure_point(cls, s: float, u: float, theta: float = 1.0) -> "NCPair":
        """Static pair on the x axis from s = alpha*theta and u = alpha*b1^2."""
        alpha = s / theta
        return cls(alpha, theta, (np.sqrt(u / alpha), 0.0))

    @property
    def b(self) -> np.ndarray:
        return np.array(self.a) + self.theta * EPS @ np.array(self.p0) / 4.0

    @property
    def b1(self) -> float:
        return float(self.b[0])

    @property
    def s(self) -> float:
        return self.alpha * self.theta

    @property
    def u(self) -> float:
        return self.alpha * self.b1 ** 2

    @property
    def in_figure_regime(self) -> bool:
        return self.p0 == (0.0, 0.0) and self.b[1] == 0.0


def _overlap(params: NCPair) -> tuple[float, float]:
    al, th = params.alpha, params.theta
    b, p0 = params.b, np.array(params.p0)
    den = al ** 2 * th ** 2 + 4.0
    e0 = np.exp(-(p0 @ p0) / (2 * al)) * np.exp(-8 * al * (b @ b) / den)
    return den, e0


def normalization(params: NCPair) -> float:
    """N^2 of the twisted symmetrized state."""
    den, e0 = _overlap(params)
    return float(1.0 / (2.0 * (1.0 + 4.0 / den * e0)))


@dataclass(frozen=True)
class NCBlocks:
    Abar: np.ndarray
    Bbar: np.ndarray
    Cbar: np.ndarray
    Dbar: np.ndarray
    Ebar: np.ndarray
    Gbar: np.ndarray

    def as_tuple(self):
        return self.Abar, self.Bbar, self.Cbar, self.Dbar, self.Ebar, self.Gbar

    def assemble(self) -> VarianceMatrix:
        m = assemble_blocks(*self.as_tuple())
        if np.max(np.abs(m - m.T)) > 1e-10:
            raise ConsistencyError("assembled NC matrix is not symmetric")
        return VarianceMatrix(m, Basis.pair_blocked())


@dataclass(frozen=True)
class EffectiveBlocks:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    E: np.ndarray
    G: np.ndarray

    def as_tuple(self):
        return self.A, self.B, self.C, self.D, self.E, self.G

    def assemble(self) -> VarianceMatrix:
        return VarianceMatrix(assemble_blocks(*self.as_tuple()), Basis.pair_blocked())


def nc_blocks(params: NCPair) -> NCBlocks:
    """Closed-form NC blocks for general a and p0."""
    al, th = params.alpha, params.theta
    p0 = np.array(params.p0)
    b = params.b
    den, e0 = _overlap(params)
    n2 = normalization(params)
    d, o = np.eye(2), np.outer
    eb, ep = EPS @ b, EPS @ p0
    mean_x = -th / 2 * ep + 8 * al ** 2 * th ** 2 * b * e0 / den ** 2
    mean_p = 16 * al ** 2 * th * eb * e0 / den ** 2
    A = n2 * (th ** 2 / 4 * (o(ep, ep) + 2 * al * d) - th / 2 * (o(b, ep) + o(ep, b)) + 2 * o(b, b) + d / al
              + 2 * e0 * (th ** 4 * al ** 4 * (-o(p0, p0) + 4 * al ** 2 * o(b, b) + 4 * al * d)
                          - 4 * th ** 3 * al ** 4 * (o(p0, eb) + o(eb, p0))
                          - 8 * th ** 2 * al ** 2 * (o(p0, p0) + 2 * al ** 2 * o(eb, eb) - 3 * al * d)
                          - 16 * al ** 2 * th * (o(p0, eb) + o(eb, p0))
                          - 16 * o(p0, p0) + 32 * al * d) / (al ** 2 * den ** 3)
              - n2 * o(mean_x, mean_x))
    B = n2 * (-th / 4 * o(ep, p0) - th / 2 * al * EPS + o(b, p0)
              + 8 * e0 * (th ** 3 * al ** 3 * (2 * al * o(b, eb) - EPS) + 2 * th ** 2 * al ** 2 * o(p0, b)
                          + 4 * th * al * (2 * al * o(eb, b) - EPS) + 8 * o(p0, b)) / den ** 3
              - n2 * o(mean_x, mean_p))
    C = n2 * (th / 2 * (o(ep, b) + o(b, ep)) - 2 * o(b, b)
              + 2 * e0 * (th ** 4 * al ** 4 * (o(p0, p0) + 4 * al ** 2 * o(b, b))
                          + 4 * th ** 3 * al ** 4 * (o(eb, p0) + o(p0, eb))
                          + 8 * th ** 2 * al ** 2 * (o(p0, p0) * (1 + 2 * al ** 2) + 2 * al ** 2 * o(eb, eb))
                          + 16 * th * al ** 2 * (o(eb, p0) + o(p0, eb)) + 16 * o(p0, p0)) / (al ** 2 * den ** 3)
              - n2 * o(mean_x, mean_x))
    D = n2 * (th / 4 * o(ep, p0) - o(b, p0)
              - 16 * e0 * (-th ** 3 * al ** 4 * o(b, eb) + th ** 2 * al ** 2 * o(p0, b)
                           + 4 * th * al ** 2 * o(eb, b) + 4 * o(p0, b)) / den ** 3
              - n2 * o(mean_x, mean_p))
    G = n2 * (-o(p0, p0) / 2 + 32 * e0 * (th ** 2 * al ** 4 * o(eb, eb) + 4 * al ** 2 * o(b, b)) / den ** 3
              - n2 * o(mean_p, mean_p))
    E = n2 * (o(p0, p0) / 2 + al * d
              + 16 * e0 * (th ** 2 * al ** 3 * (2 * al * o(eb, eb) + d) - 4 * al * (2 * al * o(b, b) - d)) / den ** 3
              - n2 * o(mean_p, mean_p))
    return NCBlocks(A, B, C, D, E, G)


def effective_blocks(blocks: NCBlocks, theta: float) -> EffectiveBlocks:
    """Blocks of M2 Vbar M2^T, written out per block and checked against the product."""
    Ab, Bb, Cb, Db, Eb, Gb = blocks.as_tuple()
    h = theta / 2.0
    A = Ab + h * (Bb @ EPS.T + EPS @ Bb.T) + h ** 2 * EPS @ Eb @ EPS.T
    B = Bb + h * EPS @ Eb
    C = Cb + h * (Db @ EPS.T + EPS @ Db.T) + h ** 2 * EPS @ Gb @ EPS.T
    D = Db + h * EPS @ Gb
    eff = EffectiveBlocks(A, B, C, D, Eb.copy(), Gb.copy())
    m2 = m2_matrix(theta)
    direct = m2 @ assemble_blocks(*blocks.as_tuple()) @ m2.T
    err = np.max(np.abs(assemble_blocks(*eff.as_tuple()) - direct))
    if err > 1e-10 * max(1.0, np.max(np.abs(direct))):
        raise ConsistencyError(f"effective block formulas disagree with the congruence by {err:.3g}")
    return eff


def effective_variance(params: NCPair) -> VarianceMatrix:
    return effective_blocks(nc_blocks(params), params.theta).assemble()


class AxisPair(NamedTuple):
    x: float
    y: float


def _block_products(eff: EffectiveBlocks, transposed: bool) -> dict[str, tuple[float, float]]:
    """Per axis the two candidates 2 sqrt((A +- C)(E +- G)); PT flips the G sign."""
    out = {}
    sg = -1.0 if transposed else 1.0
    for name, k in (("x", 0), ("y", 1)):
        A, C, E, G = eff.A[k, k], eff.C[k, k], eff.E[k, k], sg * eff.G[k, k]
        out[name] = (float(2 * np.sqrt((A + C) * (E + G))), float(2 * np.sqrt((A - C) * (E - G))))
    return out


def _branch_eigs(params: NCPair, transposed: bool) -> AxisPair:
    if not params.in_figure_regime:
        raise ValueError("axis-sector eigenvalues need p0 = 0 and b2 = 0 (uncoupled x and y sectors)")
    eff = effective_blocks(nc_blocks(params), params.theta)
    eigs = sector_eigs(eff.assemble(), transposed=transposed)
    products = _block_products(eff, transposed)
    sg = -1.0 if transposed else 1.0
    for ax, k in (("x", 0), ("y", 1)):
        lo = min(products[ax])
        A, C, E, G = eff.A[k, k], eff.C[k, k], eff.E[k, k], sg * eff.G[k, k]
        # A -+ C and E -+ G can cancel almost completely; widen by that loss
        cond = max((abs(A) + abs(C)) / max(min(abs(A - C), abs(A + C)), 1e-300),
                   (abs(E) + abs(G)) / max(min(abs(E - G), abs(E + G)), 1e-300))
        tol = max(CONSISTENCY_TOL, 64 * np.finfo(float).eps * cond)
        if abs(lo - eigs[ax][0]) > tol * max(1.0, lo):
            raise ConsistencyError(f"{ax}: block product {lo} vs invariant eigenvalue {eigs[ax][0]}")
    return AxisPair(eigs["x"][0], eigs["y"][0])


def physicality_branch_eigs(params: NCPair) -> AxisPair:
    """Smallest symplectic eigenvalue of each axis sector of the effective matrix."""
    return _branch_eigs(params, transposed=False)


def ppt_branch_eigs(params: NCPair) -> AxisPair:
    """Smallest symplectic eigenvalue of each axis sector after partial transpose."""
    return _branch_eigs(params, transposed=True)


def block_branch_table(params: NCPair) -> dict[str, dict[str, tuple[float, float]]]:
    """Both sector candidates ((A+C)(E+G)-type, (A-C)(E-G)-type) with and without PT."""
    eff = effective_blocks(nc_blocks(params), params.theta)
    return {"plain": _block_products(eff, False), "transposed": _block_products(eff, True)}


def expanded_closed_forms(params: NCPair, inline_norm: bool = False) -> dict[str, float]:
    """Reference expanded expressions for the figure regime.

    phys_x, phys_y: untransposed sector eigenvalues; ppt_x, ppt_y: square roots
    of the transposed expressions. inline_norm=True uses the normalization
    with alpha^2 theta^2 + 4 replaced by 5, the variant quoted alongside them.
    """
    al, th, b1 = params.alpha, params.theta, params.b1
    den = al ** 2 * th ** 2 + 4
    x = np.exp(-8 * al * b1 ** 2 / den)
    n2 = 1 / (2 * (1 + 0.8 * np.exp(-8 * al * b1 ** 2 / 5))) if inline_norm else normalization(params)
    s2 = th ** 2 * al ** 2
    phys_x = (2 * n2 * np.sqrt(1 + 3 * s2 / 4 + 4 * b1 ** 2 * al + 4 * (3 * s2 + 4) * x / den ** 2)
              * np.sqrt(1 + 16 * x / den ** 3 * (s2 - 16 * al * b1 ** 2 + 4)))
    phys_y = (2 * n2 * np.sqrt(1 + 3 * s2 / 4 + 4 * x / den ** 3
                               * (3 * s2 ** 2 + 16 * s2 + 16 - 32 * th ** 2 * al ** 3 * b1 ** 2))
              * np.sqrt(1 + 16 * x / den ** 2))
    ppt_x2 = (4 * n2 ** 2
              * (1 + 3 * s2 / 4 + 4 * (8 * th ** 4 * al ** 5 * b1 ** 2 + 3 * s2 ** 2 + 16 * s2 + 16) * x / den ** 3
                 - 256 * n2 * th ** 4 * al ** 5 * b1 ** 2 * x ** 2 / den ** 4)
              * (1 + 16 * (s2 - 16 * al * b1 ** 2 + 4) * x / den ** 3))
    ppt_y2 = 4 * n2 ** 2 * (1 + 3 * s2 / 4 + 4 * (3 * s2 + 4) * x / den ** 2) * (1 + 16 * x / den ** 2)
    return {"phys_x": float(phys_x), "phys_y": float(phys_y),
            "ppt_x": float(np.sqrt(ppt_x2)), "ppt_y": float(np.sqrt(ppt_y2))}


def xx_uncertainty_product(alpha: float, theta: float, b1: float) -> float:
    eff = effective_blocks(nc_blocks(NCPair(alpha, theta, (b1, 0.0))), theta)
    return float(eff.A[0, 0] * eff.A[1, 1])


@lru_cache(maxsize=4096)
def alpha_min_search(theta: float, b1: float) -> float:
    """argmin over alpha of A11*A22 of the effective matrix at fixed b1."""
    if not theta > 0:
        raise ValueError("theta must be positive")
    lo, hi = np.log(1e-3 / theta), np.log(1e3 / theta)

    def f(log_al):
        return np.log(xx_uncertainty_product(float(np.exp(log_al)), theta, b1))

    grid = np.linspace(lo, hi, 121)
    vals = np.array([f(g) for g in grid])
    k = int(np.argmin(vals))
    if k in (0, len(grid) - 1):
        raise RuntimeError("no interior minimum of the position uncertainty in the search window")
    res = minimize_scalar(f, bracket=(grid[k - 1], grid[k], grid[k + 1]), method="brent", tol=1e-10)
    return float(np.exp(res.x))


def alpha_min_at_fixed_u(theta: float, u: float, max_iter: int = 200) -> float:
    """Self-consistent alpha with alpha = alpha_min(theta, sqrt(u/alpha))."""
    al = 2.0 / theta
    for _ in range(max_iter):
        new = alpha_min_search(theta, float(np.sqrt(u / al)))
        if abs(new - al) <= 1e-7 * al:  # argmin of a flat minimum is good to ~1e-8
            return new
        al = new
    raise RuntimeError(f"alpha_min fixed point did not converge at u={u}")


def nu_min_theta(theta: float, b1: float, alpha: float | None = None) -> float:
    """Smallest physical eigenvalue at the position-uncertainty minimizer (1 at theta=0)."""
    if theta == 0:
        return 1.0
    if alpha is None:
        alpha = alpha_min_search(theta, b1)
    return float(min(physicality_branch_eigs(NCPair(alpha, theta, (b1, 0.0)))))


def _bound(params: NCPair, alpha_min: float | None) -> float:
    return nu_min_theta(params.theta, params.b1, alpha_min)


def entanglement_verdict(params: NCPair, alpha_min: float | None = None) -> tuple[bool, float]:
    """margin = nu_min(theta)^2 - nu_tilde^2; entangled when margin exceeds the dead band."""
    nu_t = min(ppt_branch_eigs(params))
    margin = _bound(params, alpha_min) ** 2 - nu_t ** 2
    return margin > VERDICT_DEAD_BAND, float(margin)


def log_negativity_nc(params: NCPair, alpha_min: float | None = None) -> float:
    nu_t = min(ppt_branch_eigs(params))
    shifted = nu_t ** 2 - _bound(params, alpha_min) ** 2 + 1.0
    if not shifted > 0:
        raise ValueError(f"shifted eigenvalue argument {shifted} is not positive")
    return float(max(0.0, -0.5 * np.log2(shifted)))


def nc_pair_report(params: NCPair, alpha_min: float | None = None) -> dict:
    nu_t = ppt_branch_eigs(params)
    bound = _bound(params, alpha_min)
    entangled, margin = entanglement_verdict(params, alpha_min)
    return {"family": "nc-pair",
            "params": {"alpha": params.alpha, "theta": params.theta, "a": list(params.a), "p0": list(params.p0)},
            "nu_tilde": {"x": nu_t.x, "y": nu_t.y}, "nu_min": bound, "margin": margin,
            "entangled": entangled, "log_negativity": log_negativity_nc(params, alpha_min)}


def partial_transpose_effective(params: NCPair) -> VarianceMatrix:
    return partial_transpose(effective_variance(params), 2)
