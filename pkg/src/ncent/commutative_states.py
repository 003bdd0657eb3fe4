"""Commutative benchmark families: symmetrized 1D and 2D Gaussian pairs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .symplectic_core import (Basis, VarianceMatrix, partial_transpose, sector_eigs,
                              symplectic_spectrum)

CONSISTENCY_TOL = 1e-9


class ConsistencyError(RuntimeError):
    """Closed form and matrix pipeline disagree."""


@dataclass(frozen=True)
class Pair1D:
    """Two 1D packets of widths alpha and beta centred at +-p0/2 in momentum."""

    alpha: float
    beta: float = 1.0
    p0: float = 0.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("alpha and beta must be positive")

    @classmethod
    def from_reduced(cls, eta: float, zeta: float, beta: float = 1.0) -> "Pair1D":
        if not zeta >= 0:
            raise ValueError("zeta must be nonnegative")
        return cls(eta * beta, beta, float(np.sqrt(zeta * beta)))

    @property
    def eta(self) -> float:
        return self.alpha / self.beta

    @property
    def zeta(self) -> float:
        return self.p0 ** 2 / self.beta

    @property
    def overlap(self) -> float:
        s = self.alpha + self.beta
        return 2.0 * np.sqrt(self.alpha * self.beta) / s * np.exp(-self.p0 ** 2 / s)

    @property
    def norm2(self) -> float:
        return 1.0 / (2.0 * (1.0 + self.overlap))


def variance_1d_pair(params: Pair1D, centered: bool = False) -> VarianceMatrix:
    """Variance matrix in (x@1, p@1, x@2, p@2).

    The momentum entries follow the reference closed form, which keeps the
    squared mean momentum in v22 and v24; centered=True subtracts it (this
    only matters when alpha != beta and p0 != 0).
    """
    a, b, p0 = params.alpha, params.beta, params.p0
    s, r = a + b, np.sqrt(a * b)
    e = np.exp(-p0 ** 2 / s)
    n2 = params.norm2
    v11 = n2 * (s / (2 * a * b) + 4 * r * e / s ** 2 * (1 - p0 ** 2 / s))
    v13 = n2 * 4 * p0 ** 2 * a * b * e / (r * s ** 3)
    v22 = n2 * (s / 2 + p0 ** 2 / 2 + 4 * r * e / s * (a * b / s + p0 ** 2 * (b - a) ** 2 / (4 * s ** 2)))
    v24 = n2 * (-p0 ** 2 / 2 + p0 ** 2 * r * (b - a) ** 2 * e / s ** 3)
    if centered:
        mean = n2 * params.overlap * p0 * (b - a) / s
        v22 -= mean ** 2
        v24 -= mean ** 2
    v = np.array([[v11, 0, v13, 0], [0, v22, 0, v24], [v13, 0, v11, 0], [0, v24, 0, v22]], dtype=float)
    return VarianceMatrix(v, Basis.two_mode())


def nu_ppt_1d_closed(eta: float, zeta: float) -> float:
    """Reference closed form for the smallest PT eigenvalue in (eta, zeta)."""
    e = np.exp(-zeta / (1 + eta))
    pref = (1 + eta) / (1 + eta + 2 * np.sqrt(eta) * e)
    f1 = (1 + eta) / (2 * eta) + 4 * np.sqrt(eta) * (1 + eta - 2 * zeta) * e / (1 + eta) ** 3
    f2 = (1 + eta) / 2 + np.sqrt(eta) * (2 * zeta * (1 - eta) ** 2 + 4 * eta * (1 + eta)) * e / (1 + eta) ** 3
    return float(pref * np.sqrt(f1) * np.sqrt(f2))


def ppt_branches_1d(V: VarianceMatrix) -> tuple[float, float]:
    """The two PT candidates 2*sqrt((v11 -+ v13)(v22 +- v24))."""
    m = V.matrix
    v11, v13, v22, v24 = m[0, 0], m[0, 2], m[1, 1], m[1, 3]
    return (float(2 * np.sqrt((v11 - v13) * (v22 + v24))),
            float(2 * np.sqrt((v11 + v13) * (v22 - v24))))


def nu_ppt_1d(params: Pair1D) -> float:
    """Smallest PT eigenvalue: min over both branches, checked against the spectrum."""
    V = variance_1d_pair(params)
    value = min(ppt_branches_1d(V))
    pipe = float(symplectic_spectrum(partial_transpose(V, 2)).min())
    if abs(value - pipe) > CONSISTENCY_TOL * max(1.0, pipe):
        raise ConsistencyError(f"branch value {value} vs spectrum {pipe}")
    return value


@dataclass(frozen=True)
class Pair2D:
    """Two plane packets at +-a with a = (a1, 0)."""

    alpha: float
    a1: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    @property
    def u(self) -> float:
        return self.alpha * self.a1 ** 2

    @property
    def norm2(self) -> float:
        return 1.0 / (2.0 * (1.0 + np.exp(-2.0 * self.u)))


def pair_2d_blocks(params: Pair2D) -> dict[str, np.ndarray]:
    al = params.alpha
    a = np.array([params.a1, 0.0])
    n2, e = params.norm2, np.exp(-2.0 * params.u)
    aa, d = np.outer(a, a), np.eye(2)
    return {"A": n2 * (2 * aa + d / al + d / al * e),
            "B": np.zeros((2, 2)),
            "C": -2 * n2 * aa,
            "D": np.zeros((2, 2)),
            "E": n2 * (al * d + (al * d - 2 * aa * al ** 2) * e),
            "G": 2 * n2 * aa * al ** 2 * e}


def assemble_blocks(A, B, C, D, E, G) -> np.ndarray:
    return np.block([[A, B, C, D], [B.T, E, D.T, G], [C, D, A, B], [D.T, G, B.T, E]])


def variance_2d_pair(params: Pair2D) -> VarianceMatrix:
    bl = pair_2d_blocks(params)
    return VarianceMatrix(assemble_blocks(*(bl[k] for k in "ABCDEG")), Basis.pair_blocked())


def nu_x_ppt_2d_closed(u: float) -> float:
    e = np.exp(-2.0 * u)
    return float(np.sqrt((1 + e) * (1 + (1 - 4 * u) * e)) / (1 + e))


def nu_ppt_2d(params: Pair2D) -> tuple[float, float]:
    """(nu_x, nu_y) after partial transpose; nu_y is exactly 1."""
    nu_x, nu_y = nu_x_ppt_2d_closed(params.u), 1.0
    eigs = sector_eigs(variance_2d_pair(params), transposed=True)
    for closed, pipe in ((nu_x, eigs["x"][0]), (nu_y, eigs["y"][0])):
        if abs(closed - pipe) > CONSISTENCY_TOL:
            raise ConsistencyError(f"closed form {closed} vs pipeline {pipe}")
    return nu_x, nu_y


def log_negativity(nu_min: float) -> float:
    if not nu_min > 0:
        raise ValueError("symplectic eigenvalue must be positive")
    return float(max(0.0, -np.log2(nu_min)))
