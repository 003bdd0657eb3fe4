"""Single particle on the noncommutative plane [x1, x2] = i*theta."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .symplectic_core import Basis, BasisError, VarianceMatrix, partial_transpose, symplectic_spectrum

LEVI_CIVITA = np.array([[0.0, 1.0], [-1.0, 0.0]])


def _vec(v) -> np.ndarray:
    out = np.asarray(v, dtype=float).reshape(2)
    return out


@dataclass(frozen=True)
class WavePacket:
    """Gaussian momentum-space packet.

    alpha is the momentum spread, a the mean position and p0 twice the mean
    momentum.
    """

    alpha: float
    a: tuple = (0.0, 0.0)
    p0: tuple = (0.0, 0.0)
    theta: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.theta >= 0:
            raise ValueError("theta must be nonnegative")
        object.__setattr__(self, "a", tuple(_vec(self.a)))
        object.__setattr__(self, "p0", tuple(_vec(self.p0)))

    @property
    def b(self) -> np.ndarray:
        return _vec(self.a) + self.theta * LEVI_CIVITA @ _vec(self.p0) / 4.0


def m_matrix(theta: float) -> np.ndarray:
    """Map from (x̄1, x̄2, p1, p2) to commuting (x1, x2, p1, p2)."""
    m = np.eye(4)
    m[0, 3] = theta / 2.0
    m[1, 2] = -theta / 2.0
    return m


def m2_matrix(theta: float) -> np.ndarray:
    m = m_matrix(theta)
    return np.block([[m, np.zeros((4, 4))], [np.zeros((4, 4)), m]])


def single_particle_nc_variance(packet: WavePacket) -> VarianceMatrix:
    al, th = packet.alpha, packet.theta
    xx = th ** 2 * al / 8.0 + 1.0 / (2.0 * al)
    c = th * al / 4.0
    v = np.array([[xx, 0.0, 0.0, -c],
                  [0.0, xx, c, 0.0],
                  [0.0, c, al / 2.0, 0.0],
                  [-c, 0.0, 0.0, al / 2.0]])
    return VarianceMatrix(v, Basis.plane())


def nc_to_effective(Vbar: VarianceMatrix, theta: float) -> VarianceMatrix:
    """V = M Vbar M^T in the plane or pair-blocked ordering."""
    size = len(Vbar.basis)
    if size == 4 and Vbar.basis == Basis.plane(Vbar.basis.particles[0]):
        m = m_matrix(theta)
    elif size == 8 and Vbar.basis == Basis.pair_blocked():
        m = m2_matrix(theta)
    else:
        raise BasisError("nc_to_effective needs the plane (4x4) or pair-blocked (8x8) ordering")
    return VarianceMatrix(m @ Vbar.matrix @ m.T, Vbar.basis)


def uncertainties(packet: WavePacket) -> dict[str, float]:
    al, th = packet.alpha, packet.theta
    return {"xx": th ** 2 * al / 8.0 + 1.0 / (2.0 * al),
            "xp": float(np.sqrt(th ** 2 * al ** 2 / 16.0 + 0.25))}


def minimize_xx_uncertainty(theta: float) -> tuple[float, float]:
    """Numerical (argmin alpha, min xx) by golden-section search on log alpha.

    Raises if the argmin strays from the analytic 2/theta by more than 1e-6.
    """
    if not theta > 0:
        raise ValueError("no interior minimum for theta <= 0: the infimum 0 is approached as alpha grows")
    alpha0 = 2.0 / theta

    def f(log_al):
        return uncertainties(WavePacket(np.exp(log_al), theta=theta))["xx"]

    lo, hi = np.log(1e-6 / theta), np.log(1e6 / theta)
    res = minimize_scalar(f, bracket=(lo, np.log(1.0 / theta), hi), method="golden", tol=1e-10)
    found = float(np.exp(res.x))
    if abs(found - alpha0) > 1e-6 * alpha0:
        raise RuntimeError(f"numerical minimizer {found} disagrees with 2/theta = {alpha0}")
    return found, float(res.fun)


def single_particle_ppt(packet: WavePacket) -> float:
    """Smallest PT eigenvalue after splitting the plane into two modes (x1,p1), (x2,p2)."""
    eff = nc_to_effective(single_particle_nc_variance(packet), packet.theta)
    interleaved = Basis((("x", 1, 1), ("p", 1, 1), ("x", 1, 2), ("p", 1, 2)))
    modes = eff.in_basis(interleaved).relabel(Basis.two_mode())
    return float(symplectic_spectrum(partial_transpose(modes, 2)).min())
