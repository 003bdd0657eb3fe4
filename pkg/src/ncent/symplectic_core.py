"""Basis-aware symplectic linear algebra for Gaussian variance matrices.

Conventions: hbar = 1, the spectrum is read off the real matrix 2*Omega*V, so
a minimum-uncertainty mode has symplectic eigenvalue 1 and physicality means
nu_j >= 1 (equivalently V + (i/2)*Omega is positive semidefinite).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy import linalg

SYM_TOL = 1e-12
PAIR_TOL = 1e-9
PHYS_TOL = 1e-9
SYMPLECTIC_TOL = 1e-10


class BasisError(ValueError):
    """Malformed or mismatched phase-space basis."""


class SpectrumError(ValueError):
    """Eigenvalue moduli of 2*Omega*V do not pair up."""


class SymplecticError(ValueError):
    """A transformation that should be symplectic is not."""


class StandardFormError(RuntimeError):
    """The two-step local reduction did not reach the ten-parameter shape."""


class Coord(NamedTuple):
    kind: str  # "x" or "p"
    particle: int
    axis: int

    @property
    def label(self) -> str:
        return f"{self.kind}{self.axis}@{self.particle}"

    @classmethod
    def parse(cls, label: str) -> "Coord":
        try:
            head, _, particle = label.strip().partition("@")
            kind, axis = head[0], int(head[1:] or 1)
            particle = particle or 1
            if kind not in ("x", "p"):
                raise ValueError
            return cls(kind, int(particle), axis)
        except (ValueError, IndexError) as exc:
            raise BasisError(f"bad coordinate label {label!r}") from exc


@dataclass(frozen=True)
class Basis:
    """Ordered list of phase-space coordinates fixing a matrix convention."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(Coord(*e) for e in self.entries)
        object.__setattr__(self, "entries", entries)
        if len(entries) == 0 or len(entries) % 2:
            raise BasisError("basis length must be even and nonzero")
        if len(set(entries)) != len(entries):
            raise BasisError("repeated coordinate in basis")
        for e in entries:
            if e.kind not in ("x", "p") or e.particle < 1 or e.axis < 1:
                raise BasisError(f"invalid coordinate {e}")
            partner = Coord("p" if e.kind == "x" else "x", e.particle, e.axis)
            if partner not in entries:
                raise BasisError(f"unpaired coordinate {e.label}")

    def __len__(self):
        return len(self.entries)

    @property
    def labels(self) -> list[str]:
        return [e.label for e in self.entries]

    @property
    def particles(self) -> list[int]:
        return sorted({e.particle for e in self.entries})

    @classmethod
    def from_labels(cls, labels: Iterable[str]) -> "Basis":
        return cls(tuple(Coord.parse(s) for s in labels))

    def index(self, kind: str, particle: int, axis: int) -> int:
        try:
            return self.entries.index(Coord(kind, particle, axis))
        except ValueError as exc:
            raise BasisError(f"{kind}{axis}@{particle} not in basis") from exc

    def permutation_to(self, other: "Basis") -> np.ndarray:
        """Index array `perm` with M_other = M[perm][:, perm]."""
        if set(self.entries) != set(other.entries):
            raise BasisError("bases contain different coordinates")
        return np.array([self.entries.index(e) for e in other.entries])

    # the orderings used throughout the package
    @classmethod
    def single_mode(cls) -> "Basis":
        return cls((("x", 1, 1), ("p", 1, 1)))

    @classmethod
    def two_mode(cls) -> "Basis":
        """(x@1, p@1, x@2, p@2): two one-dimensional particles."""
        return cls((("x", 1, 1), ("p", 1, 1), ("x", 2, 1), ("p", 2, 1)))

    @classmethod
    def plane(cls, particle: int = 1) -> "Basis":
        """(x1, x2, p1, p2) for one particle on the plane."""
        return cls(tuple((k, particle, a) for k in "xp" for a in (1, 2)))

    @classmethod
    def pair_blocked(cls) -> "Basis":
        """Plane ordering for particle 1 followed by particle 2."""
        return cls(cls.plane(1).entries + cls.plane(2).entries)

    @classmethod
    def pair_interleaved(cls) -> "Basis":
        """(x1,p1,x2,p2) per particle, particle 1 first."""
        return cls(tuple((k, i, a) for i in (1, 2) for a in (1, 2) for k in "xp"))


@dataclass(frozen=True)
class VarianceMatrix:
    matrix: np.ndarray
    basis: Basis

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("variance matrix must be square")
        if m.shape[0] != len(self.basis):
            raise BasisError(f"matrix size {m.shape[0]} does not match basis length {len(self.basis)}")
        if not np.all(np.isfinite(m)):
            raise ValueError("variance matrix has non-finite entries")
        if np.max(np.abs(m - m.T)) > SYM_TOL * max(1.0, np.max(np.abs(m))):
            raise ValueError("variance matrix is not symmetric")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def in_basis(self, basis: Basis) -> "VarianceMatrix":
        perm = self.basis.permutation_to(basis)
        return VarianceMatrix(self.matrix[np.ix_(perm, perm)], basis)

    def relabel(self, basis: Basis) -> "VarianceMatrix":
        """Same numbers, new coordinate names."""
        return VarianceMatrix(self.matrix, basis)


def build_omega(basis: Basis) -> np.ndarray:
    omega = np.zeros((len(basis), len(basis)))
    for i, e in enumerate(basis.entries):
        if e.kind == "x":
            j = basis.index("p", e.particle, e.axis)
            omega[i, j] = 1.0
            omega[j, i] = -1.0
    return omega


def _pair_moduli(moduli: np.ndarray) -> np.ndarray:
    m = np.sort(moduli)
    a, b = m[0::2], m[1::2]
    scale = np.maximum(np.maximum(a, b), np.finfo(float).tiny)
    gap = np.abs(a - b) / scale
    if np.any(gap > PAIR_TOL):
        raise SpectrumError(f"eigenvalue moduli fail to pair (max relative gap {gap.max():.3g})")
    return 0.5 * (a + b)


def _balance(V: VarianceMatrix) -> np.ndarray:
    """Local squeeze x -> s x, p -> p / s per mode so each pair has equal
    diagonal entries. It is symplectic, so the spectrum is unchanged, and it
    keeps eig() accurate when widths differ by many orders of magnitude."""
    m = V.matrix
    d = np.ones(len(V.basis))
    for i, e in enumerate(V.basis.entries):
        if e.kind == "x":
            j = V.basis.index("p", e.particle, e.axis)
            if m[i, i] > 0 and m[j, j] > 0:
                s = (m[j, j] / m[i, i]) ** 0.25
                d[i], d[j] = s, 1.0 / s
    return m * np.outer(d, d)


def symplectic_spectrum(V: VarianceMatrix) -> np.ndarray:
    """Ascending symplectic eigenvalues, moduli of eig(2*Omega*V) taken pairwise."""
    omega = build_omega(V.basis)
    ev = np.linalg.eigvals(2.0 * omega @ _balance(V))
    return _pair_moduli(np.abs(ev))


def partial_transpose(V: VarianceMatrix, particle: int) -> VarianceMatrix:
    if particle not in V.basis.particles:
        raise BasisError(f"particle {particle} not in basis")
    signs = np.array([-1.0 if (e.kind == "p" and e.particle == particle) else 1.0
                      for e in V.basis.entries])
    return VarianceMatrix(V.matrix * np.outer(signs, signs), V.basis)


def is_physical_commutative(V: VarianceMatrix) -> tuple[bool, float]:
    margin = float(symplectic_spectrum(V).min() - 1.0)
    return margin >= -PHYS_TOL, margin


def uncertainty_min_eig(V: VarianceMatrix) -> float:
    """Smallest eigenvalue of V + i*Omega/2 (unit Omega), which is >= 0 iff every nu >= 1."""
    herm = V.matrix + 0.5j * build_omega(V.basis)
    return float(np.linalg.eigvalsh(herm).min())


def is_physical_psd(V: VarianceMatrix) -> bool:
    return uncertainty_min_eig(V) >= -PHYS_TOL


def is_symplectic(S: np.ndarray, omega: np.ndarray, tol: float = SYMPLECTIC_TOL) -> bool:
    S = np.asarray(S, dtype=float)
    return S.shape == omega.shape and np.max(np.abs(S @ omega @ S.T - omega)) <= tol * max(1.0, np.max(np.abs(S)) ** 2)


def symplectic_congruence(V: VarianceMatrix, S: np.ndarray) -> VarianceMatrix:
    S = np.asarray(S, dtype=float)
    if not is_symplectic(S, build_omega(V.basis)):
        raise SymplecticError("S does not preserve the symplectic form of this basis")
    return VarianceMatrix(S @ V.matrix @ S.T, V.basis)


def williamson(V: VarianceMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Symplectic S with S V S^T diagonal, plus the ascending spectrum.

    The diagonal is returned in V's own ordering: for every conjugate pair the
    two entries equal nu_j / 2. Mode j is the j-th (x, p) pair of the basis.
    """
    m = V.matrix
    if np.linalg.eigvalsh(m).min() <= 0:
        raise ValueError("Williamson reduction needs a positive definite matrix")
    omega = build_omega(V.basis)
    pairs = [(i, V.basis.index("p", e.particle, e.axis))
             for i, e in enumerate(V.basis.entries) if e.kind == "x"]
    root = linalg.sqrtm(m).real
    root = 0.5 * (root + root.T)
    inv_root = np.linalg.inv(root)
    K = root @ omega @ root
    T, O = linalg.schur(0.5 * (K - K.T), output="real")
    n = len(pairs)
    cols, d = [], []
    k = 0
    while k < 2 * n:
        val = T[k, k + 1]
        if val >= 0:
            cols.append((O[:, k], O[:, k + 1]))
        else:
            cols.append((O[:, k + 1], O[:, k]))
        d.append(abs(val))
        k += 2
    order = np.argsort(d)
    d = np.array(d)[order]
    Ot = np.zeros_like(m)
    for slot, idx in enumerate(order):
        qi, pi = pairs[slot]
        Ot[qi], Ot[pi] = cols[idx]
    scale = np.zeros(2 * n)
    for slot, (qi, pi) in enumerate(pairs):
        scale[qi] = scale[pi] = np.sqrt(d[slot])
    S = scale[:, None] * (Ot @ inv_root)
    return S, 2.0 * d


@dataclass(frozen=True)
class StandardFormParams:
    g_a: float
    g_b: float
    g_c: float
    g_d: float
    m_a: float
    m_b: float
    m_c: float
    m_d: float
    q_a: float
    q_b: float

    def assemble(self) -> VarianceMatrix:
        """Ten-parameter form in the pair-interleaved ordering."""
        v = np.diag([self.g_a, self.g_a, self.g_b, self.g_b, self.g_c, self.g_c, self.g_d, self.g_d])
        cross = {(0, 4): self.m_a, (1, 5): self.m_c, (0, 6): self.q_a, (1, 7): self.q_b,
                 (2, 4): self.q_a, (3, 5): self.q_b, (2, 6): self.m_b, (3, 7): self.m_d}
        for (i, j), val in cross.items():
            v[i, j] = v[j, i] = val
        return VarianceMatrix(v, Basis.pair_interleaved())


def _local_mode_normalizer(block: np.ndarray) -> np.ndarray:
    """S in Sp(2) with S block S^T = sqrt(det block) * I."""
    g = np.sqrt(np.linalg.det(block))
    w, u = np.linalg.eigh(block)
    return np.sqrt(g) * (u @ np.diag(w ** -0.5) @ u.T)


def _rotation_svd(m: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Rotations (R, Q) with R m Q^T diagonal."""
    if abs(m[0, 1]) <= tol and abs(m[1, 0]) <= tol:
        return np.eye(2), np.eye(2)
    u, s, vt = np.linalg.svd(m)
    if np.linalg.det(u) < 0:
        u[:, 1] *= -1
    if np.linalg.det(vt) < 0:
        vt[1] *= -1
    return u.T, vt


def standard_form(V: VarianceMatrix, tol: float = 1e-8) -> StandardFormParams:
    """Two-step local reduction of an 8x8 two-particle matrix.

    Step I brings each particle block to Williamson form (per mode when the
    particle's x and y sectors are uncoupled, so axis labels survive). Step II
    uses the residual local rotations to diagonalize the x-x and y-y cross
    blocks; the x-y cross blocks must then come out diagonal and equal, or
    StandardFormError is raised.
    """
    basis = Basis.pair_interleaved()
    W = V.in_basis(basis)
    m = W.matrix
    if len(V.basis) != 8:
        raise BasisError("standard form needs an 8x8 two-particle matrix")
    if np.linalg.eigvalsh(m).min() <= 0:
        raise ValueError("standard form needs a positive definite matrix")
    scale = max(1.0, np.max(np.abs(m)))
    S = np.zeros((8, 8))
    for start in (0, 4):
        blk = m[start:start + 4, start:start + 4]
        if np.max(np.abs(blk[0:2, 2:4])) <= tol * scale:
            S[start:start + 2, start:start + 2] = _local_mode_normalizer(blk[0:2, 0:2])
            S[start + 2:start + 4, start + 2:start + 4] = _local_mode_normalizer(blk[2:4, 2:4])
        else:
            Sp, _ = williamson(VarianceMatrix(blk, Basis.two_mode()))
            S[start:start + 4, start:start + 4] = Sp
    m1 = S @ m @ S.T
    r1x, r2x = _rotation_svd(m1[0:2, 4:6], tol * scale)
    r1y, r2y = _rotation_svd(m1[2:4, 6:8], tol * scale)
    R = linalg.block_diag(r1x, r1y, r2x, r2y)
    m2 = R @ m1 @ R.T
    params = StandardFormParams(
        g_a=m2[0, 0], g_b=m2[2, 2], g_c=m2[4, 4], g_d=m2[6, 6],
        m_a=m2[0, 4], m_c=m2[1, 5], m_b=m2[2, 6], m_d=m2[3, 7],
        q_a=m2[0, 6], q_b=m2[1, 7])
    resid = np.max(np.abs(params.assemble().matrix - m2))
    if resid > tol * scale:
        raise StandardFormError(f"local reduction left residual {resid:.3g} outside the standard shape")
    return params


def sector_blocks(V: VarianceMatrix, axis: int) -> dict[str, np.ndarray]:
    """alpha, beta, gamma (2x2) and delta (4x4) for one axis of a two-particle matrix."""
    idx = [V.basis.index(k, i, axis) for i in (1, 2) for k in "xp"]
    delta = V.matrix[np.ix_(idx, idx)]
    return {"alpha": delta[0:2, 0:2], "beta": delta[2:4, 2:4],
            "gamma": delta[0:2, 2:4], "delta": delta}


def block_invariants(V: VarianceMatrix, transposed: bool = False) -> dict[str, float]:
    """Local symplectic invariants of each axis sector.

    Keys det_alpha_a, ..., det_delta_b, Delta_x, Delta_y (a <-> axis 1, b <->
    axis 2). With transposed=True the Delta's use -2 det(gamma), the
    partial-transpose combination.
    """
    if len(V.basis) != 8 or V.basis.particles != [1, 2]:
        raise BasisError("block invariants need an 8x8 two-particle matrix")
    sign = -2.0 if transposed else 2.0
    out = {}
    for axis, tag, name in ((1, "a", "Delta_x"), (2, "b", "Delta_y")):
        blk = sector_blocks(V, axis)
        for key in ("alpha", "beta", "gamma", "delta"):
            out[f"det_{key}_{tag}"] = float(np.linalg.det(blk[key]))
        out[name] = out[f"det_alpha_{tag}"] + out[f"det_beta_{tag}"] + sign * out[f"det_gamma_{tag}"]
    return out


def two_mode_eigs(delta_inv: float, det_delta: float) -> tuple[float, float]:
    """(nu_minus, nu_plus) from a two-mode Delta invariant and determinant."""
    disc = np.sqrt(max(delta_inv ** 2 - 4.0 * det_delta, 0.0))
    lo = 2.0 * delta_inv - 2.0 * disc
    return float(np.sqrt(max(lo, 0.0))), float(np.sqrt(2.0 * delta_inv + 2.0 * disc))


def sector_eigs_invariant(V: VarianceMatrix, transposed: bool = False) -> dict[str, tuple[float, float]]:
    """(minus, plus) per axis from the Delta invariant and det delta.

    Loses about half the digits when a sector's two eigenvalues coincide
    (the discriminant is then pure rounding); see sector_eigs.
    """
    inv = block_invariants(V, transposed)
    return {"x": two_mode_eigs(inv["Delta_x"], inv["det_delta_a"]),
            "y": two_mode_eigs(inv["Delta_y"], inv["det_delta_b"])}


def sector_eigs(V: VarianceMatrix, transposed: bool = False) -> dict[str, tuple[float, float]]:
    """(minus, plus) eigenvalues of each axis sector.

    `V` is the matrix whose spectrum is wanted; pass transposed=True when V is
    the un-transposed matrix and the partial-transpose spectrum is wanted.
    Each 4x4 sector goes through the eigenvalue route, which stays accurate
    at degenerate sectors where the invariant formula does not.
    """
    if len(V.basis) != 8 or V.basis.particles != [1, 2]:
        raise BasisError("sector eigenvalues need an 8x8 two-particle matrix")
    out = {}
    for axis, name in ((1, "x"), (2, "y")):
        sub = VarianceMatrix(sector_blocks(V, axis)["delta"], Basis.two_mode())
        if transposed:
            sub = partial_transpose(sub, 2)
        nu = symplectic_spectrum(sub)
        out[name] = (float(nu[0]), float(nu[1]))
    return out


def random_symplectic(n: int, rng: np.random.Generator, scale: float = 0.3) -> np.ndarray:
    """exp(Omega H) for a random symmetric H, interleaved (x,p) ordering."""
    omega = linalg.block_diag(*([np.array([[0.0, 1.0], [-1.0, 0.0]])] * n))
    h = rng.normal(scale=scale, size=(2 * n, 2 * n))
    return linalg.expm(omega @ (h + h.T) / 2)


def interleaved_basis(n: int) -> Basis:
    return Basis(tuple((k, i, 1) for i in range(1, n + 1) for k in "xp"))


def as_variance(matrix: Sequence, basis: Basis | None = None) -> VarianceMatrix:
    m = np.asarray(matrix, dtype=float)
    return VarianceMatrix(m, basis or interleaved_basis(m.shape[0] // 2))
