"""Batteries run by `ncent verify`. Each check returns (name, passed, detail)."""
from __future__ import annotations

import numpy as np

from .commutative_states import Pair2D, nu_ppt_2d, pair_2d_blocks
from .nc_bipartite import NCPair, effective_blocks, nc_blocks, physicality_branch_eigs, ppt_branch_eigs
from .nc_kinematics import WavePacket, nc_to_effective, single_particle_nc_variance, single_particle_ppt
from .oracle_integrals import QuadratureConfig, verification_report
from .symplectic_core import (as_variance, is_physical_commutative, is_physical_psd, partial_transpose,
                              random_symplectic, standard_form, symplectic_congruence, symplectic_spectrum)

SUITES = ("core", "oracle", "reductions")


def _random_spd(n: int, rng) -> np.ndarray:
    a = rng.normal(size=(2 * n, 2 * n))
    return a @ a.T + 0.2 * np.eye(2 * n)


def core_checks(seed: int = 7) -> list[tuple[str, bool, str]]:
    rng = np.random.default_rng(seed)
    out = []
    worst = 0.0
    for n in (1, 2, 4):
        for _ in range(100):
            V = as_variance(_random_spd(n, rng))
            S = random_symplectic(n, rng)
            a, b = symplectic_spectrum(V), symplectic_spectrum(symplectic_congruence(V, S))
            worst = max(worst, float(np.max(np.abs(a - b) / a)))
    out.append(("spectrum invariant under symplectic congruence", worst <= 1e-9, f"max rel {worst:.3g}"))

    agree = 0
    for _ in range(100):
        V = as_variance(_random_spd(2, rng) * rng.uniform(0.05, 1.0))
        agree += is_physical_commutative(V)[0] == is_physical_psd(V)
    out.append(("nu >= 1 agrees with V + i Omega/2 >= 0", agree == 100, f"{agree}/100"))

    V = as_variance(_random_spd(2, rng))
    twice = partial_transpose(partial_transpose(V, 2), 2)
    out.append(("partial transpose is an involution", np.array_equal(twice.matrix, V.matrix), ""))

    V8 = nc_to_effective(nc_blocks(NCPair.figure_point(1.4, 1.0)).assemble(), 1.0)
    sf = standard_form(V8)
    gap = float(np.max(np.abs(symplectic_spectrum(sf.assemble()) - symplectic_spectrum(V8))))
    out.append(("standard form keeps the spectrum", gap <= 1e-8, f"max abs {gap:.3g}"))
    return out


def oracle_checks(cfg: QuadratureConfig = QuadratureConfig()) -> list[tuple[str, bool, str]]:
    pts = [NCPair.figure_point(s, u) for s in (0.5, 1.4, 2.0) for u in (0.0, 1.0, 4.0)]
    rows = verification_report(pts, cfg)
    worst = max(r["rel_error"] for r in rows)
    conv = all(r["converged"] for r in rows)
    return [("closed-form NC blocks match quadrature", conv and worst <= 1e-6,
             f"{len(rows)} entries, max rel {worst:.3g}")]


def reduction_checks() -> list[tuple[str, bool, str]]:
    out = []
    worst_b, worst_nu = 0.0, 0.0
    for u in np.linspace(0.0, 6.0, 25):
        alpha, b1 = 1.0, float(np.sqrt(u))
        eff = effective_blocks(nc_blocks(NCPair(alpha, 1e-8, (b1, 0.0))), 1e-8)
        com = pair_2d_blocks(Pair2D(alpha, b1))
        for k, name in zip(eff.as_tuple(), "ABCDEG"):
            worst_b = max(worst_b, float(np.max(np.abs(k - com[name]))))
        nu = ppt_branch_eigs(NCPair(alpha, 1e-8, (b1, 0.0)))
        ref = nu_ppt_2d(Pair2D(alpha, b1))
        worst_nu = max(worst_nu, abs(nu.x - ref[0]) / ref[0], abs(nu.y - ref[1]))
    out.append(("theta -> 0 blocks match the commutative pair", worst_b <= 1e-6, f"max abs {worst_b:.3g}"))
    out.append(("theta -> 0 PT eigenvalues match", worst_nu <= 1e-6, f"max rel {worst_nu:.3g}"))

    gaps = []
    for s in (0.5, 1.4, 2.0):
        p = NCPair.figure_point(s, 0.0)
        ph, pt = physicality_branch_eigs(p), ppt_branch_eigs(p)
        gaps += [abs(ph.x - ph.y), abs(pt.x - ph.x)]
    out.append(("zero separation: isotropic and PT invariant", max(gaps) <= 1e-10, f"max {max(gaps):.3g}"))

    dev = 0.0
    for th in (0.0, 0.5, 1.0, 2.0, 5.0):
        for al in (0.1, 1.0, 10.0):
            pk = WavePacket(al, theta=th)
            dev = max(dev, abs(single_particle_ppt(pk) - 1.0))
            eff = nc_to_effective(single_particle_nc_variance(pk), th).matrix
            dev = max(dev, float(np.max(np.abs(eff - np.diag([1 / (2 * al)] * 2 + [al / 2] * 2)))))
    out.append(("single particle: effective matrix diagonal, PT eigenvalue 1", dev <= 1e-10, f"max {dev:.3g}"))
    return out


def run_suite(name: str) -> list[tuple[str, bool, str]]:
    if name == "all":
        return core_checks() + reduction_checks() + oracle_checks()
    return {"core": core_checks, "oracle": oracle_checks, "reductions": reduction_checks}[name]()
