"""Data series behind the eight figures, as ordered rows."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .commutative_states import Pair1D, log_negativity, nu_ppt_1d, nu_x_ppt_2d_closed
from .nc_bipartite import (PINNED_ALPHA_THETA, NCPair, alpha_min_at_fixed_u, log_negativity_nc,
                           nu_min_theta, ppt_branch_eigs)

COLUMNS = {
    1: ("eta", "zeta", "nu_tilde_minus"),
    2: ("alpha_a1_sq", "nu_x_tilde"),
    3: ("alpha_b1_sq", "nu_x_tilde_sq", "nu_min_sq"),
    6: ("alpha_b1_sq", "E_commutative", "E_noncommutative"),
}
for _k in (4, 5):
    COLUMNS[_k] = COLUMNS[3]
for _k in (7, 8):
    COLUMNS[_k] = COLUMNS[6]

DEFAULT_GRIDS = {1: [(0.2, 5.0, 25), (0.0, 10.0, 21)]}
for _k in range(2, 9):
    DEFAULT_GRIDS[_k] = [(0.0, 6.0, 121)]


@dataclass(frozen=True)
class Grid:
    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if self.steps < 2 or not self.lo < self.hi:
            raise ValueError("grid needs steps >= 2 and min < max")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass(frozen=True)
class FigureRequest:
    figure: int
    grids: tuple = ()
    mode: str = "computed"
    theta: float = 1.0

    def __post_init__(self):
        if self.figure not in COLUMNS:
            raise ValueError(f"unknown figure {self.figure}")
        if self.mode not in ("computed", "figure"):
            raise ValueError("mode must be 'computed' or 'figure'")
        if not self.theta > 0:
            raise ValueError("theta must be positive")
        grids = self.grids or tuple(Grid(*g) for g in DEFAULT_GRIDS[self.figure])
        grids = tuple(g if isinstance(g, Grid) else Grid(*g) for g in grids)
        if len(grids) != len(DEFAULT_GRIDS[self.figure]):
            raise ValueError(f"figure {self.figure} takes {len(DEFAULT_GRIDS[self.figure])} grid(s)")
        object.__setattr__(self, "grids", grids)

    def points(self) -> list[tuple]:
        if self.figure == 1:
            return [(e, z) for e in self.grids[0].values() for z in self.grids[1].values()]
        return [(u,) for u in self.grids[0].values()]


def figure_alpha(figure: int, u: float, mode: str, theta: float) -> float:
    """alpha used at abscissa u: pinned value or self-consistent minimizer."""
    if mode == "figure":
        key = figure if figure in PINNED_ALPHA_THETA else figure - 3
        return PINNED_ALPHA_THETA[key] / theta
    return alpha_min_at_fixed_u(theta, u)


def figure_row(figure: int, point: tuple, mode: str, theta: float) -> tuple:
    if figure == 1:
        eta, zeta = point
        return (eta, zeta, nu_ppt_1d(Pair1D.from_reduced(eta, zeta)))
    (u,) = point
    if figure == 2:
        return (u, nu_x_ppt_2d_closed(u))
    alpha = figure_alpha(figure, u, mode, theta)
    params = NCPair(alpha, theta, (float(np.sqrt(u / alpha)), 0.0))
    if figure in (3, 4, 5):
        bound = nu_min_theta(theta, params.b1, alpha)
        return (u, ppt_branch_eigs(params).x ** 2, bound ** 2)
    e_c = log_negativity(min(nu_x_ppt_2d_closed(u), 1.0))
    return (u, e_c, log_negativity_nc(params, alpha_min=alpha))


def _row_star(args):
    return figure_row(*args)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("WORKER_COUNT", "1")))
    except ValueError:
        return 1


def run_figure(req: FigureRequest, workers: int | None = None) -> list[tuple]:
    """Rows in input order; parallel over points when more than one worker is set."""
    jobs = [(req.figure, p, req.mode, req.theta) for p in req.points()]
    workers = worker_count() if workers is None else workers
    if workers <= 1:
        return [figure_row(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_row_star, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def fmt(x: float) -> str:
    """Shortest repr after rounding to 12 significant digits."""
    return repr(float(f"{x:.12g}"))


def rows_to_csv(figure: int, rows: Sequence[tuple]) -> str:
    lines = [",".join(COLUMNS[figure])]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def gnuplot_script(figure: int, data_path: str) -> str:
    cols = COLUMNS[figure]
    if figure == 1:
        body = f"splot '{data_path}' using 1:2:3 with points title '{cols[2]}'"
    else:
        body = ", ".join(f"'{data_path}' using 1:{i + 1} with lines title '{c}'"
                         for i, c in enumerate(cols[1:], start=1))
        body = "plot " + body
    return f"set datafile separator ','\nset key autotitle columnhead\nset xlabel '{cols[0]}'\n{body}\n"
