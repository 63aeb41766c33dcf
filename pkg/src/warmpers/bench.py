"""Perturbation benchmark suites.

Each suite builds one seed decomposition and runs a family of warm-start
updates whose size knob (noise level, insertion radius, deletion count)
varies per trial, reporting diff statistics and operation counters per
trial.  Counters, not wall clock, are the portable cost signal; timings can
be added to reports explicitly and are informational only.

Suites:
  perm      noise on a figure-eight cloud at infinite radius (pure reorder)
  insert    grow the radius from zero towards a distance quantile
  delete    remove random upward-closed cell sets of increasing size
  levelset  noise on a sinusoid image (fixed grid, pure reorder)
  rips      point noise with enclosing-radius truncation (mixed changes)

perm, levelset, and rips default to cohomology with clearing; insert and
delete default to homology, whose final-reduction counters scale directly
with the amount of inserted or disturbed material.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import UsageError
from .filtration import FilteredComplex, diff_filtrations, rips_filtration
from .persistence import DecompositionSet, compute_persistence, update_persistence
from .reduction import OperationCounters
from .synth import add_noise, figure_eight_points, rng_for, sinusoid_2d

SUITES = ("perm", "insert", "delete", "levelset", "rips")
DEFAULT_MODES = {"perm": "cohomology", "insert": "homology", "delete": "homology",
                 "levelset": "cohomology", "rips": "cohomology"}


@dataclass
class TrialReport:
    suite: str
    trial: int
    param: float
    d_k: float
    n_inserted: int
    n_deleted: int
    add_frac: float
    del_frac: float
    column_additions: int
    pivot_eliminations: int
    swaps: int
    wall_ms: Optional[float] = None

    def row(self, timings: bool) -> List[str]:
        out = [self.suite, str(self.trial), repr(self.param), repr(self.d_k),
               str(self.n_inserted), str(self.n_deleted), repr(self.add_frac),
               repr(self.del_frac), str(self.column_additions),
               str(self.pivot_eliminations), str(self.swaps)]
        if timings:
            out.append(repr(self.wall_ms if self.wall_ms is not None else 0.0))
        return out


REPORT_COLUMNS = ["suite", "trial", "param", "d_k", "n_inserted", "n_deleted",
                  "add_frac", "del_frac", "column_additions",
                  "pivot_eliminations", "swaps"]


def report_csv(reports: List[TrialReport], timings: bool = False) -> str:
    cols = REPORT_COLUMNS + (["wall_ms"] if timings else [])
    lines = [",".join(cols)]
    for rep in reports:
        lines.append(",".join(rep.row(timings)))
    return "\n".join(lines) + "\n"


def _geom_grid(lo: float, hi: float, count: int) -> List[float]:
    if count == 1:
        return [hi]
    return [lo * (hi / lo) ** (t / (count - 1)) for t in range(count)]


def _run_update(suite: str, trial: int, param: float, seed_state: DecompositionSet,
                new_cx: FilteredComplex) -> TrialReport:
    diff = diff_filtrations(seed_state.complex, new_cx, seed_state.mode, seed_state.field)
    counters = OperationCounters()
    t0 = time.perf_counter()
    update_persistence(seed_state, new_cx, counters=counters, diff=diff)
    wall_ms = (time.perf_counter() - t0) * 1e3
    return TrialReport(suite, trial, param, diff.normalized_kendall_tau(),
                       diff.n_inserted(), diff.n_deleted(),
                       diff.add_fraction(), diff.del_fraction(),
                       counters.column_additions, counters.pivot_eliminations,
                       counters.swaps, wall_ms)


def _upward_closed_deletion(cx: FilteredComplex, picked, count: int) -> FilteredComplex:
    """Drop the first `count` cells of a fixed shuffled order plus cofaces.

    Trials share one shuffled order, so larger trials delete supersets of
    smaller ones; nested deletion sets keep the cost-versus-count trend
    free of draw-to-draw variance, like a radius sweep does for insertion.
    """
    doomed = set(picked[:count])
    for q in range(2, cx.max_dim + 1):
        for c in cx.cells_by_dim[q]:
            if c.key not in doomed and any(fkey in doomed for fkey, _ in c.boundary):
                doomed.add(c.key)
    keep = {c.key for cells in cx.cells_by_dim for c in cells} - doomed
    return cx.restrict(keep)


class BenchContext:
    """Seed data shared by all trials of one suite run."""

    def __init__(self, suite: str, seed: int, n_points: int, max_dim: int,
                 mode: Optional[str], use_clearing: bool, grid_n: int,
                 quantile_cap: float, reps: int = 1):
        if suite not in SUITES:
            raise UsageError(f"unknown suite {suite!r}; pick from {SUITES}")
        self.suite = suite
        self.seed = seed
        self.reps = reps
        self.mode = mode or DEFAULT_MODES[suite]
        self.use_clearing = use_clearing
        self.max_dim = max_dim
        if suite == "levelset":
            self.base_image = sinusoid_2d(grid_n)
            from .filtration import lower_star_freudenthal
            self.base_cx = lower_star_freudenthal(self.base_image)
        else:
            self.points = figure_eight_points(n_points, sigma=0.001, seed=seed)
            diff = self.points[:, None, :] - self.points[None, :, :]
            dists = np.sqrt((diff * diff).sum(axis=2))
            tri = dists[np.triu_indices(n_points, k=1)]
            self.r_cap = float(np.quantile(tri, quantile_cap)) if tri.size else 0.0
            if suite == "perm":
                self.base_cx = rips_filtration(self.points, r_max=math.inf, max_dim=max_dim)
            elif suite == "insert":
                self.base_cx = rips_filtration(self.points, r_max=0.0, max_dim=max_dim)
            elif suite == "delete":
                self.base_cx = rips_filtration(self.points, r_max=self.r_cap, max_dim=max_dim)
                candidates = [c.key for q in range(1, self.base_cx.max_dim + 1)
                              for c in self.base_cx.cells_by_dim[q]]
                self.delete_orders = []
                for rep in range(self.reps):
                    order = rng_for(seed * 131 + rep + 1).permutation(len(candidates))
                    self.delete_orders.append([candidates[int(i)] for i in order])
            else:
                self.base_cx = rips_filtration(self.points, r_max="enc", max_dim=max_dim)
        self.state, _ = compute_persistence(self.base_cx, mode=self.mode,
                                            use_clearing=use_clearing, keep_basis=True)

    def trial_params(self, trials: int) -> List[float]:
        if self.suite in ("perm", "rips"):
            return [s for s in _geom_grid(0.002, 0.15, trials)
                    for _ in range(self.reps)]
        if self.suite == "levelset":
            return _geom_grid(0.005, 0.3, trials)
        if self.suite == "insert":
            lo, hi = 0.25 * self.r_cap, self.r_cap
            return [lo + (hi - lo) * t / max(trials - 1, 1) for t in range(trials)]
        # small fractions keep the reorder work in its linear regime: moving k
        # deleted cells past the survivors costs ~ k * n_survivors inversions,
        # which bends over once k stops being small against the complex
        # deletion sizes replicate over independent shuffles; reports are
        # averaged per size downstream, the same way timed experiments
        # average repeated updates
        deletable = sum(self.base_cx.n_cells(q) for q in range(1, self.base_cx.max_dim + 1))
        sizes = [max(1.0, round(deletable * f)) for f in np.linspace(0.01, 0.08, trials)]
        return [size for size in sizes for _ in range(self.reps)]

    def new_complex(self, trial: int, param: float) -> FilteredComplex:
        noise_seed = self.seed * 7919 + trial
        if self.suite == "perm":
            pts = add_noise(self.points, param, noise_seed)
            return rips_filtration(pts, r_max=math.inf, max_dim=self.max_dim)
        if self.suite == "rips":
            pts = add_noise(self.points, param, noise_seed)
            return rips_filtration(pts, r_max="enc", max_dim=self.max_dim)
        if self.suite == "insert":
            return rips_filtration(self.points, r_max=param, max_dim=self.max_dim)
        if self.suite == "delete":
            order = self.delete_orders[trial % self.reps]
            return _upward_closed_deletion(self.base_cx, order, int(param))
        from .filtration import lower_star_freudenthal
        return lower_star_freudenthal(add_noise(self.base_image, param, noise_seed))


_POOL_CTX: Optional[BenchContext] = None


def _pool_trial(args):
    trial, param = args
    ctx = _POOL_CTX
    assert ctx is not None
    new_cx = ctx.new_complex(trial, param)
    return _run_update(ctx.suite, trial, param, ctx.state, new_cx)


def run_suite(suite: str, trials: int = 8, seed: int = 0, n_points: int = 50,
              max_dim: int = 1, mode: Optional[str] = None, use_clearing: bool = True,
              grid_n: int = 32, quantile_cap: float = 0.35,
              jobs: int = 1, reps: Optional[int] = None) -> List[TrialReport]:
    """Run one suite; one report row per trial, ordered by trial index.

    The delete suite runs `reps` independent shuffles per deletion size
    (default 4) and emits one row each; other suites default to one row per
    parameter value.
    """
    global _POOL_CTX
    if reps is None:
        reps = {"delete": 4, "perm": 3}.get(suite, 1)
    ctx = BenchContext(suite, seed, n_points, max_dim, mode, use_clearing,
                       grid_n, quantile_cap, reps=reps)
    params = ctx.trial_params(trials)
    work = list(enumerate(params))
    if jobs <= 1:
        return [_pool_trial_inline(ctx, trial, param) for trial, param in work]
    _POOL_CTX = ctx
    try:
        # fork start shares the seed state with workers without pickling it
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_pool_trial, work))
    finally:
        _POOL_CTX = None
    return sorted(reports, key=lambda rep: rep.trial)


def _pool_trial_inline(ctx: BenchContext, trial: int, param: float) -> TrialReport:
    return _run_update(ctx.suite, trial, param, ctx.state, ctx.new_complex(trial, param))
