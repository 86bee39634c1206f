"""Parameter sweeps, level-crossing detection, derivatives of the
concurrence, transition-type classification, and finite-size drift of
derivative extrema.

Crossings are found on the sorted level curves of a sweep.  Because the
solvers resolve degenerate multiplets exactly, a crossing shows up in
the gap of an adjacent level pair either as a degenerate run that ends
(two levels locked at zero gap on one side, split on the other) or as an
interior dip that touches zero.  Both candidates are refined with fresh
solves: runs by bisecting the "gap below tolerance" boundary, dips by a
golden-section minimization of the gap.  A refined gap at or below the
degeneracy tolerance is a true crossing; a dip that stays open between
levels carrying the same quantum numbers is an avoided crossing.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .lattice import LatticeSpec, chain, ladder, enumerate_sector
from . import models
from .models import ModelSpec, HamiltonianAction, hamiltonian_dense
from .eigensolver import (EigenSolution, dense_spectrum, lanczos_lowest_k,
                          ConvergenceError)
from .observables import PAIR_OPS, StateLabels, label_state, two_site_rdm
from .entanglement import wootters_concurrence

DEFAULT_SEED = 0x5EED


@dataclass(frozen=True)
class GridSpec:
    name: str
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("grid step must be positive")
        if self.stop < self.start:
            raise ValueError("grid must be increasing")
        n = (self.stop - self.start) / self.step
        if abs(n - round(n)) > 1e-8:
            raise ValueError("grid step must divide the grid span")

    @property
    def count(self) -> int:
        return int(round((self.stop - self.start) / self.step)) + 1

    def values(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-10
    seed: int = DEFAULT_SEED
    dense_cutoff: int = 512      # sweep points at or below this use LAPACK
    dense_cap: int = 4096
    max_iter: int | None = None


def build_model(family: str, params: dict) -> ModelSpec:
    params = dict(params)
    if family == "xxz":
        return models.xxz(params.pop("delta"))
    if family == "j1j2":
        return models.j1j2(params.pop("j1", 1.0), params.pop("j2", 0.0))
    if family == "ising":
        return models.transverse_ising(params.pop("lam"))
    if family == "ladder":
        return models.ladder_model(params.pop("j_rung"), params.pop("j_leg", 1.0))
    if family == "xyz":
        return models.general_xyz(params.pop("jx", 1.0), params.pop("jy", 1.0),
                                  params.pop("jz", 1.0), params.pop("h", 0.0))
    raise ValueError(f"unknown model family {family!r}")


def resolve_pairs(lattice: LatticeSpec, pairs) -> dict[str, tuple[int, int]]:
    """Map symbolic pair names (nn / rung / leg / 'i-j') to site pairs."""
    out = {}
    for token in pairs:
        if isinstance(token, tuple):
            out[f"{token[0]}-{token[1]}"] = token
        elif token == "nn":
            if lattice.geometry != "chain":
                raise ValueError("nn pairs refer to chains; ladders use rung/leg")
            out["nn"] = (0, 1)
        elif token == "rung":
            if lattice.geometry != "ladder":
                raise ValueError("rung pairs need a ladder")
            out["rung"] = (0, 1)
        elif token == "leg":
            if lattice.geometry != "ladder":
                raise ValueError("leg pairs need a ladder")
            out["leg"] = (0, 2)
        elif "-" in str(token):
            i, j = (int(p) for p in str(token).split("-"))
            out[f"{i}-{j}"] = (i, j)
        else:
            raise ValueError(f"unknown pair token {token!r}")
    for name, (i, j) in out.items():
        if not (0 <= i < lattice.n_sites and 0 <= j < lattice.n_sites and i != j):
            raise ValueError(f"pair {name} outside lattice")
    return out


@dataclass(frozen=True)
class PointConfig:
    """Everything needed to solve one parameter point; picklable so sweep
    grid points can run in worker processes."""
    family: str
    fixed_params: tuple
    swept_name: str
    geometry: str
    n_sites: int
    space: str                  # "full" | "sz0"
    k_levels: int
    pair_items: tuple           # ((name, (i, j)), ...)
    options: SolverOptions

    def lattice(self) -> LatticeSpec:
        return LatticeSpec(self.geometry, self.n_sites)

    def model_at(self, g: float) -> ModelSpec:
        params = dict(self.fixed_params)
        params[self.swept_name] = g
        return build_model(self.family, params)


def _choose_space(family, fixed_params, lattice, space, options) -> str:
    if space != "auto":
        return space
    if 2 ** lattice.n_sites <= options.dense_cutoff:
        return "full"
    # xxz / j1j2 / ladder conserve Sz for every coupling value; xyz may
    # cross between symmetry classes along a sweep, so it stays full
    if family in ("xxz", "j1j2", "ladder") and lattice.n_sites % 2 == 0:
        return "sz0"
    return "full"


def _space_sector(space: str) -> int | None:
    """Map a space tag ("full" | "sz0" | "sz:<m>") to an sz_twice value."""
    if space == "full":
        return None
    if space == "sz0":
        return 0
    if space.startswith("sz:"):
        return int(space[3:])
    raise ValueError(f"unknown space tag {space!r}")


def solve_levels(cfg: PointConfig, g: float, k: int) -> tuple[EigenSolution, object]:
    """Lowest k levels at one parameter value, dense or Lanczos by size."""
    lattice = cfg.lattice()
    basis = enumerate_sector(lattice, _space_sector(cfg.space))
    model = cfg.model_at(g)
    if basis.dimension <= cfg.options.dense_cutoff:
        sol = dense_spectrum(hamiltonian_dense(model, basis, cap=max(
            cfg.options.dense_cap, cfg.options.dense_cutoff)))
        sol = EigenSolution(sol.energies[:k], sol.vectors[:, :k], sol.residuals[:k])
    else:
        action = HamiltonianAction(model, basis)
        sol = lanczos_lowest_k(action, basis.dimension, k,
                               tol=cfg.options.tol, seed=cfg.options.seed,
                               max_iter=cfg.options.max_iter)
    return sol, basis


@dataclass
class PairRecord:
    name: str
    sites: tuple[int, int]
    cxx: float
    cyy: float
    czz: float
    concurrence: float
    concurrence_raw: float


@dataclass
class SweepPoint:
    g: float
    energies: np.ndarray
    labels: list[StateLabels]
    pairs: dict[str, PairRecord]
    flag: str | None = None
    gs_multiplicity: int = 1


@dataclass
class SweepResult:
    config: PointConfig
    grid_spec: GridSpec
    points: list[SweepPoint]

    @property
    def grid(self) -> np.ndarray:
        return np.array([p.g for p in self.points])

    @property
    def k_levels(self) -> int:
        return self.config.k_levels

    @property
    def pair_names(self) -> list[str]:
        return [name for name, _ in self.config.pair_items]

    def energy(self, level: int) -> np.ndarray:
        return np.array([p.energies[level] if p.flag is None else np.nan
                         for p in self.points])

    def concurrence(self, pair: str | None = None, raw: bool = False) -> np.ndarray:
        pair = pair or self.pair_names[0]
        key = "concurrence_raw" if raw else "concurrence"
        return np.array([getattr(p.pairs[pair], key) if p.flag is None else np.nan
                         for p in self.points])

    @property
    def flagged(self) -> list[SweepPoint]:
        return [p for p in self.points if p.flag is not None]


def _sweep_point(cfg: PointConfig, g: float) -> SweepPoint:
    try:
        sol, basis = solve_levels(cfg, g, cfg.k_levels)
    except ConvergenceError as err:
        nan = np.full(cfg.k_levels, np.nan)
        return SweepPoint(g, nan, [], {}, flag=str(err))
    labels = [label_state(basis, sol.vectors[:, c]) for c in range(sol.k)]
    # a degenerate ground level has no preferred eigenvector; pair
    # observables then come from the ensemble over the solved multiplet,
    # which is invariant under mixing within the degenerate subspace
    deg = 1e-9 * max(1.0, float(sol.energies[-1] - sol.energies[0]))
    mult = int(np.sum(sol.energies - sol.energies[0] <= deg)) if sol.k > 1 else 1
    pairs = {}
    for name, sites in cfg.pair_items:
        rho = sum(two_site_rdm(basis, sol.vectors[:, c], *sites)
                  for c in range(mult)) / mult
        cxx, cyy, czz = (float(np.sum(rho * PAIR_OPS[ax])) for ax in "xyz")
        conc = wootters_concurrence(rho)
        pairs[name] = PairRecord(name, sites, cxx, cyy, czz,
                                 conc.value, conc.raw)
    return SweepPoint(g, sol.energies.copy(), labels, pairs,
                      gs_multiplicity=mult)


def _sweep_task(args):
    return _sweep_point(*args)


def sweep(family: str, fixed_params: dict, swept: GridSpec, lattice: LatticeSpec,
          k_levels: int = 3, pairs=("nn",), space: str = "auto",
          options: SolverOptions = SolverOptions(), threads: int = 1) -> SweepResult:
    """Solve the lowest levels and pair entanglement across a coupling grid."""
    if k_levels < 2:
        raise ValueError("crossing analysis needs at least two levels")
    pair_map = resolve_pairs(lattice, pairs)
    chosen = _choose_space(family, fixed_params, lattice, space, options)
    cfg = PointConfig(family=family, fixed_params=tuple(sorted(fixed_params.items())),
                      swept_name=swept.name, geometry=lattice.geometry,
                      n_sites=lattice.n_sites, space=chosen, k_levels=k_levels,
                      pair_items=tuple(pair_map.items()), options=options)
    values = swept.values()
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            points = list(pool.map(_sweep_task, [(cfg, g) for g in values]))
    else:
        points = [_sweep_point(cfg, g) for g in values]
    return SweepResult(cfg, swept, points)


# ---------------------------------------------------------------------------
# level crossings

@dataclass
class CrossingEvent:
    level_pair: tuple[int, int]
    location: float
    bracket: tuple[float, float]
    kind: str  # "true_crossing" | "avoided" | "unresolved"
    min_gap: float
    labels_below: tuple[StateLabels, StateLabels] | None = None
    labels_above: tuple[StateLabels, StateLabels] | None = None


def _spectral_width(sweep_result: SweepResult) -> float:
    lo, hi = np.inf, -np.inf
    for p in sweep_result.points:
        if p.flag is None:
            lo = min(lo, p.energies[0])
            hi = max(hi, p.energies[-1])
    return max(1.0, hi - lo) if hi > lo else 1.0


def _labels_agree(la: StateLabels, lb: StateLabels):
    """True/False when both states carry resolved quantum numbers, else None."""
    if la.total_spin is None or lb.total_spin is None:
        return None
    same = la.total_spin == lb.total_spin
    if la.sz_twice is not None and lb.sz_twice is not None:
        same = same and la.sz_twice == lb.sz_twice
    if la.parity is not None and lb.parity is not None:
        same = same and la.parity == lb.parity
    return same


def detect_crossings(sweep_result: SweepResult, a: int, b: int, *,
                     degeneracy_tol: float | None = None,
                     refine_tol: float = 1e-9) -> list[CrossingEvent]:
    """Crossing events between sorted levels ``a`` and ``b`` (a < b)."""
    if not 0 <= a < b < sweep_result.k_levels:
        raise ValueError(f"levels ({a}, {b}) not contained in the sweep")
    cfg = sweep_result.config
    deg = degeneracy_tol if degeneracy_tol is not None \
        else 1e-9 * _spectral_width(sweep_result)

    def gap_at(g: float) -> float:
        sol, _ = solve_levels(cfg, g, b + 1)
        return float(sol.energies[b] - sol.energies[a])

    grid = sweep_result.grid
    gap = sweep_result.energy(b) - sweep_result.energy(a)
    valid = ~np.isnan(gap)

    events: list[CrossingEvent] = []
    for seg in _segments(valid):
        if len(seg) < 2:
            continue
        events.extend(_events_in_segment(
            sweep_result, seg, grid, gap, (a, b), deg, refine_tol, gap_at))
    events.sort(key=lambda e: e.location)
    return events


def _segments(valid: np.ndarray):
    run = []
    for i, ok in enumerate(valid):
        if ok:
            run.append(i)
        elif run:
            yield run
            run = []
    if run:
        yield run


def _events_in_segment(sweep_result, seg, grid, gap, pair, deg, refine_tol, gap_at):
    events = []
    idx = np.array(seg)
    g_seg = grid[idx]
    gap_seg = gap[idx]
    degenerate = gap_seg <= deg

    # maximal runs of degeneracy
    runs = []
    start = None
    for i, d in enumerate(degenerate):
        if d and start is None:
            start = i
        elif not d and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(idx) - 1))

    for s, e in runs:
        left_edge = s == 0
        right_edge = e == len(idx) - 1
        if left_edge and right_edge:
            continue  # identically degenerate pair, no event
        if not left_edge and not right_edge and e - s <= 1:
            # isolated touch: the gap dips through zero inside one cell
            lo, hi = g_seg[s - 1], g_seg[e + 1]
            loc, min_gap = _golden_min(gap_at, lo, hi, refine_tol)
            slope = max(gap_seg[s - 1], gap_seg[e + 1]) / (hi - lo)
            ev = _make_event(sweep_result, pair, loc, (lo, hi), min_gap,
                             max(deg, 4.0 * slope * refine_tol))
            if ev is not None:
                events.append(ev)
            continue
        # an extended degenerate stretch: each end where it meets split
        # levels is a crossing of its own
        if not left_edge:
            loc, min_gap = _bisect_boundary(gap_at, g_seg[s], g_seg[s - 1],
                                            deg, refine_tol)
            events.append(_make_event(sweep_result, pair, loc,
                                      (g_seg[s - 1], g_seg[s]), min_gap, deg))
        if not right_edge:
            loc, min_gap = _bisect_boundary(gap_at, g_seg[e], g_seg[e + 1],
                                            deg, refine_tol)
            events.append(_make_event(sweep_result, pair, loc,
                                      (g_seg[e], g_seg[e + 1]), min_gap, deg))

    # interior dips that never reach the tolerance on the grid
    for i in range(1, len(idx) - 1):
        if degenerate[i - 1] or degenerate[i] or degenerate[i + 1]:
            continue
        if gap_seg[i] < gap_seg[i - 1] and gap_seg[i] < gap_seg[i + 1]:
            lo, hi = g_seg[i - 1], g_seg[i + 1]
            loc, min_gap = _golden_min(gap_at, lo, hi, refine_tol)
            slope = (max(gap_seg[i - 1], gap_seg[i + 1]) - min_gap) / (hi - lo)
            ev = _make_event(sweep_result, pair, loc, (lo, hi), min_gap,
                             max(deg, 4.0 * slope * refine_tol))
            if ev is not None:
                events.append(ev)
    return events


def _make_event(sweep_result, pair, loc, bracket, min_gap, touch_tol):
    """Build an event, or None for a dip between unrelated levels.

    ``touch_tol`` absorbs the refinement resolution: a transversal
    crossing probed down to a bracket of width w still shows a residual
    gap of order slope * w, which must not demote it to "avoided".
    """
    grid = sweep_result.grid
    a, b = pair
    below = np.where((grid < bracket[0] + 1e-15) &
                     np.array([p.flag is None for p in sweep_result.points]))[0]
    above = np.where((grid > bracket[1] - 1e-15) &
                     np.array([p.flag is None for p in sweep_result.points]))[0]
    lab_b = lab_a = None
    if len(below) and sweep_result.points[below[-1]].labels:
        pt = sweep_result.points[below[-1]]
        lab_b = (pt.labels[a], pt.labels[b])
    if len(above) and sweep_result.points[above[0]].labels:
        pt = sweep_result.points[above[0]]
        lab_a = (pt.labels[a], pt.labels[b])

    if min_gap <= touch_tol:
        kind = "true_crossing"
    else:
        agree = None
        if lab_b is not None and lab_a is not None:
            agree_b = _labels_agree(*lab_b)
            agree_a = _labels_agree(*lab_a)
            if agree_b is not None and agree_a is not None:
                agree = agree_b and agree_a
        if agree is None:
            kind = "unresolved"
        elif agree:
            kind = "avoided"
        else:
            # levels of different symmetry passing near each other; the
            # gap stays open, so there is nothing to report
            return None
    return CrossingEvent(level_pair=pair, location=loc, bracket=bracket,
                         kind=kind, min_gap=min_gap,
                         labels_below=lab_b, labels_above=lab_a)


def _golden_min(f, lo, hi, tol):
    """Golden-section minimum of a unimodal gap; returns (location, value)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    best = (c, fc) if fc <= fd else (d, fd)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
        cand = (c, fc) if fc <= fd else (d, fd)
        if cand[1] < best[1]:
            best = cand
    return best


def _bisect_boundary(gap_at, g_true, g_false, deg, tol):
    """Bisect the point where the gap leaves the degeneracy tolerance."""
    min_gap = gap_at(g_true)
    while abs(g_false - g_true) > tol:
        mid = 0.5 * (g_true + g_false)
        gm = gap_at(mid)
        if gm <= deg:
            g_true = mid
            min_gap = min(min_gap, gm)
        else:
            g_false = mid
    return 0.5 * (g_true + g_false), min_gap


# ---------------------------------------------------------------------------
# derivatives and extrema

def derivative(grid: np.ndarray, values: np.ndarray, order: int):
    """Iterated central differences, O(step^2) accurate per application;
    the grid loses one point per side per order."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if order < 1 or order > 4:
        raise ValueError("derivative order must be between 1 and 4")
    if len(grid) != len(values):
        raise ValueError("grid and values must have equal length")
    if len(grid) <= 2 * order:
        raise ValueError("series too short for the requested order")
    steps = np.diff(grid)
    h = steps[0]
    if np.max(np.abs(steps - h)) > 1e-9 * max(abs(h), 1.0):
        raise ValueError("derivative requires a uniform grid")
    for _ in range(order):
        values = (values[2:] - values[:-2]) / (2.0 * h)
        grid = grid[1:-1]
    return grid, values


@dataclass(frozen=True)
class Extremum:
    location: float
    value: float
    kind: str  # "min" | "max"


def locate_extrema(grid: np.ndarray, values: np.ndarray) -> list[Extremum]:
    """Interior slope sign changes, refined by quadratic interpolation."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(grid) < 3:
        raise ValueError("need at least three points")
    out = []
    slopes = np.diff(values)
    for i in range(1, len(values) - 1):
        left, right = slopes[i - 1], slopes[i]
        if left > 0 > right:
            kind = "max"
        elif left < 0 < right:
            kind = "min"
        else:
            continue
        denom = values[i - 1] - 2.0 * values[i] + values[i + 1]
        h = grid[i] - grid[i - 1]
        offset = 0.5 * h * (values[i - 1] - values[i + 1]) / denom
        loc = grid[i] + offset
        val = values[i] - 0.125 * (values[i - 1] - values[i + 1]) ** 2 / denom
        out.append(Extremum(float(loc), float(val), kind))
    return out


# ---------------------------------------------------------------------------
# classification

@dataclass
class TransitionEvidence:
    gs_events: list
    es_events: list
    jump: float | None = None
    jump_location: float | None = None
    jump_tol: float | None = None
    argmax_location: float | None = None
    argmax_value: float | None = None
    derivative_order: int | None = None
    derivative_extrema: list = field(default_factory=list)


@dataclass
class TransitionReport:
    type: str  # "I" | "II" | "III" | "none"
    evidence: TransitionEvidence
    gs_lc: bool
    es_lc: bool
    concurrence_behavior: str


def classify(sweep_result: SweepResult, *, jump_tol: float | None = None,
             max_derivative_order: int = 4, pair: str | None = None) -> TransitionReport:
    """Decide transition type I / II / III / none from one sweep.

    I:   ground-state true crossing with a concurrence jump above
         ``jump_tol`` (default: ten times the median adjacent jump).
    II:  an excited-state true crossing whose location lies within two
         grid steps of the concurrence maximum.
    III: otherwise, some derivative of order <= ``max_derivative_order``
         has an interior extremum.
    """
    if sweep_result.k_levels < 3:
        raise ValueError("classification needs at least three levels")
    grid = sweep_result.grid
    step = sweep_result.grid_spec.step
    conc = sweep_result.concurrence(pair)
    valid = ~np.isnan(conc)
    if valid.sum() < 5:
        raise ValueError("too few valid sweep points to classify")

    adjacent = np.abs(np.diff(conc[valid]))
    tol = jump_tol if jump_tol is not None \
        else max(10.0 * float(np.median(adjacent)), 1e-8)

    gs_events = detect_crossings(sweep_result, 0, 1)
    es_events = []
    for a in range(1, sweep_result.k_levels - 1):
        es_events.extend(detect_crossings(sweep_result, a, a + 1))
    gs_true = [e for e in gs_events if e.kind == "true_crossing"]
    es_true = [e for e in es_events if e.kind == "true_crossing"]
    evidence = TransitionEvidence(gs_events=gs_events, es_events=es_events,
                                  jump_tol=tol)
    gs_lc = bool(gs_true)
    es_lc = bool(es_true)

    # Type I: concurrence jumps across a ground-state crossing
    for event in gs_true:
        below = np.where(valid & (grid <= event.location - 0.5 * step))[0]
        above = np.where(valid & (grid >= event.location + 0.5 * step))[0]
        if not len(below) or not len(above):
            continue
        jump = abs(conc[above[0]] - conc[below[-1]])
        if jump > tol:
            evidence.jump = float(jump)
            evidence.jump_location = event.location
            return TransitionReport("I", evidence, gs_lc, es_lc, "discontinuous")

    # Type II: excited-state crossing pinned to the concurrence maximum
    arg = int(np.nanargmax(conc))
    evidence.argmax_location = float(grid[arg])
    evidence.argmax_value = float(conc[arg])
    for event in es_true:
        if abs(grid[arg] - event.location) <= 2.0 * step + 1e-12:
            return TransitionReport("II", evidence, gs_lc, es_lc,
                                    "continuous, maximum at the crossing")

    # Type III: extremum in some low-order derivative
    for order in range(1, max_derivative_order + 1):
        if valid.sum() <= 2 * order + 2:
            break
        d_grid, d_vals = derivative(grid[valid], conc[valid], order)
        extrema = locate_extrema(d_grid, d_vals)
        if extrema:
            evidence.derivative_order = order
            evidence.derivative_extrema = extrema
            return TransitionReport(
                "III", evidence, gs_lc, es_lc,
                f"continuous, extremum in derivative of order {order}")

    return TransitionReport("none", evidence, gs_lc, es_lc, "featureless")


# ---------------------------------------------------------------------------
# finite-size drift of derivative extrema

@dataclass
class ScalingEntry:
    n_sites: int
    location: float
    value: float


@dataclass
class ScalingResult:
    derivative_order: int
    extremum_kind: str
    entries: list[ScalingEntry]
    skipped: list[tuple[int, str]]
    intercept: float | None
    slope: float | None
    residual_norm: float | None


def fit_inverse_size(sizes, locations):
    """Least-squares fit location = intercept + slope / N."""
    x = 1.0 / np.asarray(sizes, dtype=float)
    y = np.asarray(locations, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (intercept + slope * x)
    return float(intercept), float(slope), float(np.linalg.norm(resid))


def scaling_study(family: str, fixed_params: dict, swept: GridSpec,
                  sizes, derivative_order: int, *, geometry: str = "chain",
                  pairs=("nn",), k_levels: int = 2, space: str = "auto",
                  extremum_kind: str = "min", use_raw: bool = False,
                  options: SolverOptions = SolverOptions(),
                  threads: int = 1) -> ScalingResult:
    """Track the dominant derivative extremum of the concurrence with N.

    Differentiates the clamped concurrence by default (``use_raw`` flips
    to the unclamped value) and fits extremum locations against 1/N.
    """
    entries = []
    skipped = []
    for n in sizes:
        lattice = chain(n) if geometry == "chain" else ladder(n)
        result = sweep(family, fixed_params, swept, lattice, k_levels=k_levels,
                       pairs=pairs, space=space, options=options, threads=threads)
        conc = result.concurrence(raw=use_raw)
        valid = ~np.isnan(conc)
        if valid.sum() <= 2 * derivative_order + 2:
            skipped.append((n, "too few valid points"))
            continue
        d_grid, d_vals = derivative(result.grid[valid], conc[valid], derivative_order)
        extrema = [e for e in locate_extrema(d_grid, d_vals)
                   if e.kind == extremum_kind]
        if not extrema:
            skipped.append((n, f"no interior {extremum_kind}imum"))
            continue
        dominant = max(extrema, key=lambda e: abs(e.value))
        entries.append(ScalingEntry(n, dominant.location, dominant.value))
    if len(entries) >= 2:
        intercept, slope, resid = fit_inverse_size(
            [e.n_sites for e in entries], [e.location for e in entries])
    else:
        intercept = slope = resid = None
    return ScalingResult(derivative_order, extremum_kind, entries, skipped,
                         intercept, slope, resid)
