"""End-to-end 3-coloring drivers."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..generators import PlantedInstance
from ..graph import Coloring, Graph, is_legal_coloring
from ..rng import as_seed
from ..twosat import ListColoringProblem, solve_list_coloring
from .clustering import spectral_clustering
from .diagnostics import approx_distance, partial_disagreement
from .params import BruteForceAbort, ClusteringFailed, PipelineParams, estimate_degree
from .stages import brute_force_components, cautious_uncolor, iterative_recolor, safe_recolor


@dataclass
class StageTrace:
    colorings: dict[str, Coloring] = field(default_factory=dict)
    timings_ms: dict[str, float] = field(default_factory=dict)
    disagreement: dict[str, int] = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def record(self, name: str, C: Coloring, t0: float, planted: Coloring | None) -> None:
        self.colorings[name] = C
        self.timings_ms[name] = (time.perf_counter() - t0) * 1000
        if planted is not None:
            if C.is_total:
                self.disagreement[name] = approx_distance(C, planted)
            else:
                self.disagreement[name] = partial_disagreement(C, planted)


@dataclass
class ColoringResult:
    coloring: Coloring
    complete: bool
    legal: bool
    failure: str | None
    trace: StageTrace
    d: float

    @property
    def success(self) -> bool:
        return self.complete and self.legal

    @property
    def b(self) -> int | None:
        C = self.trace.colorings.get("uncolor")
        return None if C is None else len(C.free)

    @property
    def total_ms(self) -> float:
        return sum(self.trace.timings_ms.values())


def _unpack(G, d, planted, host, k, params):
    if isinstance(G, PlantedInstance):
        inst = G
        G = inst.result
        planted = inst.planted if planted is None else planted
        host = inst.host if host is None else host
        if d is None:
            d = inst.d
    if d is None:
        d = estimate_degree(G, k, host=host, params=params)
    return G, float(d), planted


def _finish(G: Graph, C: Coloring, failure, trace, d) -> ColoringResult:
    complete = C.is_total
    legal = is_legal_coloring(G, C)[0] if complete else False
    if complete and failure is None and not legal:
        failure = "illegal"
    return ColoringResult(C, complete, legal, failure, trace, d)


def _first_stages(G, d, p, seed, planted, trace) -> Coloring:
    t0 = time.perf_counter()
    try:
        C1 = spectral_clustering(G, p, d=d, seed=as_seed(seed).child("cluster"))
    except ClusteringFailed as exc:
        # the later stages can still repair an arbitrary start
        trace.notes["cluster_failed"] = str(exc)
        C1 = Coloring(3, np.ones(G.n, dtype=np.int64))
    trace.record("cluster", C1, t0, planted)
    t0 = time.perf_counter()
    C2 = iterative_recolor(G, C1, d, p)
    trace.record("recolor", C2, t0, planted)
    t0 = time.perf_counter()
    C3 = cautious_uncolor(G, C2, d, p)
    trace.record("uncolor", C3, t0, planted)
    t0 = time.perf_counter()
    C4 = safe_recolor(G, C3)
    trace.record("safe", C4, t0, planted)
    return C4


def color_AR(G, d: float | None = None, params: PipelineParams | None = None, seed=0,
             planted: Coloring | None = None, host: Graph | None = None) -> ColoringResult:
    """Spectral clustering, iterative recoloring, cautious uncoloring, safe
    recoloring, then brute force on the remaining free components.

    ``G`` may be a graph or a :class:`PlantedInstance`; in the latter case the
    planted coloring is used for the trace's disagreement counts only.
    """
    p = params or PipelineParams()
    G, d, planted = _unpack(G, d, planted, host, 3, p)
    trace = StageTrace()
    C4 = _first_stages(G, d, p, seed, planted, trace)
    t0 = time.perf_counter()
    try:
        C5 = brute_force_components(G, C4, p)
    except BruteForceAbort as exc:
        trace.notes["abort_component_size"] = len(exc.component)
        trace.record("brute", C4, t0, planted)
        return _finish(G, C4, f"brute:{exc.reason}", trace, d)
    trace.record("brute", C5, t0, planted)
    return _finish(G, C5, None, trace, d)


def _f0(G: Graph, C: Coloring) -> list[int]:
    col = C.assign
    return [v for v in C.free if not any(col[w - 1] for w in G.neighbors(v))]


def complete_by_guessing(G: Graph, C: Coloring) -> tuple[Coloring | None, int | None]:
    """Color the free vertices without colored neighbors with one guessed
    color, then finish the rest as a 2-list coloring.

    Guesses are tried in order 1, 2, 3; returns the first legal completion and
    its guess, or ``(None, None)``.
    """
    idx = np.asarray(_f0(G, C), dtype=np.int64) - 1
    for guess in (1, 2, 3):
        col = C.assign.copy()
        col[idx] = guess
        trial = Coloring(3, col)
        if not is_legal_coloring(G, trial)[0]:
            continue
        done = solve_list_coloring(ListColoringProblem.from_partial(G, trial))
        if done is not None:
            return done, guess
    return None, None


def color_RA(G, d: float | None = None, params: PipelineParams | None = None, seed=0,
             planted: Coloring | None = None, host: Graph | None = None) -> ColoringResult:
    """The same first four stages, then guess a color for the free vertices with
    no colored neighbor and finish the rest as a 2-list coloring via 2SAT.

    Returns the partial coloring (``complete`` false) if all three guesses fail.
    """
    p = params or PipelineParams()
    G, d, planted = _unpack(G, d, planted, host, 3, p)
    trace = StageTrace()
    C4 = _first_stages(G, d, p, seed, planted, trace)
    t0 = time.perf_counter()
    if C4.is_total:
        trace.record("twosat", C4, t0, planted)
        return _finish(G, C4, None, trace, d)
    F0 = _f0(G, C4)
    trace.notes["f0_size"] = len(F0)
    done, guess = complete_by_guessing(G, C4)
    if done is not None:
        trace.notes["guess"] = guess
        trace.record("twosat", done, t0, planted)
        return _finish(G, done, None, trace, d)
    trace.record("twosat", C4, t0, planted)
    return _finish(G, C4, "twosat:all-guesses-failed", trace, d)
