"""Ground-truth diagnostics: statistically bad vertices and planted distance."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..generators import PlantedInstance
from ..graph import Coloring
from .stages import neighbor_color_counts


def _confusion(C1: Coloring, C2: Coloring, k: int) -> np.ndarray:
    if C1.n != C2.n:
        raise ValueError("colorings have different lengths")
    if k > 8:
        raise ValueError("label permutations limited to k <= 8")
    M = np.zeros((k + 1, k + 1), dtype=np.int64)
    np.add.at(M, (C1.assign, C2.assign), 1)
    return M


def _best_agreement(M: np.ndarray, k: int) -> int:
    best = 0
    for perm in itertools.permutations(range(1, k + 1)):
        best = max(best, int(sum(M[i + 1, perm[i]] for i in range(k))))
    return best


def approx_distance(C1: Coloring, C2: Coloring, k: int | None = None) -> int:
    """Hamming distance minimized over relabelings of the colors."""
    k = k or max(C1.k, C2.k)
    if not (C1.is_total and C2.is_total):
        raise ValueError("approx_distance needs total colorings")
    return C1.n - _best_agreement(_confusion(C1, C2, k), k)


def partial_disagreement(C: Coloring, planted: Coloring, k: int | None = None) -> int:
    """Colored vertices of ``C`` that disagree with ``planted`` under the best relabeling."""
    k = k or max(C.k, planted.k)
    M = _confusion(C, planted, k)
    return C.num_colored - _best_agreement(M, k)


def compute_SB(inst: PlantedInstance, eps: float = 0.01) -> tuple[int, ...]:
    """Vertices whose neighbor count into some other planted class leaves ((1/k) +- eps) d.

    Counts are taken in the result graph; d is the host's average degree.
    """
    P = inst.planted
    k = P.k
    d = inst.host.average_degree()
    counts = neighbor_color_counts(inst.result, P.assign, k)[:, 1:].astype(float)
    lo, hi = (1 / k - eps) * d, (1 / k + eps) * d
    bad = (counts < lo) | (counts > hi)
    own = P.assign - 1
    bad[np.arange(P.n), own] = False
    return tuple((np.flatnonzero(bad.any(axis=1)) + 1).tolist())


@dataclass(frozen=True)
class DiagnosticReport:
    sb: tuple[int, ...]
    b: int | None
    distance: int | None

    @property
    def sb_size(self) -> int:
        return len(self.sb)

    def to_dict(self) -> dict:
        return {"sb_size": self.sb_size, "b": self.b, "distance": self.distance}


def diagnose(inst: PlantedInstance, coloring: Coloring | None = None, b: int | None = None,
             eps: float = 0.01) -> DiagnosticReport:
    dist = None
    if coloring is not None:
        if coloring.is_total:
            dist = approx_distance(coloring, inst.planted)
        else:
            dist = partial_disagreement(coloring, inst.planted) + len(coloring.free)
    return DiagnosticReport(compute_SB(inst, eps), b, dist)
