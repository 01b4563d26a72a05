"""Tuning constants shared by the coloring stages."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace


class ClusteringFailed(RuntimeError):
    """No accepted sample of cluster centers within the attempt cap."""


class BruteForceAbort(RuntimeError):
    """Completion of the free vertices was abandoned.

    ``reason`` is ``"oversize"`` (a free component exceeded the cap) or
    ``"unsatisfiable"`` (some component has no consistent completion).
    """

    def __init__(self, reason: str, component: tuple[int, ...]):
        super().__init__(f"brute force aborted ({reason}) on component of size {len(component)}")
        self.reason = reason
        self.component = component


@dataclass(frozen=True)
class PipelineParams:
    """Stage parameters.

    The clustering radius is ``1 / (cluster_constant * n)`` in squared
    eigenvector distance.  ``cluster_size_slack`` and ``coverage_slack`` set
    the acceptance test ``|S_i| >= (1/3 - size_slack) n`` and
    ``sum |S_i| >= n - coverage_slack * n / d``.

    Cautious uncoloring uses ``uncolor_eps(d) = max(eps, uncolor_eps_floor /
    sqrt(d))`` (kept below 1/6): with ``eps = 0.01`` the degree rule sits
    inside the natural degree spread unless d is in the tens of thousands.
    The weak-class rule uses ``min(1/6, 1/3 - e) d`` with the uncapped
    ``e``, which is ``d/6`` unless d < 36 floor^2.  ``uncolor_eps_floor = 0``
    gives the unwidened rules.
    """

    eps: float = 0.01
    cluster_constant: float = 1.0
    cluster_size_slack: float = 0.1
    coverage_slack: float = 3.0
    uncolor_eps_floor: float = 1.0
    recolor_rounds_factor: float = 1.0
    recolor_rounds_cap: int = 300
    component_cap: int | None = None
    triplet_attempt_cap: int = 1000
    exhaustive_triplets: bool = False
    k: int = 3
    k_cluster_c1: float | None = None
    k_cluster_c2: float = 0.5
    k_cluster_c: float = 0.5
    degree_compensation: float | None = None

    def __post_init__(self):
        if not 0 < self.eps < 1 / 6:
            raise ValueError("eps must lie in (0, 1/6)")
        if self.uncolor_eps_floor < 0:
            raise ValueError("uncolor_eps_floor must be nonnegative")
        if self.cluster_constant <= 0:
            raise ValueError("cluster_constant must be positive")
        for name in ("recolor_rounds_cap", "triplet_attempt_cap"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.component_cap is not None and self.component_cap <= 0:
            raise ValueError("component_cap must be positive")
        if self.k < 2:
            raise ValueError("k must be at least 2")

    def _raw_eps(self, d: float) -> float:
        return self.eps if d <= 0 else max(self.eps, self.uncolor_eps_floor / math.sqrt(d))

    def uncolor_eps(self, d: float) -> float:
        return min(self._raw_eps(d), 0.16)

    def class_threshold(self, d: float) -> float:
        return d * min(1 / 6, max(0.0, 1 / 3 - self._raw_eps(d)))

    def cap_for(self, n: int) -> int:
        if self.component_cap is not None:
            return self.component_cap
        return max(1, math.ceil(math.log2(max(n, 2))))

    def c1(self, k: int) -> float:
        return self.k_cluster_c1 if self.k_cluster_c1 is not None else self.cluster_constant * 3 / k

    def compensation(self, k: int) -> float:
        return self.degree_compensation if self.degree_compensation is not None else k / (k - 1)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict | None) -> "PipelineParams":
        data = dict(data or {})
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown pipeline parameters: {sorted(unknown)}")
        return cls(**data)

    def updated(self, **kw) -> "PipelineParams":
        return replace(self, **kw)


def estimate_degree(G, k: int = 3, host=None, params: PipelineParams | None = None) -> float:
    """Host degree when known, else the input's average degree times k/(k-1)."""
    if host is not None:
        return host.average_degree()
    comp = (params or PipelineParams()).compensation(k)
    return G.average_degree() * comp
