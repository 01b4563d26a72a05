"""Seed streams: a 64-bit master seed plus a path of purpose labels."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class Seed:
    """Deterministic seed with a derivation path.

    ``Seed(7).child("host")`` and ``Seed(7).child("plant")`` give independent
    streams; the same ``(value, path)`` always yields the same generator.
    """

    value: int
    path: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not 0 <= int(self.value) <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "value", int(self.value))
        object.__setattr__(self, "path", tuple(str(p) for p in self.path))

    def child(self, *labels: object) -> "Seed":
        return Seed(self.value, self.path + tuple(str(x) for x in labels))

    def digest(self) -> int:
        h = hashlib.blake2b(digest_size=16)
        h.update(self.value.to_bytes(8, "little"))
        for label in self.path:
            b = label.encode()
            h.update(len(b).to_bytes(4, "little"))
            h.update(b)
        return int.from_bytes(h.digest(), "little")

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.digest()))


def as_seed(seed: "Seed | int | None") -> Seed:
    if isinstance(seed, Seed):
        return seed
    return Seed(0 if seed is None else int(seed))


def as_rng(seed: "Seed | int | np.random.Generator | None") -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return as_seed(seed).rng()


def cell_seed(master: int, index: int) -> Seed:
    """Per-cell seed derived from (master seed, cell index) only."""
    h = hashlib.blake2b(f"{int(master)}:{int(index)}".encode(), digest_size=8)
    return Seed(int.from_bytes(h.digest(), "little"))
