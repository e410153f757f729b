"""Splittable, reproducible seeding.

Every random stream in the package comes from a :class:`Seed`: a 64-bit root
plus a derivation path of integers (module id, grid index, trial index, ...).
Streams are numpy ``PCG64`` generators keyed by ``SeedSequence(root,
spawn_key=path)``, so identical ``(root, path)`` always yields identical draws
and sibling paths are statistically independent.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

# Module ids used as the first component of derivation paths.
GRAPH = 1
ORDERING = 2
TREE = 3
STITCH = 4
HARNESS = 5
SAMPLING = 6

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class Seed:
    root: int
    path: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= self.root <= _MASK64:
            raise ValueError(f"root seed must be a 64-bit unsigned integer, got {self.root}")
        if any(int(i) < 0 for i in self.path):
            raise ValueError("derivation path entries must be non-negative")
        object.__setattr__(self, "path", tuple(int(i) for i in self.path))

    def child(self, *idx: int) -> "Seed":
        return Seed(self.root, self.path + tuple(idx))

    def sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.root, spawn_key=self.path)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.sequence()))

    def key64(self) -> int:
        """A single 64-bit word derived from this seed (for hash-based streams)."""
        return int(self.sequence().generate_state(1, np.uint64)[0])


SeedLike = Union[Seed, int]


def as_seed(seed: SeedLike) -> Seed:
    if isinstance(seed, Seed):
        return seed
    if isinstance(seed, (int, np.integer)) and not isinstance(seed, bool):
        return Seed(int(seed) & _MASK64)
    raise TypeError(f"expected Seed or int, got {type(seed).__name__}")
