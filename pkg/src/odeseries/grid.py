"""Uniform sampling grid on the solve interval."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class Grid:
    a: float
    b: float
    n_nodes: int

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"interval [{self.a}, {self.b}] must have a < b")
        if self.n_nodes < 3:
            raise ValueError("grid needs at least 3 nodes")
        if self.n_nodes % 2 == 0:
            # odd node count = even interval count, required by Simpson pairing
            raise ValueError(f"grid node count must be odd, got {self.n_nodes}")

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n_nodes)

    @property
    def spacing(self) -> float:
        return (self.b - self.a) / (self.n_nodes - 1)

    def index_of(self, x: float) -> int:
        """Index of the node equal to x; x must lie on the grid."""
        k = round((x - self.a) / self.spacing)
        if k < 0 or k >= self.n_nodes or abs(self.nodes[k] - x) > 1e-9 * (self.b - self.a):
            raise ValueError(f"x = {x!r} is not a node of the grid")
        return int(k)
