"""Staggered 1-D mesh: nodes x_i and half nodes x_{i+1/2}.

Even-parity unknowns, temperatures and group densities live on the half
nodes (cell centers); odd-parity unknowns and first moments live on the
nodes.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class StaggeredMesh:
    length: float
    num_cells: int
    nodes: np.ndarray = field(init=False, repr=False)
    centers: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.length > 0.0:
            raise ValueError("length must be strictly positive")
        if self.num_cells < 3:
            raise ValueError("need at least 3 cells")
        nodes = np.linspace(0.0, self.length, self.num_cells + 1)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "centers", 0.5 * (nodes[:-1] + nodes[1:]))

    @property
    def dx(self):
        return self.length / self.num_cells
