"""Truncated wavenumber lattices on Z^N (N = 1, 2).

Every coefficient vector and matrix in the library is laid out in the
order fixed here: multi-indices sorted by l1 degree |j_1|+...+|j_N|,
ties broken lexicographically on the components. Position 0 is always
the zero index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

MultiIndex = tuple[int, ...]


@dataclass(frozen=True)
class WavenumberLattice:
    """Ordered set of all j with max_i |j_i| <= J."""

    N: int
    J: int
    order: tuple[MultiIndex, ...]
    _pos: dict[MultiIndex, int] = field(repr=False)

    @property
    def m(self) -> int:
        return len(self.order)

    @property
    def index_array(self) -> np.ndarray:
        """m x N integer array of the multi-indices in lattice order."""
        return np.array(self.order, dtype=np.int64).reshape(self.m, self.N)


def build_lattice(N: int, J: int) -> WavenumberLattice:
    if N not in (1, 2):
        raise ValueError(f"lattice dimension must be 1 or 2, got {N}")
    if J < 0:
        raise ValueError(f"max wavenumber must be nonnegative, got {J}")
    rng = range(-J, J + 1)
    indices = [tuple(j) for j in product(rng, repeat=N)]
    indices.sort(key=lambda j: (sum(abs(c) for c in j), j))
    order = tuple(indices)
    pos = {j: k for k, j in enumerate(order)}
    return WavenumberLattice(N=N, J=J, order=order, _pos=pos)


def position_of(lat: WavenumberLattice, j: MultiIndex) -> int | None:
    """Linear position of j, or None when j is out of band.

    Absence is a value, not an error: generator assembly uses it to drop
    out-of-band couplings.
    """
    return lat._pos.get(tuple(j))


def shift(j: MultiIndex, delta: MultiIndex) -> MultiIndex:
    return tuple(a + b for a, b in zip(j, delta, strict=True))
