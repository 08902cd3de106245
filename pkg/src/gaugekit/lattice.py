"""Periodic cubical lattices T^d and their cells.

Conventions
-----------
* Directions are 0-based internally (``mu = 0..dim-1``).  Signed directions
  in paths and boundaries are 1-based, ``+-(mu + 1)``, so that the sign is
  never ambiguous.
* Sites are enumerated lexicographically with ``x_1`` fastest.  Site fields
  are numpy arrays of shape ``sizes`` (axis ``mu`` is ``x_mu``); their
  canonical flat order is Fortran order.
* Edge ``(x, mu)`` has index ``mu * V + site(x)``; plaquette ``(x; mu < nu)``
  has index ``pair * V + site(x)`` with pairs in lexicographic order; cubes
  likewise with triples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb, prod

import numpy as np

from .errors import BadDimension, BadIndex, BadPath, BadSize

__all__ = ["TorusLattice", "LatticePath", "build_torus", "plaquette_boundary", "cube_faces"]


@dataclass(frozen=True)
class TorusLattice:
    dim: int
    sizes: tuple
    pairs: tuple = field(init=False, repr=False)
    triples: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.dim not in (2, 3, 4):
            raise BadDimension(f"dimension must be 2, 3 or 4, got {self.dim}")
        sizes = tuple(int(n) for n in self.sizes)
        if len(sizes) != self.dim:
            raise BadSize(f"expected {self.dim} extents, got {len(sizes)}")
        if any(n < 2 for n in sizes):
            raise BadSize(f"every extent must be >= 2, got {sizes}")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "pairs", tuple(itertools.combinations(range(self.dim), 2)))
        object.__setattr__(self, "triples", tuple(itertools.combinations(range(self.dim), 3)))

    # counts
    @property
    def nsites(self) -> int:
        return prod(self.sizes)

    @property
    def nedges(self) -> int:
        return self.dim * self.nsites

    @property
    def nplaquettes(self) -> int:
        return comb(self.dim, 2) * self.nsites

    @property
    def ncubes(self) -> int:
        return comb(self.dim, 3) * self.nsites

    # sites
    def reduce(self, x) -> tuple:
        return tuple(int(c) % n for c, n in zip(x, self.sizes))

    def site_index(self, x) -> int:
        x = self.reduce(x)
        idx, stride = 0, 1
        for c, n in zip(x, self.sizes):
            idx += c * stride
            stride *= n
        return idx

    def site_coords(self, idx: int) -> tuple:
        if not 0 <= idx < self.nsites:
            raise BadIndex(f"site index {idx} out of range")
        out = []
        for n in self.sizes:
            out.append(idx % n)
            idx //= n
        return tuple(out)

    def step(self, x, mu: int, sign: int = 1) -> tuple:
        y = list(x)
        y[mu] += sign
        return self.reduce(y)

    def sites(self):
        """All site coordinates in canonical order."""
        return [self.site_coords(i) for i in range(self.nsites)]

    # cells
    def edge_index(self, x, mu: int) -> int:
        return mu * self.nsites + self.site_index(x)

    def plaquette_index(self, x, mu: int, nu: int) -> int:
        if not 0 <= mu < nu < self.dim:
            raise BadIndex(f"plaquette needs 0 <= mu < nu < {self.dim}")
        return self.pairs.index((mu, nu)) * self.nsites + self.site_index(x)

    def plaquette(self, p: int):
        """Decode a plaquette index into ``(x, mu, nu)``."""
        if not 0 <= p < self.nplaquettes:
            raise BadIndex(f"plaquette index {p} out of range")
        pair, site = divmod(p, self.nsites)
        mu, nu = self.pairs[pair]
        return self.site_coords(site), mu, nu

    def cube_index(self, x, mu: int, nu: int, rho: int) -> int:
        return self.triples.index((mu, nu, rho)) * self.nsites + self.site_index(x)

    def cube(self, c: int):
        if self.dim < 3:
            raise BadDimension("cubes need dimension >= 3")
        if not 0 <= c < self.ncubes:
            raise BadIndex(f"cube index {c} out of range")
        t, site = divmod(c, self.nsites)
        return (self.site_coords(site),) + self.triples[t]


@dataclass(frozen=True)
class LatticePath:
    """A path of unit steps; ``steps`` holds signed 1-based directions."""

    start: tuple
    steps: tuple

    def __post_init__(self):
        object.__setattr__(self, "start", tuple(int(c) for c in self.start))
        object.__setattr__(self, "steps", tuple(int(s) for s in self.steps))

    def validate(self, lattice: TorusLattice) -> None:
        if len(self.start) != lattice.dim:
            raise BadPath("start site has wrong dimension")
        for s in self.steps:
            if s == 0 or abs(s) > lattice.dim:
                raise BadPath(f"invalid step {s}")

    def sites(self, lattice: TorusLattice) -> list:
        self.validate(lattice)
        x = lattice.reduce(self.start)
        out = [x]
        for s in self.steps:
            x = lattice.step(x, abs(s) - 1, 1 if s > 0 else -1)
            out.append(x)
        return out

    def end(self, lattice: TorusLattice) -> tuple:
        return self.sites(lattice)[-1]

    def is_loop(self, lattice: TorusLattice) -> bool:
        return self.end(lattice) == lattice.reduce(self.start)

    def signed_edges(self, lattice: TorusLattice) -> list:
        """Traversed edges as ``(base site of stored edge, signed direction)``."""
        out = []
        x = lattice.reduce(self.start)
        for s in self.steps:
            mu = abs(s) - 1
            if s > 0:
                out.append((x, s))
                x = lattice.step(x, mu, 1)
            else:
                x = lattice.step(x, mu, -1)
                out.append((x, s))
        return out

    def __add__(self, other: "LatticePath") -> "LatticePath":
        return LatticePath(self.start, self.steps + other.steps)

    def reversed(self, lattice: TorusLattice) -> "LatticePath":
        return LatticePath(self.end(lattice), tuple(-s for s in reversed(self.steps)))

    @classmethod
    def plaquette(cls, lattice: TorusLattice, p: int) -> "LatticePath":
        x, mu, nu = lattice.plaquette(p)
        return cls(x, (mu + 1, nu + 1, -(mu + 1), -(nu + 1)))

    @classmethod
    def axis_loop(cls, lattice: TorusLattice, mu: int, base=None) -> "LatticePath":
        base = (0,) * lattice.dim if base is None else tuple(base)
        return cls(base, (mu + 1,) * lattice.sizes[mu])


def build_torus(dim: int, sizes) -> TorusLattice:
    return TorusLattice(dim, tuple(sizes))


def plaquette_boundary(lattice: TorusLattice, p: int) -> list:
    """The four signed edges of plaquette ``p``, counterclockwise from its corner.

    ``[(x, +mu), (x + mu, +nu), (x + nu, -mu), (x, -nu)]`` where each site is
    the base of the stored edge.
    """
    x, mu, nu = lattice.plaquette(p)
    return [
        (x, mu + 1),
        (lattice.step(x, mu), nu + 1),
        (lattice.step(x, nu), -(mu + 1)),
        (x, -(nu + 1)),
    ]


def cube_faces(lattice: TorusLattice, c: int) -> list:
    """Six ``(plaquette index, sign)`` pairs forming the oriented boundary of cube ``c``."""
    x, mu, nu, rho = lattice.cube(c)
    axes = (mu, nu, rho)
    faces = []
    for i, a in enumerate(axes):
        rest = tuple(b for b in axes if b != a)
        sign = 1 if i % 2 == 0 else -1
        faces.append((lattice.plaquette_index(lattice.step(x, a), *rest), sign))
        faces.append((lattice.plaquette_index(x, *rest), -sign))
    return faces


def shift(field_array: np.ndarray, mu: int, step: int = 1, offset: int = 0) -> np.ndarray:
    """Value of a site field at ``x + step * e_mu``, as a field indexed by ``x``.

    ``offset`` is the number of leading non-site axes of ``field_array``.
    """
    return np.roll(field_array, -step, axis=offset + mu)
