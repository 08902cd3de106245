"""Degree of proper maps R^n -> R^n by counting regular preimages.

A :class:`MapSpec` carries the map, optionally its Jacobian, and a box
radius ``R`` such that ``|f(x)| > |y|`` outside ``[-R, R]^n`` for the target
values of interest (asserted by the caller).  Preimages are found by Newton's
method from a uniform grid of seeds in the box.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegreeJump, InputError, SingularRoot

__all__ = [
    "MapSpec",
    "Root",
    "regular_preimages",
    "degree_z",
    "degree_mod2",
    "homotopy_invariance_report",
    "check_box_exit",
    "polynomial_map",
    "polynomial_map_from_json",
    "builtin_map",
    "builtin_family",
    "BUILTIN_MAPS",
]

DEDUP_DIST = 1e-6
REGULAR_TOL = 1e-8


@dataclass(frozen=True)
class MapSpec:
    n: int
    f: Callable
    jac: Callable | None = None
    radius: float = 1.0
    name: str = ""

    def __call__(self, x) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.f(np.asarray(x, dtype=float)), dtype=float))

    def jacobian(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.jac is not None:
            return np.atleast_2d(np.asarray(self.jac(x), dtype=float))
        h = 1e-6 * max(1.0, float(np.max(np.abs(x))))
        cols = []
        for i in range(self.n):
            e = np.zeros(self.n)
            e[i] = h
            cols.append((self(x + e) - self(x - e)) / (2 * h))
        return np.stack(cols, axis=1)


@dataclass(frozen=True)
class Root:
    x: tuple
    det: float

    @property
    def sign(self) -> int:
        return 1 if self.det > 0 else -1


def _newton(f: MapSpec, y, x0, max_iter=60):
    x = np.array(x0, dtype=float)
    scale = max(1.0, float(np.linalg.norm(y)))
    for _ in range(max_iter):
        r = f(x) - y
        if np.linalg.norm(r) <= 1e-13 * scale:
            return x
        J = f.jacobian(x)
        try:
            dx = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            return None
        # keep steps within the box scale to avoid wild jumps from near-critical seeds
        n = np.linalg.norm(dx)
        if n > f.radius:
            dx *= f.radius / n
        x = x + dx
        if not np.all(np.isfinite(x)):
            return None
    r = f(x) - y
    return x if np.linalg.norm(r) <= 1e-10 * scale else None


def regular_preimages(f: MapSpec, y, grid_density: int = 16, tol: float = REGULAR_TOL) -> list:
    """All preimages of ``y`` in the box, with Jacobian determinants.

    Raises :class:`SingularRoot` if some preimage has ``|det J| < tol``.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.shape != (f.n,):
        raise InputError(f"target must have {f.n} components")
    if grid_density < 2:
        raise InputError("grid_density must be >= 2")
    axis = np.linspace(-f.radius, f.radius, grid_density)
    roots: list[np.ndarray] = []
    for seed in itertools.product(axis, repeat=f.n):
        x = _newton(f, y, seed)
        if x is None or np.max(np.abs(x)) > f.radius * (1 + 1e-9):
            continue
        if all(np.linalg.norm(x - r) > DEDUP_DIST for r in roots):
            roots.append(x)
    roots.sort(key=lambda r: tuple(r))
    out = []
    for x in roots:
        det = float(np.linalg.det(f.jacobian(x)))
        if abs(det) < tol:
            raise SingularRoot(f"preimage {x.tolist()} has |det J| = {abs(det):.2e} < {tol:.0e}")
        out.append(Root(tuple(float(c) for c in x), det))
    return out


def degree_z(f: MapSpec, y, grid_density: int = 16, tol: float = REGULAR_TOL) -> int:
    return sum(r.sign for r in regular_preimages(f, y, grid_density, tol))


def degree_mod2(f: MapSpec, y, grid_density: int = 16, tol: float = REGULAR_TOL) -> int:
    return len(regular_preimages(f, y, grid_density, tol)) % 2


def check_box_exit(f: MapSpec, y, samples: int = 64, seed=0) -> bool:
    """Spot check ``|f(x)| > |y|`` at random points on the boundary of the box."""
    rng = np.random.default_rng(seed)
    ny = float(np.linalg.norm(y))
    for _ in range(samples):
        x = rng.uniform(-f.radius, f.radius, size=f.n)
        k = rng.integers(f.n)
        x[k] = f.radius * rng.choice([-1.0, 1.0])
        if np.linalg.norm(f(x)) <= ny:
            return False
    return True


def homotopy_invariance_report(
    family: Callable,
    ts,
    ys,
    grid_density: int = 16,
    tol: float = REGULAR_TOL,
    seed=0,
    perturb: float = 1e-3,
) -> dict:
    """Degrees of ``family(t)`` at the given parameters and target values.

    A target that turns out to be a critical value of some ``f_t`` is nudged
    by a small seeded random offset (regular values are dense).  Any change
    of ``degree_z`` or ``degree_mod2`` across the table, or a failed box-exit
    spot check, raises :class:`DegreeJump` naming ``(t, y)``.
    """
    rng = np.random.default_rng(seed)
    rows = []
    reference = None
    for t in ts:
        f = family(float(t))
        for y in ys:
            y_used = np.atleast_1d(np.asarray(y, dtype=float))
            for _ in range(20):
                try:
                    roots = regular_preimages(f, y_used, grid_density, tol)
                    break
                except SingularRoot:
                    y_used = y_used + perturb * rng.normal(size=y_used.shape)
            else:
                raise DegreeJump("no regular value found near target", t=float(t), y=list(map(float, y)))
            if not check_box_exit(f, y_used):
                raise DegreeJump("box-exit check failed: map not proper on the box", t=float(t), y=y_used.tolist())
            dz = sum(r.sign for r in roots)
            d2 = len(roots) % 2
            row = {"t": float(t), "y": y_used.tolist(), "preimages": len(roots), "degree_z": dz, "degree_mod2": d2}
            rows.append(row)
            if reference is None:
                reference = (dz, d2)
            elif (dz, d2) != reference:
                raise DegreeJump(
                    f"degree changed to {(dz, d2)} from {reference}", t=float(t), y=y_used.tolist()
                )
    return {"degree_z": reference[0], "degree_mod2": reference[1], "table": rows, "constant": True}


# --------------------------------------------------------------------------
# polynomial and built-in maps
# --------------------------------------------------------------------------

def polynomial_map(components, radius: float, name: str = "polynomial") -> MapSpec:
    """Map whose ``i``-th component is ``sum coef * prod x_j^e_j`` over ``[coef, [e_1..e_n]]`` terms."""
    comps = [[(float(c), tuple(int(e) for e in exps)) for c, exps in comp] for comp in components]
    n = len(comps)
    for comp in comps:
        for _, exps in comp:
            if len(exps) != n or min(exps, default=0) < 0:
                raise InputError("each term needs n nonnegative exponents")

    coefs = np.array([c for comp in comps for c, _ in comp], dtype=float)
    owner = np.array([i for i, comp in enumerate(comps) for _ in comp], dtype=int)
    exps = np.array([e for comp in comps for _, e in comp], dtype=int).reshape(-1, n)
    # exponents after differentiating in x_j; terms without x_j drop out through the factor exps[:, j]
    lowered = [np.maximum(exps - np.eye(n, dtype=int)[j], 0) for j in range(n)]

    def f(x):
        mono = np.prod(x[None, :] ** exps, axis=1)
        return np.bincount(owner, coefs * mono, minlength=n)

    def jac(x):
        J = np.empty((n, n))
        for j in range(n):
            mono = exps[:, j] * np.prod(x[None, :] ** lowered[j], axis=1)
            J[:, j] = np.bincount(owner, coefs * mono, minlength=n)
        return J

    return MapSpec(n, f, jac, float(radius), name)


def polynomial_map_from_json(text_or_dict) -> MapSpec:
    data = json.loads(text_or_dict) if isinstance(text_or_dict, str) else text_or_dict
    return polynomial_map(data["components"], data["radius"], data.get("name", "polynomial"))


def _cubic(s: float = 1.0) -> MapSpec:
    # x^3 - 3 s x
    return polynomial_map([[[1.0, [3]], [-3.0 * s, [1]]]], radius=3.0, name="cubic")


def _square() -> MapSpec:
    # z -> z^2 in real coordinates
    return polynomial_map(
        [[[1.0, [2, 0]], [-1.0, [0, 2]]], [[2.0, [1, 1]]]], radius=3.0, name="square"
    )


def _identity(n: int = 2) -> MapSpec:
    return MapSpec(n, lambda x: x, lambda x: np.eye(n), 3.0, "identity")


def _rotation(t: float) -> MapSpec:
    c, s = np.cos(np.pi * t), np.sin(np.pi * t)
    M = np.array([[c, -s], [s, c]])
    return MapSpec(2, lambda x: M @ x, lambda x: M, 3.0, "rotation")


BUILTIN_MAPS = {"cubic": _cubic, "square": _square, "identity": _identity}


def builtin_map(name: str, **params) -> MapSpec:
    if name not in BUILTIN_MAPS:
        raise InputError(f"unknown map {name!r}; choose from {sorted(BUILTIN_MAPS)}")
    return BUILTIN_MAPS[name](**params)


def builtin_family(name: str) -> Callable:
    """Homotopies: ``cubic-family`` is ``x^3 - 3 (1 - t) x``, ``rotation`` is rotation by ``t pi``."""
    if name == "cubic-family":
        return lambda t: _cubic(1.0 - t)
    if name == "rotation":
        return _rotation
    if name == "constant":
        return lambda t: _cubic(1.0)
    raise InputError(f"unknown family {name!r}")
