"""Chern-Simons functional of SU(2) connections on S^3 by quadrature.

S^3 is the unit quaternions.  Connections are written in the coframe
``theta^a`` dual to the invariant vector fields ``V_a(x) = x e_a``
(``e_1, e_2, e_3 = i, j, k``), so the Maurer-Cartan form ``g^-1 dg`` of the
identity map has constant coefficients ``c_a = e_a``.  With
``[V_a, V_b] = 2 eps_abc V_c`` the structure equations read

    d theta^1 = -2 theta^2 ^ theta^3   (and cyclic),

and for ``A = sum_a c_a theta^a``

    F_ab = V_a c_b - V_b c_a - 2 eps_abc c_c + [c_a, c_b],
    tr(A ^ dA + 2/3 A^3)(V_1, V_2, V_3)
        = sum_cyc tr(c_a (dA)_bc) + 2 tr(c_1 [c_2, c_3]).

For ``A = lambda theta`` this integrates to ``3 lambda^2 - 2 lambda^3`` after
the ``1 / 8 pi^2`` normalisation.

The grid uses Hopf coordinates

    x = (cos eta cos xi1, cos eta sin xi1, sin eta cos xi2, sin eta sin xi2),

with ``eta`` on half-offset nodes of ``(0, pi/2)``.  In ``t = cos 2 eta`` the
volume form is ``dt dxi1 dxi2 / 4`` and the eta nodes are Chebyshev points,
so eta is integrated with Fejer's first rule and the angles with the
(spectrally accurate) periodic midpoint rule.  Directional derivatives use
fourth-order central differences; ghost layers beyond the poles come from
the reflections ``eta -> -eta`` (``xi2 -> xi2 + pi``) and
``eta -> pi - eta`` (``xi1 -> xi1 + pi``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .chern import ChernReport
from .errors import GridTooCoarse, InputError, MismatchedLattice, TooRough
from .group import qconj, qmul, qnormalize

__all__ = [
    "S3Grid",
    "InvariantFrameForm",
    "GroupMap",
    "cs_value",
    "curvature_form",
    "gauge_act",
    "map_degree",
    "cs_gradient_check",
    "zero_form",
    "lambda_theta",
    "random_form",
    "identity_map",
    "constant_map",
    "square_map",
    "map_product",
]

_E = np.eye(4)[1:]  # i, j, k as quaternions


def _fejer1_weights(n: int) -> np.ndarray:
    """Fejer's first rule on ``t_k = cos((2k+1) pi / 2n)``; weights sum to 2."""
    theta = (2 * np.arange(n) + 1) * np.pi / (2 * n)
    j = np.arange(1, n // 2 + 1)
    s = np.cos(2 * np.outer(theta, j)) / (4 * j**2 - 1)
    return (2.0 / n) * (1.0 - 2.0 * s.sum(axis=1))


@dataclass(frozen=True, eq=False)
class S3Grid:
    """Hopf-coordinate grid on S^3 with quadrature weights and the invariant frame.

    Attributes (all derived from the three resolutions):

    points : (n_eta, n_xi1, n_xi2, 4) quaternions
    weights : (n_eta, n_xi1, n_xi2), positive, summing to 2 pi^2
    frame : (3, n_eta, n_xi1, n_xi2, 4), ``V_a = x e_a``
    coeff : (3, 3, ...) with ``V_a = sum_k coeff[a, k] d/du_k`` in coordinates
        ``u = (eta, xi1, xi2)``
    """

    n_eta: int = 24
    n_xi1: int = 48
    n_xi2: int = 48
    points: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)
    frame: np.ndarray = field(init=False, repr=False)
    coeff: np.ndarray = field(init=False, repr=False)
    steps: tuple = field(init=False, repr=False)

    def __post_init__(self):
        n0, n1, n2 = int(self.n_eta), int(self.n_xi1), int(self.n_xi2)
        if n0 < 4 or n1 < 8 or n2 < 8:
            raise InputError("grid needs n_eta >= 4 and n_xi >= 8")
        if n1 % 2 or n2 % 2:
            raise InputError("angular resolutions must be even (pole reflections shift by pi)")
        h0, h1, h2 = (np.pi / 2) / n0, 2 * np.pi / n1, 2 * np.pi / n2
        eta = (np.arange(n0) + 0.5) * h0
        xi1 = np.arange(n1) * h1
        xi2 = np.arange(n2) * h2
        E, X1, X2 = np.meshgrid(eta, xi1, xi2, indexing="ij")
        ce, se = np.cos(E), np.sin(E)
        c1, s1, c2, s2 = np.cos(X1), np.sin(X1), np.cos(X2), np.sin(X2)
        pts = np.stack([ce * c1, ce * s1, se * c2, se * s2], axis=-1)
        zero = np.zeros_like(E)
        tangents = [
            np.stack([-se * c1, -se * s1, ce * c2, ce * s2], axis=-1),
            np.stack([-ce * s1, ce * c1, zero, zero], axis=-1),
            np.stack([zero, zero, -se * s2, se * c2], axis=-1),
        ]
        sq_norms = [np.ones_like(E), ce**2, se**2]
        frame = np.stack([qmul(pts, e) for e in _E])
        coeff = np.empty((3, 3) + E.shape)
        for a in range(3):
            for k in range(3):
                coeff[a, k] = np.sum(frame[a] * tangents[k], axis=-1) / sq_norms[k]
        # t = cos 2 eta runs from 1 to -1 over the nodes; dvol = dt dxi1 dxi2 / 4
        w_eta = _fejer1_weights(n0)
        weights = 0.25 * w_eta[:, None, None] * h1 * h2 * np.ones(E.shape)
        for name, val in [("points", pts), ("weights", weights), ("frame", frame), ("coeff", coeff)]:
            val.flags.writeable = False
            object.__setattr__(self, name, val)
        object.__setattr__(self, "n_eta", n0)
        object.__setattr__(self, "n_xi1", n1)
        object.__setattr__(self, "n_xi2", n2)
        object.__setattr__(self, "steps", (h0, h1, h2))

    @property
    def shape(self) -> tuple:
        return (self.n_eta, self.n_xi1, self.n_xi2)

    @property
    def resolution(self) -> tuple:
        return self.shape

    def coarsened(self) -> "S3Grid":
        """Grid with every resolution halved (rounded to keep angles even)."""
        half = lambda n: max(8, 2 * (n // 4))
        return S3Grid(max(4, self.n_eta // 2), half(self.n_xi1), half(self.n_xi2))

    def integrate(self, density: np.ndarray) -> float:
        return float(np.sum(self.weights * density))

    def __eq__(self, other):
        return isinstance(other, S3Grid) and self.shape == other.shape

    def __hash__(self):
        return hash(self.shape)

    # ------------------------------------------------------------------
    # differentiation
    # ------------------------------------------------------------------
    def _pad_eta(self, f: np.ndarray) -> np.ndarray:
        """Two ghost layers on each side of the eta axis (axis 0)."""
        n1, n2 = self.n_xi1 // 2, self.n_xi2 // 2
        lo = np.roll(f[1::-1], n2, axis=2)  # eta_{-1}, eta_{-2} mirror eta_0, eta_1
        hi = np.roll(f[:-3:-1], n1, axis=1)
        return np.concatenate([lo, f, hi], axis=0)

    def partials(self, f: np.ndarray) -> list:
        """Coordinate partials of a sampled function (extra trailing axes allowed)."""
        h0, h1, h2 = self.steps
        g = self._pad_eta(f)
        d0 = (-g[4:] + 8 * g[3:-1] - 8 * g[1:-3] + g[:-4]) / (12 * h0)
        out = [d0]
        for axis, h in ((1, h1), (2, h2)):
            p1, m1 = np.roll(f, -1, axis), np.roll(f, 1, axis)
            p2, m2 = np.roll(f, -2, axis), np.roll(f, 2, axis)
            out.append((-p2 + 8 * p1 - 8 * m1 + m2) / (12 * h))
        return out

    def directional(self, f: np.ndarray) -> np.ndarray:
        """``V_a f`` for a = 1..3, stacked on a new leading axis."""
        parts = self.partials(f)
        extra = f.ndim - 3
        out = []
        for a in range(3):
            acc = 0.0
            for k in range(3):
                c = self.coeff[a, k].reshape(self.shape + (1,) * extra)
                acc = acc + c * parts[k]
            out.append(acc)
        return np.stack(out)


@dataclass(frozen=True, eq=False)
class InvariantFrameForm:
    """su(2)-valued 1-form ``sum_a c_a theta^a``; ``coeffs`` has shape ``grid + (3, 3)``.

    ``coeffs[..., a, :]`` is the imaginary quaternion ``c_a``.  ``source``, if
    given, maps an array of points ``(..., 4)`` to coefficients ``(..., 3, 3)``
    and allows resampling on other grids.
    """

    grid: S3Grid
    coeffs: np.ndarray
    source: Callable | None = None

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != self.grid.shape + (3, 3):
            raise InputError(f"coefficients must have shape {self.grid.shape + (3, 3)}, got {c.shape}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_function(cls, grid: S3Grid, fn: Callable) -> "InvariantFrameForm":
        return cls(grid, fn(grid.points), fn)

    def resample(self, grid: S3Grid) -> "InvariantFrameForm":
        if self.source is None:
            raise InputError("form has no source function to resample")
        return InvariantFrameForm.from_function(grid, self.source)

    def __add__(self, other: "InvariantFrameForm") -> "InvariantFrameForm":
        _same_grid(self.grid, other.grid)
        src = None
        if self.source is not None and other.source is not None:
            f, g = self.source, other.source
            src = lambda p: f(p) + g(p)
        return InvariantFrameForm(self.grid, self.coeffs + other.coeffs, src)

    def scaled(self, s: float) -> "InvariantFrameForm":
        f = self.source
        return InvariantFrameForm(self.grid, s * self.coeffs, None if f is None else (lambda p: s * f(p)))

    def to_dict(self) -> dict:
        return {"grid": list(self.grid.shape), "coeffs": self.coeffs.tolist()}


@dataclass(frozen=True, eq=False)
class GroupMap:
    """Map S^3 -> SU(2) sampled on a grid; ``values`` has shape ``grid + (4,)``."""

    grid: S3Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape + (4,):
            raise InputError(f"map values must have shape {self.grid.shape + (4,)}")
        object.__setattr__(self, "values", qnormalize(v))

    def to_dict(self) -> dict:
        return {"grid": list(self.grid.shape), "values": self.values.tolist()}


def _same_grid(g1: S3Grid, g2: S3Grid):
    if g1 != g2:
        raise MismatchedLattice("objects live on different grids")


# --------------------------------------------------------------------------
# presets
# --------------------------------------------------------------------------

def zero_form(grid: S3Grid) -> InvariantFrameForm:
    return InvariantFrameForm.from_function(grid, lambda p: np.zeros(p.shape[:-1] + (3, 3)))


def lambda_theta(grid: S3Grid, lam: float) -> InvariantFrameForm:
    """``lam`` times the Maurer-Cartan form: constant ``c_a = lam e_a``."""
    return InvariantFrameForm.from_function(
        grid, lambda p: np.broadcast_to(lam * np.eye(3), p.shape[:-1] + (3, 3)).copy()
    )


def random_form(grid: S3Grid, seed, amplitude: float = 0.1, degree: int = 2) -> InvariantFrameForm:
    """Coefficients that are random polynomials of the given degree in the ambient coordinates."""
    rng = np.random.default_rng(seed)
    monomials = [()]
    for d in range(1, degree + 1):
        monomials += [m for m in _combos(4, d)]
    coefs = amplitude * rng.normal(size=(len(monomials), 3, 3)) / np.sqrt(len(monomials))

    def fn(p):
        out = np.zeros(p.shape[:-1] + (3, 3))
        for m, c in zip(monomials, coefs):
            mono = np.ones(p.shape[:-1])
            for idx in m:
                mono = mono * p[..., idx]
            out += mono[..., None, None] * c
        return out

    return InvariantFrameForm.from_function(grid, fn)


def _combos(n: int, d: int):
    from itertools import combinations_with_replacement

    return combinations_with_replacement(range(n), d)


def identity_map(grid: S3Grid) -> GroupMap:
    return GroupMap(grid, grid.points)


def constant_map(grid: S3Grid, q) -> GroupMap:
    q = qnormalize(np.asarray(q, dtype=float))
    return GroupMap(grid, np.broadcast_to(q, grid.shape + (4,)).copy())


def square_map(grid: S3Grid) -> GroupMap:
    """Pointwise quaternion square ``x -> x^2``."""
    return GroupMap(grid, qmul(grid.points, grid.points))


def map_product(g: GroupMap, h: GroupMap) -> GroupMap:
    _same_grid(g.grid, h.grid)
    return GroupMap(g.grid, qmul(g.values, h.values))


# --------------------------------------------------------------------------
# forms
# --------------------------------------------------------------------------

def _cross2(u, v):
    # [u, v] = 2 u x v for imaginary quaternions
    return 2.0 * np.cross(u, v)


def _tr(u, v):
    # tr(uv) = -2 u.v
    return -2.0 * np.sum(u * v, axis=-1)


CS_ORDER = 4  # finite-difference order of the frame derivatives

_CYC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


def _exterior(c: np.ndarray, grid: S3Grid) -> dict:
    """(dA)_bc for the cyclic pairs (b, c) with ``c`` of shape grid + (3, 3)."""
    dc = grid.directional(c)  # dc[a, ..., b, :] = V_a c_b
    out = {}
    for a, b, cc in _CYC:
        out[(b, cc)] = dc[b, ..., cc, :] - dc[cc, ..., b, :] - 2.0 * c[..., a, :]
    return out


def curvature_form(A: InvariantFrameForm) -> np.ndarray:
    """Curvature coefficients ``F[..., a, :] = F(V_b, V_c)`` for cyclic ``(a, b, c)``.

    So ``F[..., 0, :]`` is the ``theta^2 ^ theta^3`` coefficient, etc.
    """
    c = A.coeffs
    dA = _exterior(c, A.grid)
    out = np.empty_like(c)
    for a, b, cc in _CYC:
        out[..., a, :] = dA[(b, cc)] + _cross2(c[..., b, :], c[..., cc, :])
    return out


def _cs_density(c: np.ndarray, grid: S3Grid) -> np.ndarray:
    dA = _exterior(c, grid)
    dens = sum(_tr(c[..., a, :], dA[(b, cc)]) for a, b, cc in _CYC)
    dens = dens + 2.0 * _tr(c[..., 0, :], _cross2(c[..., 1, :], c[..., 2, :]))
    return dens


def cs_value(A: InvariantFrameForm, check_resolution: bool = False) -> float:
    """``(1 / 8 pi^2) int tr(A ^ dA + 2/3 A ^ A ^ A)`` as a real number.

    With ``check_resolution`` the form is resampled on two successively
    coarsened grids (needs a source function).  The derivatives are fourth
    order, so in the asymptotic regime the fine/coarse difference should be
    about ``1/16`` of the coarse/coarser one; :class:`GridTooCoarse` is raised
    when it exceeds ten times that prediction (and ``1e-10``).
    """
    val = A.grid.integrate(_cs_density(A.coeffs, A.grid)) / (8.0 * math.pi**2)
    if check_resolution:
        coarse = A.grid.coarsened()
        coarser = coarse.coarsened()
        val_c = cs_value(A.resample(coarse))
        val_cc = cs_value(A.resample(coarser))
        d_fine, d_coarse = abs(val - val_c), abs(val_c - val_cc)
        predicted = d_coarse / 2**CS_ORDER
        if d_fine > max(10.0 * predicted, 1e-10):
            raise GridTooCoarse(
                f"cs_value changes by {d_fine:.3e} under coarsening; order-{CS_ORDER} convergence predicts {predicted:.1e}"
            )
    return val


def _pullback_mc(g: GroupMap) -> np.ndarray:
    """Coefficients of ``g^-1 dg``: ``m[..., a, :] = Im(g^-1 V_a g)``."""
    dg = g.grid.directional(g.values)  # (3, ..., 4)
    ginv = qconj(g.values)
    return np.stack([qmul(ginv, dg[a])[..., 1:] for a in range(3)], axis=-2)


def gauge_act(A: InvariantFrameForm, g: GroupMap) -> InvariantFrameForm:
    """``g^-1 A g + g^-1 dg`` with ``dg`` from grid differences."""
    _same_grid(A.grid, g.grid)
    ginv = qconj(g.values)[..., None, :]
    c = np.concatenate([np.zeros(A.coeffs.shape[:-1] + (1,)), A.coeffs], axis=-1)
    conj = qmul(qmul(ginv, c), g.values[..., None, :])[..., 1:]
    return InvariantFrameForm(A.grid, conj + _pullback_mc(g))


def _neighbour_angle(g: GroupMap) -> float:
    """Largest geodesic angle on S^3 between values at neighbouring grid points."""
    v = g.values
    dots = [np.sum(v * np.roll(v, -1, axis), axis=-1) for axis in (1, 2)]
    dots.append(np.sum(v[1:] * v[:-1], axis=-1))
    return max(float(np.max(np.arccos(np.clip(d, -1.0, 1.0)))) for d in dots)


MAX_NEIGHBOUR_ANGLE = 0.5


def map_degree(g: GroupMap, tol: float = 1e-2) -> ChernReport:
    """``-(1 / 24 pi^2) int tr((g^-1 dg)^3)``, i.e. ``(1 / 2 pi^2) int det[m_1, m_2, m_3]``."""
    angle = _neighbour_angle(g)
    if angle > MAX_NEIGHBOUR_ANGLE:
        raise TooRough(f"neighbouring values differ by angle {angle:.3f} > {MAX_NEIGHBOUR_ANGLE}")
    m = _pullback_mc(g)
    det = np.linalg.det(m)
    raw = g.grid.integrate(det) / (2.0 * math.pi**2)
    return ChernReport.from_raw(raw, tol)


def pairing(A: InvariantFrameForm, a: InvariantFrameForm) -> float:
    """``(1 / 4 pi^2) int tr(F_A ^ a)``."""
    _same_grid(A.grid, a.grid)
    F = curvature_form(A)
    dens = sum(_tr(F[..., k, :], a.coeffs[..., k, :]) for k in range(3))
    return A.grid.integrate(dens) / (4.0 * math.pi**2)


def cs_gradient_check(A: InvariantFrameForm, a: InvariantFrameForm, h: float = 1e-4):
    """Central difference of ``cs_value`` along ``a`` and the curvature pairing.

    Returns ``(fd, pairing)``; they agree within ``max(1e-3, 10 h^2)``.
    """
    if not 1e-6 <= h <= 1e-2:
        raise InputError("h must lie in [1e-6, 1e-2]")
    _same_grid(A.grid, a.grid)
    plus = InvariantFrameForm(A.grid, A.coeffs + h * a.coeffs)
    minus = InvariantFrameForm(A.grid, A.coeffs - h * a.coeffs)
    fd = (cs_value(plus) - cs_value(minus)) / (2.0 * h)
    return fd, pairing(A, a)
