"""Chern-Weil characteristic numbers.

* :func:`c1_lattice` -- first Chern number of a U(1) field on T^2 from
  principal plaquette logs.
* :func:`c2_abelian_t4` -- second Chern number of a diagonally embedded
  constant-flux SU(2) field on T^4.
* :func:`hopf_curvature_integral` -- curvature integral of the tautological
  connection on the Hopf bundle, evaluated in two stereographic charts.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import AntipodalElement, BranchAmbiguity, GridTooCoarse, InputError, IntegralityError, MismatchedLattice
from .gauge_field import LinkField, _raw_plaquette_angles, constant_flux_field, embed_u1, plaquette_field
from .group import qlog, wrap_angle
from .lattice import build_torus

__all__ = [
    "ChernReport",
    "c1_lattice",
    "combine_u1",
    "c2_field",
    "c2_abelian_t4",
    "c2_oracle",
    "flux_matrix",
    "hopf_curvature_integral",
]

BRANCH_TOL = 1e-12


@dataclass(frozen=True)
class ChernReport:
    raw: float
    rounded: int
    residual: float

    @classmethod
    def from_raw(cls, raw: float, tol: float) -> "ChernReport":
        rounded = int(round(raw))
        residual = abs(raw - rounded)
        if residual > tol:
            raise IntegralityError(f"value {raw!r} is {residual:.3e} from an integer (tol {tol:.1e})")
        return cls(float(raw), rounded, float(residual))

    def to_dict(self) -> dict:
        return asdict(self)


def _check_branch(angles):
    if np.any(np.abs(np.abs(angles) - np.pi) < BRANCH_TOL):
        raise BranchAmbiguity("a plaquette angle sits on the branch cut at +-pi")


def c1_lattice(field: LinkField, tol: float = 1e-9) -> ChernReport:
    """(1 / 2 pi) times the sum of principal plaquette angles."""
    if field.group != "U1" or field.lattice.dim != 2:
        raise InputError("c1_lattice needs a U1 field on a 2-torus")
    angles = plaquette_field(field)
    _check_branch(angles)
    raw = math.fsum(angles.ravel()) / (2.0 * math.pi)
    return ChernReport.from_raw(raw, tol)


def combine_u1(f1: LinkField, f2: LinkField, k1: int, k2: int) -> LinkField:
    """Link-wise ``U1^k1 U2^k2`` (tensor powers, negative powers for duals)."""
    if f1.lattice != f2.lattice:
        raise MismatchedLattice("fields live on different lattices")
    if f1.group != "U1" or f2.group != "U1":
        raise InputError("combine_u1 needs U1 fields")
    return LinkField(f1.lattice, "U1", int(k1) * f1.links + int(k2) * f2.links)


def c2_field(field: LinkField, tol: float = 1e-6) -> ChernReport:
    """(1/8 pi^2) sum_x tr(F ^ F) with plaquette-log field strengths at each site.

    ``tr(F ^ F) = 2 tr(F_12 F_34 - F_13 F_24 + F_14 F_23)`` per unit cell.  This is
    exact for constant-flux abelian fields, which is the only case it is meant for.
    """
    if field.group != "SU2" or field.lattice.dim != 4:
        raise InputError("c2_field needs an SU2 field on a 4-torus")
    try:
        f = qlog(plaquette_field(field))
    except AntipodalElement as exc:
        raise BranchAmbiguity(str(exc)) from exc
    if np.any(np.abs(np.linalg.norm(f, axis=-1) - np.pi) < BRANCH_TOL):
        raise BranchAmbiguity("a plaquette holonomy sits on the branch cut")

    def tr(a, b):
        # tr(XY) = -2 x.y for imaginary quaternions
        return -2.0 * np.sum(f[a] * f[b], axis=-1)

    # pair order (0,1) (0,2) (0,3) (1,2) (1,3) (2,3)
    density = 2.0 * (tr(0, 5) - tr(1, 4) + tr(2, 3))
    raw = math.fsum(density.ravel()) / (8.0 * math.pi**2)
    return ChernReport.from_raw(raw, tol)


def c2_oracle(fluxes) -> int:
    """Closed form ``-2 (m12 m34 - m13 m24 + m14 m23)``."""
    m = np.asarray(fluxes)
    return int(-2 * (m[0, 1] * m[2, 3] - m[0, 2] * m[1, 3] + m[0, 3] * m[1, 2]))


def flux_matrix(m12=0, m13=0, m14=0, m23=0, m24=0, m34=0) -> np.ndarray:
    m = np.zeros((4, 4), dtype=int)
    for (a, b), v in {(0, 1): m12, (0, 2): m13, (0, 3): m14, (1, 2): m23, (1, 3): m24, (2, 3): m34}.items():
        m[a, b], m[b, a] = v, -v
    return m


def c2_abelian_t4(fluxes, n: int, tol: float = 1e-6) -> ChernReport:
    """Second Chern number of the diagonal SU(2) embedding of a constant-flux U(1) field on T^4."""
    m = np.asarray(fluxes)
    if m.shape != (4, 4) or not np.array_equal(m, -m.T):
        raise InputError("flux matrix must be an antisymmetric 4x4 integer matrix")
    lat = build_torus(4, (n,) * 4)
    u1 = constant_flux_field(lat, m)
    _check_branch(wrap_angle(_raw_plaquette_angles(u1.links, lat.pairs)))
    return c2_field(embed_u1(u1), tol=tol)


# --------------------------------------------------------------------------
# Hopf bundle
# --------------------------------------------------------------------------

def _hopf_connection(x, vec):
    """Real coefficient of the connection ``(-x1 dx0 + x0 dx1 - x3 dx2 + x2 dx3) i``."""
    return -x[1] * vec[0] + x[0] * vec[1] - x[3] * vec[2] + x[2] * vec[3]


def _section_and_tangents(u, v, chart):
    """Unit section over a stereographic chart and its u/v derivatives in R^4.

    chart 0: w -> (1, w) / |(1, w)|;  chart 1: w' -> (w', 1) / |(w', 1)|.
    """
    rho = 1.0 / np.sqrt(1.0 + u * u + v * v)
    drho_u, drho_v = -u * rho**3, -v * rho**3
    zero = np.zeros_like(u)
    if chart == 0:
        x = (rho, zero, rho * u, rho * v)
        xu = (drho_u, zero, drho_u * u + rho, drho_u * v)
        xv = (drho_v, zero, drho_v * u, drho_v * v + rho)
    else:
        x = (rho * u, rho * v, rho, zero)
        xu = (drho_u * u + rho, drho_u * v, drho_u, zero)
        xv = (drho_v * u, drho_v * v + rho, drho_v, zero)
    return x, xu, xv


def _pulled_back(u, v, chart):
    x, xu, xv = _section_and_tangents(u, v, chart)
    return _hopf_connection(x, xu), _hopf_connection(x, xv)


def _chart_integral(n: int, chart: int, fd_step: float) -> float:
    """Integral of F_uv du dv over the unit disk of one chart (imaginary part)."""
    dr = 1.0 / n
    dphi = 2.0 * np.pi / n
    r = (np.arange(n) + 0.5) * dr
    phi = (np.arange(n) + 0.5) * dphi
    rr, pp = np.meshgrid(r, phi, indexing="ij")
    u, v = rr * np.cos(pp), rr * np.sin(pp)
    h = fd_step
    _, av_plus = _pulled_back(u + h, v, chart)
    _, av_minus = _pulled_back(u - h, v, chart)
    au_plus, _ = _pulled_back(u, v + h, chart)
    au_minus, _ = _pulled_back(u, v - h, chart)
    f_uv = (av_plus - av_minus) / (2 * h) - (au_plus - au_minus) / (2 * h)
    return math.fsum((f_uv * rr).ravel()) * dr * dphi


def hopf_curvature_integral(n: int = 256, tol: float = 1e-4, fd_step: float = 1e-5):
    """Curvature integral of the Hopf connection over S^2 and the resulting c_1.

    The sphere is covered by the unit disks of the charts ``w`` and ``w' = 1/w``
    (both oriented by ``du ^ dv``), glued along ``|w| = 1``.  The curvature of
    the pulled-back connection is obtained by central differences and
    integrated with the midpoint rule in polar coordinates, so the quadrature
    error is second order in ``1/n``.

    Returns ``(integral, ChernReport)`` with ``c_1 = (i / 2 pi) * integral``.
    """
    if n < 8:
        raise InputError("grid must have n >= 8")
    inner = _chart_integral(n, 0, fd_step)
    outer = _chart_integral(n, 1, fd_step)
    if abs(inner - outer) > 10 * tol:
        raise GridTooCoarse(f"chart integrals disagree: {inner!r} vs {outer!r}")
    integral = complex(0.0, inner + outer)
    c1 = (1j / (2.0 * math.pi)) * integral
    report = ChernReport.from_raw(c1.real, tol=max(tol, 10.0 / n**2))
    return integral, report
