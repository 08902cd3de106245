"""Lattice connections: link fields, gauge transformations and plaquette curvature.

A :class:`LinkField` stores one group element per positively oriented edge.
For ``U1`` the storage is an angle array of shape ``(dim, *sizes)``; for
``SU2`` a quaternion array of shape ``(dim, *sizes, 4)``.  The value on a
reversed edge is the inverse of the stored one.

The plaquette holonomy at ``(x; mu, nu)`` is the ordered product

    U_p = U(x, mu) U(x + mu, nu) U(x + nu, mu)^-1 U(x, nu)^-1

and a gauge transformation acts by ``U(x, mu) -> g(x)^-1 U(x, mu) g(x + mu)``,
so ``U_p -> g(x)^-1 U_p g(x)``.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from .errors import BadIndex, InputError, MismatchedLattice, NotConverged
from .group import SU2, U1, qconj, qexp, qmul, qnormalize, wrap_angle
from .lattice import TorusLattice, build_torus, shift

logger = logging.getLogger(__name__)

__all__ = [
    "LinkField",
    "GaugeTransform",
    "trivial_field",
    "constant_flux_field",
    "constant_flux_t2",
    "random_field",
    "random_gauge",
    "embed_u1",
    "apply_gauge",
    "plaquette_field",
    "plaquette_angles",
    "plaquette_holonomy",
    "wilson_energy",
    "energy_gradient",
    "flow_to_flat",
    "bianchi_defects",
    "field_to_dict",
    "field_from_dict",
]

GROUPS = ("U1", "SU2")
FIELD_FORMAT = "gaugekit-linkfield"
FIELD_VERSION = 1


def _frozen(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def _check_group(group):
    if group not in GROUPS:
        raise InputError(f"group must be one of {GROUPS}, got {group!r}")


@dataclass(frozen=True, eq=False)
class LinkField:
    lattice: TorusLattice
    group: str
    links: np.ndarray

    def __post_init__(self):
        _check_group(self.group)
        links = np.asarray(self.links, dtype=float)
        shape = (self.lattice.dim,) + self.lattice.sizes
        if self.group == "U1":
            links = wrap_angle(links)
        else:
            shape = shape + (4,)
            links = qnormalize(links)
        if links.shape != shape:
            raise InputError(f"link array has shape {links.shape}, expected {shape}")
        object.__setattr__(self, "links", _frozen(links))

    def link(self, x, mu: int):
        x = self.lattice.reduce(x)
        if self.group == "U1":
            return U1(self.links[(mu,) + x])
        return SU2(self.links[(mu,) + x])

    def signed_link(self, x, signed_dir: int):
        """Element on the stored edge ``(x, |signed_dir|)``, inverted if negative."""
        g = self.link(x, abs(signed_dir) - 1)
        return g if signed_dir > 0 else g.inverse()

    def identity_element(self):
        return U1.identity() if self.group == "U1" else SU2.identity()


@dataclass(frozen=True, eq=False)
class GaugeTransform:
    lattice: TorusLattice
    group: str
    values: np.ndarray

    def __post_init__(self):
        _check_group(self.group)
        vals = np.asarray(self.values, dtype=float)
        shape = self.lattice.sizes
        if self.group == "U1":
            vals = wrap_angle(vals)
        else:
            shape = shape + (4,)
            vals = qnormalize(vals)
        if vals.shape != shape:
            raise InputError(f"gauge array has shape {vals.shape}, expected {shape}")
        object.__setattr__(self, "values", _frozen(vals))


# --------------------------------------------------------------------------
# constructors
# --------------------------------------------------------------------------

def trivial_field(lattice: TorusLattice, group: str = "U1") -> LinkField:
    _check_group(group)
    shape = (lattice.dim,) + lattice.sizes
    if group == "U1":
        return LinkField(lattice, group, np.zeros(shape))
    links = np.zeros(shape + (4,))
    links[..., 0] = 1.0
    return LinkField(lattice, group, links)


def constant_flux_angles(lattice: TorusLattice, fluxes) -> np.ndarray:
    """U(1) link angles carrying uniform integer flux ``fluxes[mu][nu]`` per plane.

    For each plane ``mu < nu`` with flux ``m`` the construction is

        theta_nu(x) += 2 pi m x_mu / (N_mu N_nu)
        theta_mu(x) -= 2 pi m x_nu / N_nu        on the slice x_mu = N_mu - 1

    which gives every ``(mu, nu)`` plaquette the angle ``2 pi m / (N_mu N_nu)``
    and leaves the other planes untouched.
    """
    m = np.asarray(fluxes)
    d = lattice.dim
    if m.shape != (d, d):
        raise InputError(f"flux matrix must be {d}x{d}")
    if not np.array_equal(m, -m.T):
        raise InputError("flux matrix must be antisymmetric")
    coords = np.indices(lattice.sizes)
    theta = np.zeros((d,) + lattice.sizes)
    for mu, nu in lattice.pairs:
        flux = int(m[mu, nu])
        if flux == 0:
            continue
        n_mu, n_nu = lattice.sizes[mu], lattice.sizes[nu]
        theta[nu] += 2.0 * np.pi * flux * coords[mu] / (n_mu * n_nu)
        edge = coords[mu] == n_mu - 1
        theta[mu] -= np.where(edge, 2.0 * np.pi * flux * coords[nu] / n_nu, 0.0)
    return theta


def constant_flux_field(lattice: TorusLattice, fluxes) -> LinkField:
    return LinkField(lattice, "U1", constant_flux_angles(lattice, fluxes))


def constant_flux_t2(n: int, m: int) -> LinkField:
    """U(1) field on the ``n x n`` torus with total flux ``2 pi m``."""
    lat = build_torus(2, (n, n))
    return constant_flux_field(lat, [[0, m], [-m, 0]])


def _ball_samples(rng, shape, radius, k):
    """Uniform samples from the k-ball of given radius."""
    if k == 1:
        return rng.uniform(-radius, radius, size=shape)
    v = rng.normal(size=shape + (k,))
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    r = radius * rng.uniform(size=shape + (1,)) ** (1.0 / k)
    return v * r


def random_field(lattice: TorusLattice, group: str, seed, roughness: float) -> LinkField:
    """Links ``exp(xi)`` with ``xi`` uniform in the ball of radius ``roughness``."""
    _check_group(group)
    if roughness < 0:
        raise InputError("roughness must be nonnegative")
    rng = np.random.default_rng(seed)
    shape = (lattice.dim,) + lattice.sizes
    if group == "U1":
        return LinkField(lattice, group, _ball_samples(rng, shape, roughness, 1))
    return LinkField(lattice, group, qexp(_ball_samples(rng, shape, roughness, 3)))


def random_gauge(lattice: TorusLattice, group: str, seed) -> GaugeTransform:
    """Haar-random gauge transformation."""
    _check_group(group)
    rng = np.random.default_rng(seed)
    if group == "U1":
        return GaugeTransform(lattice, group, rng.uniform(-np.pi, np.pi, size=lattice.sizes))
    return GaugeTransform(lattice, group, qnormalize(rng.normal(size=lattice.sizes + (4,))))


def embed_u1(field: LinkField, axis: int = 0) -> LinkField:
    """SU(2) field ``cos(theta) + sin(theta) e_axis`` from a U(1) field (diagonal embedding for axis 0)."""
    if field.group != "U1":
        raise InputError("embed_u1 needs a U1 field")
    th = field.links
    q = np.zeros(th.shape + (4,))
    q[..., 0] = np.cos(th)
    q[..., 1 + axis] = np.sin(th)
    return LinkField(field.lattice, "SU2", q)


# --------------------------------------------------------------------------
# gauge action and curvature
# --------------------------------------------------------------------------

def apply_gauge(field: LinkField, g: GaugeTransform) -> LinkField:
    if field.lattice != g.lattice:
        raise MismatchedLattice("gauge transform lives on a different lattice")
    if field.group != g.group:
        raise MismatchedLattice("gauge transform has a different group")
    d = field.lattice.dim
    if field.group == "U1":
        new = np.stack([field.links[mu] - g.values + shift(g.values, mu) for mu in range(d)])
    else:
        ginv = qconj(g.values)
        new = np.stack(
            [qmul(qmul(ginv, field.links[mu]), shift(g.values, mu)) for mu in range(d)]
        )
    return LinkField(field.lattice, field.group, new)


def _raw_plaquette_angles(links, pairs):
    return np.stack(
        [
            links[mu] + shift(links[nu], mu) - shift(links[mu], nu) - links[nu]
            for mu, nu in pairs
        ]
    )


def _su2_plaquettes(links, pairs):
    out = []
    for mu, nu in pairs:
        a = qmul(links[mu], shift(links[nu], mu))
        b = qmul(qconj(shift(links[mu], nu)), qconj(links[nu]))
        out.append(qmul(a, b))
    return qnormalize(np.stack(out))


def plaquette_field(field: LinkField) -> np.ndarray:
    """All plaquette holonomies, shape ``(npairs, *sizes)`` (angles) or ``(..., 4)``."""
    pairs = field.lattice.pairs
    if field.group == "U1":
        return wrap_angle(_raw_plaquette_angles(field.links, pairs))
    return _su2_plaquettes(field.links, pairs)


def plaquette_angles(field: LinkField) -> np.ndarray:
    """Principal plaquette angles in (-pi, pi] of a U(1) field."""
    if field.group != "U1":
        raise InputError("plaquette angles are defined for U1 fields")
    return plaquette_field(field)


def plaquette_holonomy(field: LinkField, p: int):
    lat = field.lattice
    if not 0 <= p < lat.nplaquettes:
        raise BadIndex(f"plaquette index {p} out of range")
    x, mu, nu = lat.plaquette(p)
    pair = lat.pairs.index((mu, nu))
    value = plaquette_field(field)[(pair,) + x]
    return U1(value) if field.group == "U1" else SU2(value)


def wilson_energy(field: LinkField) -> float:
    """Sum over plaquettes of ``|1 - U_p|^2`` (quaternion norm for SU(2))."""
    if field.group == "U1":
        th = _raw_plaquette_angles(field.links, field.lattice.pairs)
        return float(np.sum(2.0 - 2.0 * np.cos(th)))
    up = _su2_plaquettes(field.links, field.lattice.pairs)
    return float(np.sum(2.0 - 2.0 * up[..., 0]))


def energy_gradient(field: LinkField) -> np.ndarray:
    """Gradient of :func:`wilson_energy` with respect to each link.

    For SU(2) the tangent space at ``U`` is identified with su(2) through
    ``U -> exp(X) U``; the result has shape ``(dim, *sizes, 3)``.  For U(1)
    it is the derivative with respect to the link angle.
    """
    links = field.links
    lat = field.lattice
    grad = np.zeros(links.shape[:-1] + (3,)) if field.group == "SU2" else np.zeros(links.shape)
    for mu, nu in lat.pairs:
        if field.group == "U1":
            th = links[mu] + shift(links[nu], mu) - shift(links[mu], nu) - links[nu]
            s = 2.0 * np.sin(th)
            grad[mu] += s
            grad[nu] += shift(s, mu, -1)
            grad[mu] -= shift(s, nu, -1)
            grad[nu] -= s
        else:
            l1, l2 = links[mu], shift(links[nu], mu)
            l3, l4 = shift(links[mu], nu), links[nu]
            up = qmul(qmul(l1, l2), qmul(qconj(l3), qconj(l4)))
            # dE/dv = -2 dw/dv, see module docstring for the product order
            g1 = 2.0 * up[..., 1:]
            g2 = 2.0 * qmul(qmul(qconj(l1), up), l1)[..., 1:]
            g3 = -2.0 * qmul(qmul(qconj(l4), up), l4)[..., 1:]
            g4 = -2.0 * up[..., 1:]
            grad[mu] += g1
            grad[nu] += shift(g2, mu, -1)
            grad[mu] += shift(g3, nu, -1)
            grad[nu] += g4
    return grad


def _step(field: LinkField, direction: np.ndarray, s: float) -> LinkField:
    if field.group == "U1":
        return LinkField(field.lattice, "U1", field.links + s * direction)
    return LinkField(field.lattice, "SU2", qmul(qexp(s * direction), field.links))


def flow_to_flat(
    field: LinkField,
    max_steps: int = 2000,
    step_size: float = 0.1,
    tol: float = 1e-10,
    armijo: float = 1e-4,
):
    """Gradient descent of the Wilson energy with Armijo backtracking.

    Returns ``(field, history)`` where ``history[k]`` is the energy after
    ``k`` accepted steps.  Raises :class:`NotConverged` (carrying the best
    iterate and history) when the energy is still above ``tol``.
    """
    if step_size <= 0:
        raise InputError("step_size must be positive")
    energy = wilson_energy(field)
    history = [energy]
    for _ in range(max_steps):
        if energy <= tol:
            break
        grad = energy_gradient(field)
        gn2 = float(np.sum(grad**2))
        if gn2 == 0.0:
            break
        s = step_size
        while s > 1e-14:
            trial = _step(field, -grad, s)
            e_trial = wilson_energy(trial)
            if e_trial <= energy - armijo * s * gn2:
                break
            s *= 0.5
        else:
            logger.debug("line search stalled at energy %g", energy)
            break
        field, energy = trial, e_trial
        history.append(energy)
    if energy > tol:
        raise NotConverged(
            f"energy {energy:.3e} above tolerance {tol:.1e} after {len(history) - 1} steps",
            best=field,
            history=history,
            residual=energy,
        )
    return field, history


def bianchi_defects(field: LinkField) -> np.ndarray:
    """Per-cube deviation from 1 of the product of the six signed face holonomies.

    Faces are taken in the order of :func:`gaugekit.lattice.cube_faces`, each
    evaluated at its own corner.  Shape ``(ntriples, *sizes)``.
    """
    lat = field.lattice
    if lat.dim < 3:
        raise InputError("Bianchi identity needs dimension >= 3")
    plaq = plaquette_field(field)
    index = {pair: i for i, pair in enumerate(lat.pairs)}
    out = []
    for mu, nu, rho in lat.triples:
        axes = (mu, nu, rho)
        faces = []
        for i, a in enumerate(axes):
            rest = tuple(b for b in axes if b != a)
            sign = 1 if i % 2 == 0 else -1
            p = plaq[index[rest]]
            faces.append((shift(p, a), sign))
            faces.append((p, -sign))
        if field.group == "U1":
            total = sum(s * p for p, s in faces)
            out.append(np.abs(np.exp(1j * total) - 1.0))
        else:
            prod = None
            for p, s in faces:
                f = p if s > 0 else qconj(p)
                prod = f if prod is None else qmul(prod, f)
            ident = np.zeros(4)
            ident[0] = 1.0
            out.append(np.linalg.norm(prod - ident, axis=-1))
    return np.stack(out)


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def field_to_dict(field: LinkField) -> dict:
    """JSON-ready container; links in canonical edge order (direction-major, x_1 fastest)."""
    lat = field.lattice
    d, v = lat.dim, lat.nsites
    if field.group == "U1":
        links = np.concatenate([field.links[mu].ravel(order="F") for mu in range(d)]).tolist()
    else:
        per_dir = [
            np.stack([field.links[mu][..., c].ravel(order="F") for c in range(4)], axis=-1)
            for mu in range(d)
        ]
        links = np.concatenate(per_dir).reshape(d * v, 4).tolist()
    return {
        "format": FIELD_FORMAT,
        "version": FIELD_VERSION,
        "lattice": {"dim": lat.dim, "sizes": list(lat.sizes)},
        "group": field.group,
        "links": links,
    }


def field_from_dict(data: dict) -> LinkField:
    if data.get("format") != FIELD_FORMAT:
        raise InputError("not a link-field container")
    if data.get("version") != FIELD_VERSION:
        raise InputError(f"unsupported link-field version {data.get('version')!r}")
    lat = build_torus(data["lattice"]["dim"], data["lattice"]["sizes"])
    group = data["group"]
    arr = np.asarray(data["links"], dtype=float)
    d = lat.dim
    if group == "U1":
        arr = arr.reshape(d, lat.nsites)
        links = np.stack([arr[mu].reshape(lat.sizes, order="F") for mu in range(d)])
    else:
        arr = arr.reshape(d, lat.nsites, 4)
        links = np.stack(
            [np.stack([arr[mu, :, c].reshape(lat.sizes, order="F") for c in range(4)], axis=-1)
             for mu in range(d)]
        )
    return LinkField(lat, group, links)


def save_field(field: LinkField, path) -> None:
    with open(path, "w") as fh:
        json.dump(field_to_dict(field), fh)


def load_field(path) -> LinkField:
    with open(path) as fh:
        return field_from_dict(json.load(fh))
