"""Parallel transport, monodromy of flat fields and representation varieties.

Group words and relators use signed 1-based generator indices: ``+k`` is the
k-th generator, ``-k`` its inverse.  Words are evaluated left to right, the
same order used for transport along lattice paths, so transport along a
concatenated path ``p + q`` is the product ``T(p) T(q)``.

Tangent vectors to ``G^n`` are right-trivialised: a perturbation of a
generator is ``g -> exp(X) g`` with ``X`` in the Lie algebra (u(1) ~ R,
su(2) ~ R^3).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import BadPath, InputError, NotConverged, NotFlat, RankAmbiguous
from .gauge_field import LinkField, wilson_energy
from .group import SU2, U1, qconj, qexp, qmul, qnormalize, wrap_angle
from .lattice import LatticePath, TorusLattice

__all__ = [
    "PresentedGroup",
    "RepresentationPoint",
    "MonodromyReport",
    "parallel_transport",
    "field_from_representation",
    "monodromy_torus",
    "solve_representation",
    "local_dimension",
    "relator_residual",
    "conjugate",
    "free_group",
    "torus_group",
    "surface_group",
]

_BASIS = np.eye(3)
_IDENT = np.array([1.0, 0.0, 0.0, 0.0])


# --------------------------------------------------------------------------
# lattice transport
# --------------------------------------------------------------------------

def parallel_transport(field: LinkField, path: LatticePath):
    """Ordered product of signed link values along ``path``."""
    try:
        edges = path.signed_edges(field.lattice)
    except (IndexError, ValueError) as exc:
        raise BadPath(str(exc)) from exc
    if field.group == "U1":
        total = 0.0
        for x, s in edges:
            a = field.links[(abs(s) - 1,) + x]
            total += a if s > 0 else -a
        return U1(total)
    acc = _IDENT.copy()
    for x, s in edges:
        q = field.links[(abs(s) - 1,) + x]
        acc = qmul(acc, q if s > 0 else qconj(q))
    return SU2(acc)


def field_from_representation(lattice: TorusLattice, group: str, holonomies) -> LinkField:
    """Flat field whose generator loops have holonomy ``holonomies[mu]``.

    All holonomy sits on the wrap links ``x_mu = N_mu - 1``; the field is flat
    exactly when the holonomies commute.
    """
    d = lattice.dim
    if len(holonomies) != d:
        raise InputError(f"need {d} holonomies")
    coords = np.indices(lattice.sizes)
    shape = (d,) + lattice.sizes
    if group == "U1":
        links = np.zeros(shape)
        for mu, h in enumerate(holonomies):
            angle = h.angle if isinstance(h, U1) else float(h)
            links[mu][coords[mu] == lattice.sizes[mu] - 1] = angle
        return LinkField(lattice, "U1", links)
    links = np.zeros(shape + (4,))
    links[..., 0] = 1.0
    for mu, h in enumerate(holonomies):
        q = h.array if isinstance(h, SU2) else np.asarray(h, dtype=float)
        links[mu][coords[mu] == lattice.sizes[mu] - 1] = q
    return LinkField(lattice, "SU2", links)


def _trace(g):
    return g.trace()


@dataclass
class MonodromyReport:
    holonomies: list
    commutator_residuals: dict
    invariants: dict

    def to_dict(self) -> dict:
        def enc(v):
            if isinstance(v, complex):
                return [v.real, v.imag]
            return v

        return {
            "holonomies": [
                list(h.q) if isinstance(h, SU2) else h.angle for h in self.holonomies
            ],
            "commutator_residuals": {k: v for k, v in self.commutator_residuals.items()},
            "invariants": {k: enc(v) for k, v in self.invariants.items()},
        }


def _invariants(elems) -> dict:
    """Traces of generators and of pairwise products."""
    out = {}
    for i, h in enumerate(elems):
        out[f"tr(h{i + 1})"] = _trace(h)
    for i in range(len(elems)):
        for j in range(i + 1, len(elems)):
            out[f"tr(h{i + 1}h{j + 1})"] = _trace(elems[i] * elems[j])
    return out


def monodromy_torus(field: LinkField, base=None, eps_flat: float = 1e-10) -> MonodromyReport:
    """Holonomies of the coordinate loops of an (epsilon-)flat field on T^d."""
    energy = wilson_energy(field)
    if energy > eps_flat:
        raise NotFlat(f"Wilson energy {energy:.3e} exceeds flatness threshold {eps_flat:.1e}")
    lat = field.lattice
    hol = [parallel_transport(field, LatticePath.axis_loop(lat, mu, base)) for mu in range(lat.dim)]
    residuals = {}
    for i in range(lat.dim):
        for j in range(i + 1, lat.dim):
            comm = hol[i] * hol[j] * hol[i].inverse() * hol[j].inverse()
            residuals[f"[h{i + 1},h{j + 1}]"] = comm.distance(field.identity_element())
    return MonodromyReport(hol, residuals, _invariants(hol))


# --------------------------------------------------------------------------
# presented groups
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PresentedGroup:
    generators: int
    relators: tuple = field(default_factory=tuple)

    def __post_init__(self):
        rels = tuple(tuple(int(s) for s in w) for w in self.relators)
        for w in rels:
            for s in w:
                if s == 0 or abs(s) > self.generators:
                    raise InputError(f"relator letter {s} out of range")
        object.__setattr__(self, "relators", tuple(w for w in rels if w))

    @classmethod
    def from_dict(cls, data: dict) -> "PresentedGroup":
        return cls(int(data["generators"]), tuple(data.get("relators", [])))

    @classmethod
    def from_json(cls, text: str) -> "PresentedGroup":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return {"generators": self.generators, "relators": [list(w) for w in self.relators]}


def free_group(n: int) -> PresentedGroup:
    return PresentedGroup(n, ())


def torus_group() -> PresentedGroup:
    return PresentedGroup(2, ((1, 2, -1, -2),))


def surface_group(genus: int) -> PresentedGroup:
    """<a_1, b_1, ..., a_g, b_g | prod [a_i, b_i]> with generators ordered a_1, b_1, a_2, ..."""
    word = []
    for i in range(genus):
        a, b = 2 * i + 1, 2 * i + 2
        word += [a, b, -a, -b]
    return PresentedGroup(2 * genus, (tuple(word),))


@dataclass(frozen=True, eq=False)
class RepresentationPoint:
    """Images of the generators: angles ``(n,)`` for U1, quaternions ``(n, 4)`` for SU2."""

    group: str
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if self.group == "U1":
            v = wrap_angle(np.atleast_1d(v))
        elif self.group == "SU2":
            v = qnormalize(np.atleast_2d(v))
        else:
            raise InputError(f"unknown group {self.group!r}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def elements(self) -> list:
        if self.group == "U1":
            return [U1(a) for a in self.values]
        return [SU2(q) for q in self.values]

    def invariants(self) -> dict:
        return _invariants(self.elements())

    def to_dict(self) -> dict:
        return {"group": self.group, "values": self.values.tolist()}


def evaluate_word(rho: RepresentationPoint, word) -> np.ndarray:
    if rho.group == "U1":
        return np.array(sum(rho.values[abs(s) - 1] * np.sign(s) for s in word))
    acc = _IDENT.copy()
    for s in word:
        q = rho.values[abs(s) - 1]
        acc = qmul(acc, q if s > 0 else qconj(q))
    return acc


def _residual_vector(G: PresentedGroup, rho: RepresentationPoint) -> np.ndarray:
    parts = []
    for w in G.relators:
        if rho.group == "U1":
            t = evaluate_word(rho, w)
            parts.append(np.array([np.cos(t) - 1.0, np.sin(t)]))
        else:
            parts.append(evaluate_word(rho, w) - _IDENT)
    return np.concatenate(parts) if parts else np.zeros(0)


def relator_residual(G: PresentedGroup, rho: RepresentationPoint) -> float:
    """Sum over relators of ``|rho(word) - 1|^2``."""
    r = _residual_vector(G, rho)
    return float(r @ r)


def _adjoint(q: np.ndarray) -> np.ndarray:
    """Matrix of ``X -> q X q^-1`` on su(2) = R^3 (columns are images of i, j, k)."""
    cols = []
    for e in _BASIS:
        x = np.concatenate([[0.0], e])
        cols.append(qmul(qmul(q, x), qconj(q))[1:])
    return np.array(cols).T


def _word_derivative(rho: RepresentationPoint, word):
    """Right-trivialised derivative of ``rho(word)``: blocks ``(dim g) x (dim g)`` per generator."""
    n = len(rho.values)
    if rho.group == "U1":
        row = np.zeros((1, n))
        for s in word:
            row[0, abs(s) - 1] += np.sign(s)
        return row
    blocks = np.zeros((3, 3 * n))
    prefix = _IDENT.copy()
    for s in word:
        i = abs(s) - 1
        q = rho.values[i]
        if s > 0:
            blocks[:, 3 * i:3 * i + 3] += _adjoint(prefix)
            prefix = qmul(prefix, q)
        else:
            prefix = qmul(prefix, qconj(q))
            blocks[:, 3 * i:3 * i + 3] -= _adjoint(prefix)
    return blocks


def relator_differential(G: PresentedGroup, rho: RepresentationPoint) -> np.ndarray:
    """d2: tangent of G^n (right-trivialised) -> product of Lie algebras, one per relator."""
    n = len(rho.values)
    k = 1 if rho.group == "U1" else 3
    if not G.relators:
        return np.zeros((0, k * n))
    return np.vstack([_word_derivative(rho, w) for w in G.relators])


def conjugation_differential(rho: RepresentationPoint) -> np.ndarray:
    """d1: xi -> (xi - Ad_{rho_i} xi)_i, infinitesimal simultaneous conjugation."""
    if rho.group == "U1":
        return np.zeros((len(rho.values), 1))
    return np.vstack([np.eye(3) - _adjoint(q) for q in rho.values])


def _residual_jacobian(G: PresentedGroup, rho: RepresentationPoint) -> np.ndarray:
    """Jacobian of the residual vector used by the solver (ambient coordinates)."""
    rows = []
    for w in G.relators:
        wval = evaluate_word(rho, w)
        d = _word_derivative(rho, w)
        if rho.group == "U1":
            rows.append(np.outer([-np.sin(wval), np.cos(wval)], d[0]))
        else:
            # d(rho(w)) = X rho(w) with X the right-trivialised derivative
            cols = []
            for c in range(d.shape[1]):
                x = np.concatenate([[0.0], d[:, c]])
                cols.append(qmul(x, wval))
            rows.append(np.array(cols).T)
    n = len(rho.values) * (1 if rho.group == "U1" else 3)
    return np.vstack(rows) if rows else np.zeros((0, n))


def _retract(rho: RepresentationPoint, delta: np.ndarray) -> RepresentationPoint:
    if rho.group == "U1":
        return RepresentationPoint("U1", rho.values + delta)
    return RepresentationPoint("SU2", qmul(qexp(delta.reshape(-1, 3)), rho.values))


def random_point(n: int, group: str, seed) -> RepresentationPoint:
    rng = np.random.default_rng(seed)
    if group == "U1":
        return RepresentationPoint("U1", rng.uniform(-np.pi, np.pi, size=n))
    return RepresentationPoint("SU2", qnormalize(rng.normal(size=(n, 4))))


def solve_representation(
    G: PresentedGroup,
    group: str,
    seed,
    tol: float = 1e-10,
    max_iter: int = 200,
    start: RepresentationPoint | None = None,
) -> RepresentationPoint:
    """Levenberg-damped Gauss-Newton on the relator residual from a seeded random start.

    Steps are taken in the Lie algebra and retracted with ``exp`` so iterates
    stay on the group.  Succeeds when ``relator_residual <= tol**2``.
    """
    if tol <= 0:
        raise InputError("tol must be positive")
    rho = start if start is not None else random_point(G.generators, group, seed)
    r = _residual_vector(G, rho)
    cost = float(r @ r)
    damping = 1e-3
    for _ in range(max_iter):
        if cost <= tol**2:
            return rho
        J = _residual_jacobian(G, rho)
        JtJ = J.T @ J
        grad = J.T @ r
        accepted = False
        for _ in range(30):
            A = JtJ + damping * np.eye(JtJ.shape[0])
            delta = -np.linalg.solve(A, grad)
            trial = _retract(rho, delta)
            r_trial = _residual_vector(G, trial)
            c_trial = float(r_trial @ r_trial)
            if c_trial < cost:
                rho, r, cost = trial, r_trial, c_trial
                damping = max(damping / 3.0, 1e-12)
                accepted = True
                break
            damping *= 4.0
        if not accepted:
            break
    if cost <= tol**2:
        return rho
    raise NotConverged(
        f"relator residual {np.sqrt(cost):.3e} above {tol:.1e}", best=rho, residual=float(np.sqrt(cost))
    )


def conjugate(rho: RepresentationPoint, h) -> RepresentationPoint:
    """Simultaneous conjugation ``rho_i -> h rho_i h^-1``."""
    if rho.group == "U1":
        return rho
    q = h.array if isinstance(h, SU2) else np.asarray(h, dtype=float)
    return RepresentationPoint("SU2", qmul(qmul(q, rho.values), qconj(q)))


def _numerical_rank(s: np.ndarray, tol: float | None) -> int:
    if s.size == 0:
        return 0
    smax = float(s.max())
    if smax < 1e-14:
        return 0
    thresh = 1e-6 * smax if tol is None else tol
    ambiguous = (s > thresh / 10.0) & (s < thresh * 10.0)
    if np.any(ambiguous):
        raise RankAmbiguous(f"singular values {s[ambiguous]} lie within a factor 10 of {thresh:.1e}")
    return int(np.sum(s > thresh))


def local_dimension(
    G: PresentedGroup, rho: RepresentationPoint, tol_rank: float | None = None, max_residual: float = 1e-8
) -> int:
    """dim ker d2 - rank d1 at a solution of the relators.

    d2 is the right-trivialised differential of the relator map, d1 the
    infinitesimal conjugation action.  Singular values below ``tol_rank``
    (default ``1e-6`` times the largest) count as zero; values within a
    factor of 10 of the threshold raise :class:`RankAmbiguous`.
    """
    res = np.sqrt(relator_residual(G, rho))
    if res > max_residual:
        raise InputError(f"relator residual {res:.3e} too large for a tangent-space count")
    d2 = relator_differential(G, rho)
    d1 = conjugation_differential(rho)
    n_tangent = d2.shape[1]
    s2 = np.linalg.svd(d2, compute_uv=False) if d2.size else np.zeros(0)
    s1 = np.linalg.svd(d1, compute_uv=False)
    ker2 = n_tangent - _numerical_rank(s2, tol_rank)
    return ker2 - _numerical_rank(s1, tol_rank)
