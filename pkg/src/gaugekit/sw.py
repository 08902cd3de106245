"""Seiberg-Witten map on the lattice 4-torus.

Conventions
-----------
Positive spinors have two complex components per site.  Clifford
multiplication by ``e_mu`` maps S+ -> S- by the 2x2 block ``tau_mu`` and
S- -> S+ by ``-tau_mu^*`` with

    tau_1 = -i sigma_3,  tau_2 = i sigma_2,  tau_3 = -i sigma_1,  tau_4 = 1,

so ``e_mu e_nu`` acts on S+ as ``-tau_mu^* tau_nu``.  Under this map the
self-dual basis

    omega_1 = dx12 + dx34,  omega_2 = dx13 + dx42,  omega_3 = dx14 + dx23

goes to ``-2i sigma_1, -2i sigma_2, -2i sigma_3`` and the anti-self-dual forms
go to zero (see :func:`clifford_two_form`).  An imaginary self-dual form
``i sum_a f_a omega_a`` therefore acts as ``2 sum_a f_a sigma_a`` and the
quadratic map ``mu(psi) = psi psi^* - |psi|^2 / 2`` has coefficients
``f_a = psi^* sigma_a psi / 4``.  Forms are stored as these three real
coefficients per site.

The U(1) connection is on the determinant line.  Its links are stored as
real (unwrapped) angles ``a(x, mu)``; spinors are transported with the half
angle ``exp(i a / 2)``.  A gauge transformation ``g = exp(i alpha)`` acts by
``psi -> conj(g) psi`` and ``a -> a + 2 (alpha(x + mu) - alpha(x))``, which
keeps the half-angle transport exactly equivariant.  The curvature is the
principal plaquette log of the links.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .errors import BranchAmbiguity, InputError, MismatchedLattice, NotConverged, NotIntegral
from .gauge_field import FIELD_FORMAT, GaugeTransform, LinkField, _raw_plaquette_angles, field_to_dict
from .group import wrap_angle
from .lattice import TorusLattice, build_torus, shift

__all__ = [
    "TAU",
    "SIGMA",
    "SWConfig",
    "SWResidual",
    "TopologicalData",
    "ModuliDimension",
    "mu",
    "mu_matrix",
    "clifford_form",
    "clifford_two_form",
    "dirac_plus",
    "sw_map",
    "gauge_act_sw",
    "sw_energy",
    "sw_gradient",
    "sw_energy_descent",
    "bound_check",
    "gauge_direction",
    "slice_operator",
    "slice_residual",
    "project_to_slice",
    "deformation_residual",
    "moduli_dimension",
    "random_config",
    "trivial_config",
    "constant_solution",
    "perturbed",
    "config_to_dict",
    "config_from_dict",
]

SIGMA = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
)
TAU = np.array([-1j * SIGMA[2], 1j * SIGMA[1], -1j * SIGMA[0], np.eye(2)], dtype=complex)

# (pair index, sign) making up the self-dual / anti-self-dual coefficients;
# pairs are (0,1) (0,2) (0,3) (1,2) (1,3) (2,3)
_SD = (((0, 1), (5, 1)), ((1, 1), (4, -1)), ((2, 1), (3, 1)))
_ASD = (((0, 1), (5, -1)), ((1, 1), (4, 1)), ((2, 1), (3, -1)))

BRANCH_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SWConfig:
    """Spinor ``psi`` (``sizes + (2,)``, complex), link angles ``links`` (``(4,) + sizes``), ``eta`` (3,)."""

    lattice: TorusLattice
    psi: np.ndarray
    links: np.ndarray
    eta: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if self.lattice.dim != 4:
            raise InputError("Seiberg-Witten configurations live on a 4-torus")
        psi = np.array(self.psi, dtype=complex)
        links = np.array(self.links, dtype=float)
        eta = np.array(self.eta, dtype=float).reshape(3)
        if psi.shape != self.lattice.sizes + (2,):
            raise InputError(f"spinor must have shape {self.lattice.sizes + (2,)}")
        if links.shape != (4,) + self.lattice.sizes:
            raise InputError(f"links must have shape {(4,) + self.lattice.sizes}")
        for a in (psi, links, eta):
            if not np.all(np.isfinite(a)):
                raise InputError("configuration entries must be finite")
            a.flags.writeable = False
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "links", links)
        object.__setattr__(self, "eta", eta)

    def link_field(self) -> LinkField:
        return LinkField(self.lattice, "U1", self.links)

    def replace(self, psi=None, links=None, eta=None) -> "SWConfig":
        return SWConfig(
            self.lattice,
            self.psi if psi is None else psi,
            self.links if links is None else links,
            self.eta if eta is None else eta,
        )


@dataclass(frozen=True, eq=False)
class SWResidual:
    """Negative spinor (``sizes + (2,)``) and self-dual form coefficients (``(3,) + sizes``)."""

    spinor: np.ndarray
    form: np.ndarray

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.spinor) ** 2) + np.sum(self.form**2))


@dataclass(frozen=True)
class TopologicalData:
    c1_squared: int
    euler: int
    signature: int


@dataclass(frozen=True)
class ModuliDimension:
    dimension: int
    dirac_index: int | None


# --------------------------------------------------------------------------
# pointwise algebra
# --------------------------------------------------------------------------

def _act(mat, psi):
    return np.einsum("ij,...j->...i", mat, psi)


def mu_matrix(psi) -> np.ndarray:
    """``psi psi^* - |psi|^2 / 2`` as 2x2 matrices.

    This is the traceless convention.  The variant ``phi -> <phi, psi> psi +
    |psi|^2 phi / 2`` differs in the sign of the trace part and is not used.
    """
    psi = np.asarray(psi, dtype=complex)
    outer = psi[..., :, None] * psi[..., None, :].conj()
    n2 = np.sum(np.abs(psi) ** 2, axis=-1)
    return outer - 0.5 * n2[..., None, None] * np.eye(2)


def mu(psi) -> np.ndarray:
    """Self-dual coefficients ``f_a = psi^* sigma_a psi / 4`` (last axis of length 3)."""
    psi = np.asarray(psi, dtype=complex)
    return np.stack(
        [0.25 * np.real(np.sum(psi.conj() * _act(SIGMA[a], psi), axis=-1)) for a in range(3)], axis=-1
    )


def clifford_form(coeffs) -> np.ndarray:
    """Action on S+ of the imaginary self-dual form ``i sum_a f_a omega_a``: ``2 sum_a f_a sigma_a``."""
    f = np.asarray(coeffs, dtype=float)
    return 2.0 * np.einsum("...a,aij->...ij", f, SIGMA)


def clifford_two_form(F) -> np.ndarray:
    """Action on S+ of ``sum_{mu<nu} F[mu, nu] dx^mu ^ dx^nu`` (F a 4x4 array, upper triangle used)."""
    F = np.asarray(F)
    out = np.zeros((2, 2), dtype=complex)
    for m in range(4):
        for n in range(m + 1, 4):
            out += F[m, n] * (-TAU[m].conj().T @ TAU[n])
    return out


# --------------------------------------------------------------------------
# the map
# --------------------------------------------------------------------------

def _phases(links):
    return np.exp(0.5j * links)


def dirac_plus(psi: np.ndarray, links: np.ndarray) -> np.ndarray:
    """``sum_mu tau_mu (exp(i a/2) psi(x+mu) - exp(-i a(x-mu)/2) psi(x-mu)) / 2``."""
    ph = _phases(links)
    out = np.zeros(psi.shape, dtype=complex)
    for m in range(4):
        fwd = ph[m][..., None] * shift(psi, m)
        bwd = shift(ph[m].conj()[..., None] * psi, m, -1)
        out += 0.5 * _act(TAU[m], fwd - bwd)
    return out


def dirac_plus_adjoint(s: np.ndarray, links: np.ndarray) -> np.ndarray:
    ph = _phases(links)
    out = np.zeros(s.shape, dtype=complex)
    for m in range(4):
        t = _act(TAU[m].conj().T, s)
        out += 0.5 * (shift(ph[m].conj()[..., None] * t, m, -1) - ph[m][..., None] * shift(t, m))
    return out


def _plaquettes(c: SWConfig) -> np.ndarray:
    raw = _raw_plaquette_angles(c.links, c.lattice.pairs)
    theta = wrap_angle(raw)
    if np.any(np.abs(np.abs(theta) - np.pi) < BRANCH_TOL):
        raise BranchAmbiguity("a plaquette angle sits on the branch cut at +-pi")
    return theta


def _project(theta, table):
    return np.stack([0.5 * sum(s * theta[p] for p, s in row) for row in table])


def self_dual_part(c: SWConfig) -> np.ndarray:
    """Coefficients of ``F+`` on ``i omega_a``, shape ``(3,) + sizes``."""
    return _project(_plaquettes(c), _SD)


def anti_self_dual_part(c: SWConfig) -> np.ndarray:
    return _project(_plaquettes(c), _ASD)


def sw_map(c: SWConfig) -> SWResidual:
    """``(D+_A psi, F+_A - mu(psi) - eta)``."""
    spinor = dirac_plus(c.psi, c.links)
    form = self_dual_part(c) - np.moveaxis(mu(c.psi), -1, 0) - c.eta.reshape(3, 1, 1, 1, 1)
    return SWResidual(spinor, form)


def gauge_act_sw(c: SWConfig, g: GaugeTransform) -> SWConfig:
    """``psi -> conj(g) psi``, ``a -> a + 2 d alpha`` for ``g = exp(i alpha)``; eta unchanged."""
    if g.lattice != c.lattice:
        raise MismatchedLattice("gauge transform lives on a different lattice")
    if g.group != "U1":
        raise InputError("the SW gauge group is U(1)")
    alpha = np.asarray(g.values)
    psi = np.exp(-1j * alpha)[..., None] * c.psi
    links = np.stack([c.links[m] + 2.0 * (shift(alpha, m) - alpha) for m in range(4)])
    return c.replace(psi=psi, links=links)


# --------------------------------------------------------------------------
# energy and gradient
# --------------------------------------------------------------------------

def sw_energy(c: SWConfig) -> float:
    return sw_map(c).norm2()


def sw_gradient(c: SWConfig):
    """Gradient of :func:`sw_energy` as ``(G_psi, G_links)``.

    ``dE = Re <G_psi, dpsi> + <G_links, da>`` with ``<u, v> = sum conj(u) v``.
    """
    res = sw_map(c)
    s, r = res.spinor, res.form
    psi, links = c.psi, c.links
    g_psi = 2.0 * dirac_plus_adjoint(s, links)
    g_psi -= np.einsum("a...,aij,...j->...i", r, SIGMA, psi)

    ph = _phases(links)
    g_links = np.zeros(links.shape)
    for m in range(4):
        t = _act(TAU[m], psi)
        fwd = 0.25j * ph[m][..., None] * shift(t, m)  # d s(x) / d a(x, m)
        bwd = 0.25j * ph[m].conj()[..., None] * t  # d s(x + m) / d a(x, m)
        g_links[m] += 2.0 * np.real(np.sum(s.conj() * fwd + shift(s, m).conj() * bwd, axis=-1))

    # form part: dE/dtheta_p = sum_a 2 r_a * (+-1/2)
    g_theta = np.zeros((6,) + c.lattice.sizes)
    for a, row in enumerate(_SD):
        for p, sgn in row:
            g_theta[p] += sgn * r[a]
    for p, (m, n) in enumerate(c.lattice.pairs):
        G = g_theta[p]
        g_links[m] += G - shift(G, n, -1)
        g_links[n] += shift(G, m, -1) - G
    return g_psi, g_links


def _pack(c: SWConfig) -> np.ndarray:
    return np.concatenate([c.psi.real.ravel(), c.psi.imag.ravel(), c.links.ravel()])


def _unpack(c: SWConfig, x: np.ndarray) -> SWConfig:
    n = c.psi.size
    psi = (x[:n] + 1j * x[n:2 * n]).reshape(c.psi.shape)
    return c.replace(psi=psi, links=x[2 * n:].reshape(c.links.shape))


def _packed_gradient(c: SWConfig) -> np.ndarray:
    g_psi, g_links = sw_gradient(c)
    return np.concatenate([g_psi.real.ravel(), g_psi.imag.ravel(), g_links.ravel()])


def _lbfgs_direction(g, s_hist, y_hist):
    q = g.copy()
    alphas = []
    for s_k, y_k in zip(reversed(s_hist), reversed(y_hist)):
        rho = 1.0 / float(y_k @ s_k)
        a = rho * float(s_k @ q)
        alphas.append((rho, a))
        q -= a * y_k
    if s_hist:
        q *= float(s_hist[-1] @ y_hist[-1]) / float(y_hist[-1] @ y_hist[-1])
    for (s_k, y_k), (rho, a) in zip(zip(s_hist, y_hist), reversed(alphas)):
        q += (a - rho * float(y_k @ q)) * s_k
    return -q


def sw_energy_descent(
    c0: SWConfig,
    max_steps: int = 5000,
    tol: float = 1e-10,
    step: float = 0.2,
    armijo: float = 1e-4,
    memory: int = 10,
):
    """Descent on ``E = ||sw_map||^2`` over spinor and link angles.

    Directions come from limited-memory BFGS on the exact gradient (falling
    back to steepest descent when the quasi-Newton direction is not a descent
    direction); steps are accepted by Armijo backtracking, so the energy
    history is non-increasing.  Returns ``(config, history)`` once
    ``E <= tol`` and raises :class:`NotConverged` (carrying the best iterate
    and the history) otherwise.  ``memory=0`` gives plain gradient descent
    with initial trial step ``step``.
    """
    c = c0
    x = _pack(c)
    E = sw_energy(c)
    g = _packed_gradient(c)
    history = [E]
    s_hist, y_hist = [], []
    for _ in range(max_steps):
        if E <= tol:
            return c, history
        if not np.any(g):
            break
        d = _lbfgs_direction(g, s_hist, y_hist) if memory else -g
        slope = float(g @ d)
        if slope >= 0.0:
            d, slope = -g, -float(g @ g)
            s_hist.clear()
            y_hist.clear()
        t = 1.0 if s_hist else step
        while True:
            x_trial = x + t * d
            trial = _unpack(c, x_trial)
            E_trial = sw_energy(trial)
            if E_trial <= E + armijo * t * slope:
                break
            t *= 0.5
            if t < 1e-14:
                raise NotConverged("line search failed", best=c, history=history, residual=E)
        g_new = _packed_gradient(trial)
        s_k, y_k = x_trial - x, g_new - g
        if memory and float(s_k @ y_k) > 1e-16 * float(y_k @ y_k):
            s_hist.append(s_k)
            y_hist.append(y_k)
            if len(s_hist) > memory:
                s_hist.pop(0)
                y_hist.pop(0)
        c, x, E, g = trial, x_trial, E_trial, g_new
        history.append(E)
    if E <= tol:
        return c, history
    raise NotConverged(f"energy {E:.3e} above {tol:.1e}", best=c, history=history, residual=E)


# --------------------------------------------------------------------------
# diagnostics
# --------------------------------------------------------------------------

def eta_operator_norm(eta) -> float:
    """Operator norm on S+ of the Clifford image of ``i sum eta_a omega_a``, i.e. ``2 |eta|``."""
    return 2.0 * float(np.linalg.norm(eta))


def bound_check(c: SWConfig, max_energy: float = 1e-8, eps: float = 1e-8) -> dict:
    """A priori bound diagnostics at a near-solution.

    ``ratio = max |psi|^2 / (2 |eta|_op + eps)`` with ``|eta|_op`` the operator
    norm of the Clifford image of the (constant) perturbation; the spatially
    constant solutions of ``mu(psi) = -eta`` have ratio exactly 1.  The
    triangle-inequality check compares ``||F+||`` with ``||mu(psi) + eta||``,
    which differ by at most ``sqrt(E)``.
    """
    E = sw_energy(c)
    if E > max_energy:
        raise InputError(f"energy {E:.3e} above {max_energy:.1e}; not a near-solution")
    psi2 = np.sum(np.abs(c.psi) ** 2, axis=-1)
    fplus = self_dual_part(c)
    fminus = anti_self_dual_part(c)
    target = np.moveaxis(mu(c.psi), -1, 0) + c.eta.reshape(3, 1, 1, 1, 1)
    max_psi2 = float(psi2.max())
    ratio = max_psi2 / (2.0 * eta_operator_norm(c.eta) + eps)
    gap = abs(math.sqrt(float(np.sum(fplus**2))) - math.sqrt(float(np.sum(target**2))))
    return {
        "energy": E,
        "max_psi2": max_psi2,
        "f_plus_norm2": float(np.sum(fplus**2)),
        "f_minus_norm2": float(np.sum(fminus**2)),
        "mu_eta_norm2": float(np.sum(target**2)),
        "ratio": ratio,
        "violation": bool(ratio > 1.1),
        "triangle_gap": gap,
        "triangle_ok": bool(gap <= math.sqrt(E) + 1e-15),
    }


def gauge_direction(c: SWConfig, xi: np.ndarray):
    """Infinitesimal gauge action ``R(xi) = (-i xi psi, 2 d xi)``."""
    xi = np.asarray(xi, dtype=float)
    psi_dot = -1j * xi[..., None] * c.psi
    a_dot = np.stack([2.0 * (shift(xi, m) - xi) for m in range(4)])
    return psi_dot, a_dot


def slice_operator(c: SWConfig, delta) -> np.ndarray:
    """Adjoint of :func:`gauge_direction`: ``2 d^* a_dot - Im(conj(psi) . psi_dot)``."""
    psi_dot, a_dot = delta
    dstar = sum(shift(a_dot[m], m, -1) - a_dot[m] for m in range(4))
    return 2.0 * dstar - np.imag(np.sum(c.psi.conj() * psi_dot, axis=-1))


def tangent_inner(u, v) -> float:
    """Real inner product on tangent pairs ``(psi_dot, a_dot)``."""
    return float(np.real(np.sum(u[0].conj() * v[0])) + np.sum(u[1] * v[1]))


def slice_residual(c: SWConfig, delta, xi) -> float:
    """Pairing ``<xi, R^* delta>``; for ``delta = R(xi)`` this is ``||R(xi)||^2``."""
    return float(np.sum(np.asarray(xi) * slice_operator(c, delta)))


def _slice_laplacian(c: SWConfig) -> sp.csr_matrix:
    """Matrix of ``R^* R = 4 d^* d + |psi|^2`` on site functions (C-order flattening)."""
    lat = c.lattice
    V = lat.nsites
    idx = np.arange(V).reshape(lat.sizes)
    ones, sites = np.ones(V), np.arange(V)
    blocks = []
    for m in range(4):
        nb = np.roll(idx, -1, axis=m).ravel()
        blocks.append(sp.csr_matrix((np.r_[ones, -ones], (np.r_[sites, sites], np.r_[nb, sites])), shape=(V, V)))
    D = sp.vstack(blocks).tocsr()
    psi2 = np.sum(np.abs(c.psi) ** 2, axis=-1).ravel()
    return (4.0 * (D.T @ D) + sp.diags(psi2)).tocsr()


def project_to_slice(c: SWConfig, delta):
    """Component of ``delta`` orthogonal to the gauge orbit (kernel of ``R^*``)."""
    L = _slice_laplacian(c).toarray()
    rhs = slice_operator(c, delta).ravel()
    xi = np.linalg.lstsq(L, rhs, rcond=1e-12)[0].reshape(c.lattice.sizes)
    r_psi, r_a = gauge_direction(c, xi)
    return delta[0] - r_psi, delta[1] - r_a


def deformation_residual(c: SWConfig, seed, h: float = 1e-4, scale: float = 1.0) -> float:
    """Norm of the central difference of ``sw_map`` along ``R(xi)`` for a random ``xi``.

    At an exact solution the derivative of the SW map kills infinitesimal
    gauge directions; near a solution the value is bounded by a multiple of
    ``(||sw_map(c)|| + h^2) ||xi||``.
    """
    rng = np.random.default_rng(seed)
    xi = scale * rng.normal(size=c.lattice.sizes)
    psi_dot, a_dot = gauge_direction(c, xi)
    plus = sw_map(c.replace(psi=c.psi + h * psi_dot, links=c.links + h * a_dot))
    minus = sw_map(c.replace(psi=c.psi - h * psi_dot, links=c.links - h * a_dot))
    ds = (plus.spinor - minus.spinor) / (2 * h)
    df = (plus.form - minus.form) / (2 * h)
    return float(math.sqrt(np.sum(np.abs(ds) ** 2) + np.sum(df**2)))


def moduli_dimension(t: TopologicalData) -> ModuliDimension:
    """``d = (c1^2 - 2 chi - 3 sigma) / 4`` and ``ind_C D+ = (c1^2 - sigma) / 8``.

    Raises :class:`NotIntegral` (with the exact rational value) if ``d`` is not
    an integer; the Dirac index is ``None`` when it is not integral.

    The two formulas are consistent with ``d = 2 ind_C D+ - (b0 - b1 + b2+)``
    and ``b0 - b1 + b2+ = (chi + sigma) / 2``, so the deformation-complex index
    ``b1 - b0 - b2+`` equals ``-(chi + sigma) / 2``.  Only ``d`` and the Dirac
    index are exposed.
    """
    raw = Fraction(t.c1_squared - 2 * t.euler - 3 * t.signature, 4)
    if raw.denominator != 1:
        raise NotIntegral(f"virtual dimension {raw} is not an integer", raw=raw)
    ind = Fraction(t.c1_squared - t.signature, 8)
    return ModuliDimension(int(raw), int(ind) if ind.denominator == 1 else None)


# --------------------------------------------------------------------------
# constructors and serialization
# --------------------------------------------------------------------------

def trivial_config(n: int = 4, eta=(0.0, 0.0, 0.0)) -> SWConfig:
    lat = build_torus(4, (n,) * 4)
    return SWConfig(lat, np.zeros(lat.sizes + (2,), complex), np.zeros((4,) + lat.sizes), eta)


def random_config(
    n: int = 4, seed=0, psi_scale: float = 0.3, link_scale: float = 0.3, eta=(0.0, 0.0, 0.0)
) -> SWConfig:
    lat = build_torus(4, (n,) * 4)
    rng = np.random.default_rng(seed)
    psi = psi_scale * (rng.normal(size=lat.sizes + (2,)) + 1j * rng.normal(size=lat.sizes + (2,)))
    links = link_scale * rng.normal(size=(4,) + lat.sizes)
    return SWConfig(lat, psi, links, eta)


def constant_solution(n: int = 4, eta=(0.0, 0.0, 0.0)) -> SWConfig:
    """Spatially constant spinor with ``mu(psi) = -eta`` and trivial links (an exact solution).

    The Bloch vector ``psi^* sigma psi`` must equal ``-4 eta`` and has length
    ``|psi|^2``.
    """
    b = -4.0 * np.asarray(eta, dtype=float)
    r = float(np.linalg.norm(b))
    if r == 0.0:
        return trivial_config(n, eta)
    theta = math.acos(max(-1.0, min(1.0, b[2] / r)))
    phi = math.atan2(b[1], b[0])
    spinor = math.sqrt(r) * np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])
    lat = build_torus(4, (n,) * 4)
    psi = np.broadcast_to(spinor, lat.sizes + (2,))
    return SWConfig(lat, psi, np.zeros((4,) + lat.sizes), eta)


def perturbed(c: SWConfig, seed, psi_scale: float, link_scale: float) -> SWConfig:
    rng = np.random.default_rng(seed)
    dpsi = rng.normal(size=c.psi.shape) + 1j * rng.normal(size=c.psi.shape)
    return c.replace(psi=c.psi + psi_scale * dpsi, links=c.links + link_scale * rng.normal(size=c.links.shape))


def config_to_dict(c: SWConfig) -> dict:
    """Link-field container (with unwrapped angles) plus ``spinor`` and ``eta`` blocks."""
    base = field_to_dict(LinkField(c.lattice, "U1", np.zeros_like(c.links)))
    base["links"] = np.concatenate([c.links[m].ravel(order="F") for m in range(4)]).tolist()
    flat = np.stack([c.psi[..., k].ravel(order="F") for k in range(2)], axis=-1)
    base["spinor"] = [[[z.real, z.imag] for z in site] for site in flat.tolist()]
    base["eta"] = c.eta.tolist()
    return base


def config_from_dict(data: dict) -> SWConfig:
    if data.get("format") != FIELD_FORMAT or "spinor" not in data:
        raise InputError("not a Seiberg-Witten configuration container")
    lat = build_torus(data["lattice"]["dim"], data["lattice"]["sizes"])
    arr = np.asarray(data["links"], dtype=float).reshape(4, lat.nsites)
    links = np.stack([arr[m].reshape(lat.sizes, order="F") for m in range(4)])
    sp_arr = np.asarray(data["spinor"], dtype=float)
    z = sp_arr[..., 0] + 1j * sp_arr[..., 1]
    psi = np.stack([z[:, k].reshape(lat.sizes, order="F") for k in range(2)], axis=-1)
    return SWConfig(lat, psi, links, data.get("eta", [0.0, 0.0, 0.0]))
