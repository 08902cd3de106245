"""Wilson-Dirac operator on the 2-torus with constant magnetic flux.

Spinors are complex site fields with two components, flattened as
``2 * site + spin`` with sites in canonical (``x_1`` fastest) order.  The
covariant shifts are

    (T_mu psi)(x) = conj(U(x, mu)) psi(x + mu),

i.e. spinors carry charge -1 and transform as ``psi -> g psi`` when the links
transform as in :func:`gaugekit.gauge_field.apply_gauge`.  The operator is

    D = sum_mu gamma_mu (T_mu - T_mu^*) / 2  -  (r / 2) sum_mu (T_mu + T_mu^* - 2)

with ``gamma_1 = sigma_1``, ``gamma_2 = sigma_2`` and
``gamma_5 = -i gamma_1 gamma_2 = sigma_3``.  Since ``D^2`` contains
``gamma_1 gamma_2 [nabla_1, nabla_2] = i gamma_5 F``, the sign of the charge
alone decides which chirality carries the zero modes; charge -1 makes
positive flux give ``index = +d``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import BadFlux, InputError, NoSpectralGap
from .gauge_field import LinkField, constant_flux_t2, plaquette_field

__all__ = [
    "GAMMA1",
    "GAMMA2",
    "GAMMA5",
    "MagneticDiracOp",
    "SpectrumReport",
    "build_dirac",
    "build_dirac_t2",
    "spectrum",
    "free_dispersion",
    "weitzenboeck_residual",
]

GAMMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
GAMMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
GAMMA5 = -1j * GAMMA1 @ GAMMA2
_I2 = np.eye(2, dtype=complex)

DENSE_LIMIT = 4096
GAP_FACTOR = 10.0


def _check_clifford():
    for g in (GAMMA1, GAMMA2, GAMMA5):
        if not np.array_equal(g @ g, _I2):
            raise ArithmeticError("gamma matrices must square to one")
    if not np.array_equal(GAMMA1 @ GAMMA2 + GAMMA2 @ GAMMA1, np.zeros((2, 2))):
        raise ArithmeticError("gamma_1 and gamma_2 must anticommute")


def _shift_operators(field: LinkField) -> list:
    """Sparse covariant forward shifts ``T_mu`` on scalar site fields."""
    lat = field.lattice
    V = lat.nsites
    idx = np.arange(V).reshape(lat.sizes, order="F")
    out = []
    for mu in range(lat.dim):
        nb = np.roll(idx, -1, axis=mu)
        phase = np.exp(-1j * np.asarray(field.links[mu]))
        rows = idx.ravel(order="F")
        out.append(
            sp.csr_matrix((phase.ravel(order="F"), (rows, nb.ravel(order="F"))), shape=(V, V))
        )
    return out


@dataclass(frozen=True, eq=False)
class MagneticDiracOp:
    """Immutable sparse Wilson-Dirac operator and its ingredients."""

    field: LinkField
    r: float
    flux: int | None = None
    matrix: sp.csr_matrix = field(init=False, repr=False)
    shifts: tuple = field(init=False, repr=False)

    def __post_init__(self):
        _check_clifford()
        if self.field.group != "U1" or self.field.lattice.dim != 2:
            raise InputError("the Dirac operator needs a U1 field on a 2-torus")
        if not 0.0 <= self.r <= 1.0:
            raise InputError("Wilson parameter must lie in [0, 1]")
        T = _shift_operators(self.field)
        V = self.field.lattice.nsites
        D = sp.csr_matrix((2 * V, 2 * V), dtype=complex)
        eye = sp.identity(V, dtype=complex, format="csr")
        for mu, g in enumerate((GAMMA1, GAMMA2)):
            Tdag = T[mu].conj().T
            D = D + sp.kron((T[mu] - Tdag) / 2, g) - (self.r / 2) * sp.kron(T[mu] + Tdag - 2 * eye, _I2)
        D = D.tocsr()
        D.sum_duplicates()
        object.__setattr__(self, "matrix", D)
        object.__setattr__(self, "shifts", tuple(T))

    @property
    def size(self) -> int:
        return self.field.lattice.sizes[0]

    @property
    def nrows(self) -> int:
        return self.matrix.shape[0]

    def gamma5(self) -> sp.csr_matrix:
        return sp.kron(sp.identity(self.field.lattice.nsites), GAMMA5, format="csr")

    def hermitian_form(self) -> sp.csr_matrix:
        """``H = gamma_5 D``, Hermitian by gamma_5-Hermiticity."""
        return (self.gamma5() @ self.matrix).tocsr()

    def apply(self, psi: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(psi).ravel()

    def gamma5_hermiticity_defect(self) -> float:
        g5 = self.gamma5()
        diff = g5 @ self.matrix @ g5 - self.matrix.conj().T
        return float(abs(diff).max()) if diff.nnz else 0.0


def build_dirac(field: LinkField, r: float) -> MagneticDiracOp:
    return MagneticDiracOp(field, float(r))


def build_dirac_t2(N: int, d: int, r: float) -> MagneticDiracOp:
    """Wilson-Dirac operator on the N x N torus with the constant flux-``d`` field."""
    if N < 8:
        raise InputError("need N >= 8")
    if not 0.0 < r <= 1.0:
        raise InputError("Wilson parameter must lie in (0, 1]")
    if 4 * abs(d) >= N * N:
        raise BadFlux(f"|d| = {abs(d)} must be below N^2 / 4 = {N * N / 4}")
    return MagneticDiracOp(constant_flux_t2(N, d), float(r), flux=int(d))


@dataclass
class SpectrumReport:
    magnitudes: np.ndarray
    chiralities: np.ndarray
    zero_modes: int
    zero_chiralities: np.ndarray
    index: int
    gap_ratio: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["eigenvalue", "chirality"])
        for m, c in zip(self.magnitudes, self.chiralities):
            w.writerow([repr(float(m)), repr(float(c))])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "magnitudes": [float(m) for m in self.magnitudes],
            "chiralities": [float(c) for c in self.chiralities],
            "zero_modes": self.zero_modes,
            "zero_chiralities": [float(c) for c in self.zero_chiralities],
            "index": self.index,
            "gap_ratio": self.gap_ratio,
        }


def _lowest_eigenpairs(H: sp.csr_matrix, k: int):
    n = H.shape[0]
    if n <= DENSE_LIMIT:
        w, v = np.linalg.eigh(H.toarray())
    else:
        # shift slightly off zero so exact zero modes do not make the shift singular
        v0 = np.ones(n, dtype=complex)
        w, v = spla.eigsh(H, k=k, sigma=1e-7, which="LM", v0=v0, tol=1e-12)
    order = np.argsort(np.abs(w), kind="stable")[:k]
    return w[order], v[:, order]


def spectrum(op: MagneticDiracOp, k: int | None = None, gap_factor: float = GAP_FACTOR) -> SpectrumReport:
    """Smallest-magnitude eigenpairs of ``H = gamma_5 D`` and the chirality index.

    The near-zero cluster ends at the largest ratio between consecutive
    magnitudes; that ratio must be at least ``gap_factor``.  The chirality of
    the cluster is read from ``gamma_5`` compressed to the cluster subspace, so
    degenerate zero modes of opposite chirality are separated correctly.
    """
    d = op.flux if op.flux is not None else 0
    if k is None:
        k = abs(d) + 6
    if k < abs(d) + 4:
        raise InputError("k must be at least |d| + 4")
    H = op.hermitian_form()
    w, v = _lowest_eigenpairs(H, k)
    mags = np.abs(w)
    g5 = op.gamma5()
    chir = np.real(np.einsum("ij,ij->j", v.conj(), g5 @ v))
    floor = 1e-10 * max(float(mags.max()), 1.0)
    m = np.maximum(mags, floor)
    ratios = m[1:] / m[:-1]
    c = int(np.argmax(ratios)) + 1
    gap = float(ratios[c - 1])
    if gap < gap_factor:
        raise NoSpectralGap(f"largest consecutive ratio {gap:.2f} is below {gap_factor}")
    cluster = v[:, :c]
    zchir = np.linalg.eigvalsh(cluster.conj().T @ (g5 @ cluster))
    index = int(np.sum(zchir > 0.5) - np.sum(zchir < -0.5))
    return SpectrumReport(mags, np.clip(chir, -1.0, 1.0), c, np.clip(zchir, -1.0, 1.0), index, gap)


def free_dispersion(N: int) -> np.ndarray:
    """Sorted imaginary parts of the free (d = 0, r = 0) eigenvalues ``+-sqrt(sin^2 p1 + sin^2 p2)``."""
    p = 2 * np.pi * np.arange(N) / N
    s = np.sqrt(np.sin(p)[:, None] ** 2 + np.sin(p)[None, :] ** 2).ravel()
    return np.sort(np.concatenate([s, -s]))


def weitzenboeck_residual(N: int, d: int, seed) -> float:
    """Relative residual of ``D_c^2 psi = nabla^* nabla psi + (1/2) F . psi`` for a random spinor.

    ``D_c = i D`` (with ``r = 0``) is the self-adjoint Dirac operator built from
    the Clifford generators ``e_mu = i gamma_mu``; ``nabla^* nabla`` is
    ``-sum_mu (nabla^c_mu)^2`` with central covariant differences; ``F`` is the
    curvature of the determinant line, i.e. twice the plaquette log of the
    spinor transport (``-theta_p`` for charge -1), acting through ``e_1 e_2``.
    """
    if 4 * abs(d) >= N * N:
        raise BadFlux(f"|d| = {abs(d)} must be below N^2 / 4")
    fld = constant_flux_t2(N, d)
    op = MagneticDiracOp(fld, 0.0, flux=int(d))
    V = fld.lattice.nsites
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=2 * V) + 1j * rng.normal(size=2 * V)
    Dc = 1j * op.matrix
    lhs = Dc @ (Dc @ psi)
    rough = np.zeros(2 * V, dtype=complex)
    for T in op.shifts:
        c = sp.kron((T - T.conj().T) / 2, _I2, format="csr")
        rough -= c @ (c @ psi)
    # det-line curvature 2 i (-theta_p) at the plaquette based at x
    theta = -plaquette_field(fld)[0].ravel(order="F")
    e12 = (1j * GAMMA1) @ (1j * GAMMA2)
    curv = 0.5 * (2j * theta)[:, None, None] * e12[None]
    fpsi = np.einsum("sij,sj->si", curv, psi.reshape(V, 2)).ravel()
    res = lhs - (rough + fpsi)
    return float(np.linalg.norm(res) / np.linalg.norm(psi))
