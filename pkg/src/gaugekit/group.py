"""Structure groups U(1) and SU(2) and the Lie algebra su(2).

SU(2) is stored as unit quaternions ``(w, x, y, z) = w + x i + y j + z k``;
su(2) as imaginary quaternions, i.e. 3-vectors ``v`` standing for
``v[0] i + v[1] j + v[2] k``.  The 2x2 matrix picture used for traces and
determinants is the homomorphism

    w + x i + y j + z k  ->  [[w + i x,  y + i z],
                              [-y + i z, w - i x]]

so ``i -> i sigma_3``, ``j -> i sigma_2``, ``k -> i sigma_1``.

Besides the small immutable scalar types (:class:`U1`, :class:`SU2`,
:class:`Su2Alg`) the module exposes vectorised kernels (``qmul``, ``qexp``,
...) operating on arrays whose last axis holds the quaternion or algebra
components.  Lattice code uses the kernels directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AntipodalElement, NonUnit

__all__ = [
    "U1",
    "SU2",
    "Su2Alg",
    "su2_exp",
    "su2_log",
    "trace_square",
    "det_alg",
    "u1_principal_arg",
    "wrap_angle",
    "qmul",
    "qconj",
    "qexp",
    "qlog",
    "qnormalize",
    "quat_matrix",
    "alg_matrix",
    "IDENTITY_Q",
]

IDENTITY_Q = np.array([1.0, 0.0, 0.0, 0.0])
ANTIPODE_TOL = 1e-9


# --------------------------------------------------------------------------
# vectorised kernels
# --------------------------------------------------------------------------

def wrap_angle(t):
    """Map angles into the principal branch (-pi, pi]; -pi goes to +pi."""
    t = np.asarray(t, dtype=float)
    out = np.pi - np.mod(np.pi - t, 2.0 * np.pi)
    if out.ndim == 0:
        return float(out)
    return out


def qmul(a, b):
    """Hamilton product of quaternion arrays (broadcasting over leading axes)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def qconj(q):
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def qnormalize(q):
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def qexp(v):
    """Exponential of imaginary quaternions ``v`` (shape ``(..., 3)``)."""
    v = np.asarray(v, dtype=float)
    theta = np.linalg.norm(v, axis=-1, keepdims=True)
    # sin(t)/t with a series branch near zero
    small = theta < 1e-8
    safe = np.where(small, 1.0, theta)
    sinc = np.where(small, 1.0 - theta**2 / 6.0, np.sin(safe) / safe)
    return np.concatenate([np.cos(theta), sinc * v], axis=-1)


def qlog(q, tol=ANTIPODE_TOL):
    """Principal logarithm of unit quaternions; result has norm below pi."""
    q = np.asarray(q, dtype=float)
    dist = np.linalg.norm(q - IDENTITY_Q * -1.0, axis=-1)
    if np.any(dist < tol):
        raise AntipodalElement("logarithm undefined at the antipode -1")
    w = np.clip(q[..., 0], -1.0, 1.0)
    im = q[..., 1:]
    s = np.linalg.norm(im, axis=-1, keepdims=True)
    theta = np.arctan2(s, w[..., None])
    small = s < 1e-12
    factor = np.where(small, 1.0, theta / np.where(small, 1.0, s))
    return factor * im


def quat_matrix(q):
    """2x2 complex matrix of a quaternion array."""
    q = np.asarray(q, dtype=float)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    m = np.empty(q.shape[:-1] + (2, 2), dtype=complex)
    m[..., 0, 0] = w + 1j * x
    m[..., 0, 1] = y + 1j * z
    m[..., 1, 0] = -y + 1j * z
    m[..., 1, 1] = w - 1j * x
    return m


def alg_matrix(v):
    """Traceless anti-Hermitian 2x2 matrix of an su(2) vector array."""
    v = np.asarray(v, dtype=float)
    zeros = np.zeros(v.shape[:-1] + (1,))
    return quat_matrix(np.concatenate([zeros, v], axis=-1))


# --------------------------------------------------------------------------
# scalar types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class U1:
    """Unit complex number ``exp(i angle)`` with angle in (-pi, pi]."""

    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", wrap_angle(float(self.angle)))

    @classmethod
    def identity(cls) -> "U1":
        return cls(0.0)

    def __mul__(self, other: "U1") -> "U1":
        return U1(self.angle + other.angle)

    def inverse(self) -> "U1":
        return U1(-self.angle)

    def __pow__(self, k: int) -> "U1":
        return U1(k * self.angle)

    @property
    def value(self) -> complex:
        return complex(math.cos(self.angle), math.sin(self.angle))

    def trace(self) -> complex:
        return self.value

    def distance(self, other: "U1") -> float:
        return abs(self.value - other.value)


@dataclass(frozen=True)
class SU2:
    """Unit quaternion; renormalised on construction."""

    q: tuple

    def __post_init__(self):
        arr = np.asarray(self.q, dtype=float).reshape(4)
        n = np.linalg.norm(arr)
        if not np.isfinite(n) or n == 0.0:
            raise NonUnit("quaternion must be finite and nonzero")
        object.__setattr__(self, "q", tuple(float(c) for c in arr / n))

    @classmethod
    def identity(cls) -> "SU2":
        return cls((1.0, 0.0, 0.0, 0.0))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.q)

    def __mul__(self, other: "SU2") -> "SU2":
        return SU2(qmul(self.array, other.array))

    def inverse(self) -> "SU2":
        return SU2(qconj(self.array))

    def matrix(self) -> np.ndarray:
        return quat_matrix(self.array)

    def trace(self) -> float:
        return 2.0 * self.q[0]

    def distance(self, other: "SU2") -> float:
        return float(np.linalg.norm(self.array - other.array))


@dataclass(frozen=True)
class Su2Alg:
    """Element of su(2) as an imaginary quaternion ``v . (i, j, k)``."""

    v: tuple

    def __post_init__(self):
        arr = np.asarray(self.v, dtype=float).reshape(3)
        object.__setattr__(self, "v", tuple(float(c) for c in arr))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.v)

    def matrix(self) -> np.ndarray:
        return alg_matrix(self.array)

    def bracket(self, other: "Su2Alg") -> "Su2Alg":
        # [u, v] = 2 u x v for imaginary quaternions
        return Su2Alg(2.0 * np.cross(self.array, other.array))

    def __add__(self, other: "Su2Alg") -> "Su2Alg":
        return Su2Alg(self.array + other.array)

    def __mul__(self, s: float) -> "Su2Alg":
        return Su2Alg(self.array * s)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self.array))


def su2_exp(xi: Su2Alg) -> SU2:
    return SU2(qexp(xi.array))


def su2_log(g: SU2) -> Su2Alg:
    """Principal logarithm; raises :class:`AntipodalElement` near -1."""
    return Su2Alg(qlog(g.array))


def trace_square(xi: Su2Alg) -> float:
    """tr(xi^2) evaluated in the 2x2 matrix picture."""
    m = xi.matrix()
    return float(np.trace(m @ m).real)


def det_alg(xi: Su2Alg) -> float:
    return float(np.linalg.det(xi.matrix()).real)


def u1_principal_arg(z: complex, tol: float = 1e-9) -> float:
    """Argument of a unit complex number in (-pi, pi]."""
    z = complex(z)
    if abs(abs(z) - 1.0) > tol:
        raise NonUnit(f"|z| = {abs(z)!r} is not 1")
    return wrap_angle(math.atan2(z.imag, z.real))
