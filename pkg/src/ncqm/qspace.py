"""The quantum Hilbert space of Hilbert-Schmidt operators.

States are plain ``(N, N)`` complex arrays ``psi`` (an operator on the
truncated Fock space).  Observables act on them as *superoperators*, kept in
factored form ``psi -> sum_k c_k A_k psi C_k`` and applied with matrix
products.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .fock import build_ladder, check_truncation

__all__ = [
    "ModelParams",
    "SuperOp",
    "OperatorBundle",
    "hs_inner",
    "hs_norm",
    "apply",
    "position_momentum_ops",
    "edge_mask",
    "edge_norm",
    "random_state",
    "matrix_unit",
]


@dataclass(frozen=True)
class ModelParams:
    """Physical constants.  Defaults are natural units ``m = hbar = 1``."""

    m: float = 1.0
    hbar: float = 1.0
    theta: float = 1.0
    omega_l: float = 0.0
    omega_r: float = 0.0

    def __post_init__(self):
        for name in ("m", "hbar", "theta"):
            val = getattr(self, name)
            if not np.isfinite(val) or val <= 0:
                raise ValueError(f"{name} must be positive, got {val!r}")
        for name in ("omega_l", "omega_r"):
            val = getattr(self, name)
            if not np.isfinite(val) or val < 0:
                raise ValueError(f"{name} must be nonnegative, got {val!r}")

    @property
    def T(self):
        """Characteristic time ``m theta / hbar``."""
        return self.m * self.theta / self.hbar


def _check_pair(a, b):
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")


def hs_inner(phi, psi):
    """Hilbert-Schmidt inner product ``tr(phi^dagger psi)``."""
    phi = np.asarray(phi)
    psi = np.asarray(psi)
    _check_pair(phi, psi)
    return complex(np.vdot(phi, psi))


def hs_norm(psi):
    return float(np.linalg.norm(psi))


def matrix_unit(n, i, j):
    """The operator ``|i><j|`` on ``n`` levels."""
    e = np.zeros((n, n), dtype=np.complex128)
    e[i, j] = 1.0
    return e


class SuperOp:
    """Linear map ``psi -> sum_k c_k A_k @ psi @ C_k``.

    ``None`` in place of ``A_k`` or ``C_k`` stands for the identity.  Composition
    ``S @ R`` applies ``R`` first, so left factors multiply as ``A_S A_R`` and
    right factors as ``C_R C_S``.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n, terms):
        self.n = check_truncation(n)
        self.terms = tuple((complex(c), A, C) for c, A, C in terms if c != 0)

    # -- constructors -----------------------------------------------------
    @classmethod
    def left(cls, A, coeff=1.0):
        A = np.asarray(A, dtype=np.complex128)
        return cls(A.shape[0], [(coeff, A, None)])

    @classmethod
    def right(cls, C, coeff=1.0):
        C = np.asarray(C, dtype=np.complex128)
        return cls(C.shape[0], [(coeff, None, C)])

    @classmethod
    def identity(cls, n, coeff=1.0):
        return cls(n, [(coeff, None, None)])

    @classmethod
    def zero(cls, n):
        return cls(n, [])

    # -- algebra ----------------------------------------------------------
    def _same(self, other):
        if self.n != other.n:
            raise DimensionMismatch(f"superoperators on N={self.n} and N={other.n}")

    def __add__(self, other):
        if isinstance(other, SuperOp):
            self._same(other)
            return SuperOp(self.n, self.terms + other.terms)
        return self + SuperOp.identity(self.n, other)

    __radd__ = __add__

    def __neg__(self):
        return SuperOp(self.n, [(-c, A, C) for c, A, C in self.terms])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        if isinstance(scalar, SuperOp):
            return NotImplemented
        return SuperOp(self.n, [(scalar * c, A, C) for c, A, C in self.terms])

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def __matmul__(self, other):
        if not isinstance(other, SuperOp):
            return NotImplemented
        self._same(other)
        terms = []
        for c1, A1, C1 in self.terms:
            for c2, A2, C2 in other.terms:
                terms.append((c1 * c2, _mul(A1, A2), _mul(C2, C1)))
        return SuperOp(self.n, terms)

    @property
    def dag(self):
        """Adjoint with respect to the Hilbert-Schmidt inner product."""
        return SuperOp(
            self.n,
            [(np.conj(c), _adj(A), _adj(C)) for c, A, C in self.terms],
        )

    def commutator(self, other):
        return self @ other - other @ self

    # -- action -----------------------------------------------------------
    def apply(self, psi):
        psi = np.asarray(psi)
        if psi.shape != (self.n, self.n):
            raise DimensionMismatch(f"state shape {psi.shape} vs superoperator N={self.n}")
        out = np.zeros((self.n, self.n), dtype=np.complex128)
        for c, A, C in self.terms:
            t = psi if A is None else A @ psi
            if C is not None:
                t = t @ C
            out += c * t
        return out

    __call__ = apply

    def dense(self, keep=None):
        """Materialize as an ``N^2 x N^2`` matrix on row-major ``psi.ravel()``.

        With ``keep=M`` only matrix units ``|i><j|``, ``i, j < M`` are retained,
        i.e. the compression of the operator onto the leading ``M x M`` block.
        Building at ``N >= M + degree`` and compressing gives the exact matrix
        elements of the untruncated operator on that block.
        """
        n = self.n
        eye = np.eye(n, dtype=np.complex128)
        D = np.zeros((n * n, n * n), dtype=np.complex128)
        for c, A, C in self.terms:
            L = eye if A is None else A
            R = eye if C is None else C
            D += c * np.kron(L, R.T)
        if keep is not None and keep < n:
            idx = (np.arange(keep)[:, None] * n + np.arange(keep)[None, :]).ravel()
            D = D[np.ix_(idx, idx)]
        return D

    def __repr__(self):
        return f"SuperOp(n={self.n}, terms={len(self.terms)})"


def _mul(X, Y):
    if X is None:
        return Y
    if Y is None:
        return X
    return X @ Y


def _adj(X):
    return None if X is None else X.conj().T


def apply(op, psi):
    """Apply a superoperator to a state; see :meth:`SuperOp.apply`."""
    return op.apply(psi)


@dataclass(frozen=True)
class OperatorBundle:
    """Position, momentum and ladder superoperators on ``H_q``."""

    X: SuperOp
    Y: SuperOp
    Px: SuperOp
    Py: SuperOp
    B_L: SuperOp
    B_Ldag: SuperOp
    B_R: SuperOp
    B_Rdag: SuperOp
    P: SuperOp
    Pdag: SuperOp
    x: np.ndarray
    y: np.ndarray


def position_momentum_ops(params, n):
    """Schroedinger-type representation of the Heisenberg algebra on ``H_q``.

    Positions act by left multiplication, momenta adjointly:
    ``Px psi = (hbar/theta)[y, psi]``, ``Py psi = -(hbar/theta)[x, psi]``, which
    gives ``P = Px + i Py = -i hbar sqrt(2/theta) [b, .]``.
    """
    b, bd = build_ladder(n)
    th, hb = params.theta, params.hbar
    s = np.sqrt(th / 2.0)
    x = s * (b + bd)
    y = -1j * s * (b - bd)
    X = SuperOp.left(x)
    Y = SuperOp.left(y)
    Px = (hb / th) * (SuperOp.left(y) - SuperOp.right(y))
    Py = -(hb / th) * (SuperOp.left(x) - SuperOp.right(x))
    B_L, B_Ldag = SuperOp.left(b), SuperOp.left(bd)
    B_R, B_Rdag = SuperOp.right(b), SuperOp.right(bd)
    k = hb * np.sqrt(2.0 / th)
    P = (-1j * k) * (B_L - B_R)
    Pdag = (1j * k) * (B_Ldag - B_Rdag)
    return OperatorBundle(X, Y, Px, Py, B_L, B_Ldag, B_R, B_Rdag, P, Pdag, x, y)


def edge_mask(n, margin=4):
    """Boolean ``(n, n)`` mask of entries away from the truncation edge."""
    keep = np.arange(n) < n - margin
    return keep[:, None] & keep[None, :]


def edge_norm(M, margin=4):
    """HS norm of ``M`` restricted to rows and columns ``< N - margin``."""
    M = np.asarray(M)
    k = M.shape[0] - margin
    return float(np.linalg.norm(M[:k, :k]))


def random_state(n, rng, margin=0):
    """Random normalized state; entries in the top ``margin`` rows/cols vanish."""
    psi = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    if margin:
        psi[~edge_mask(n, margin)] = 0.0
    return psi / np.linalg.norm(psi)
