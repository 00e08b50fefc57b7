"""Coherent-state structures on the quantum Hilbert space.

``|z) = |z><z|`` and ``|z,v) = exp((conj(z) v - conj(v) z)/2) |z><z+v|``
form overcomplete families.  ``pi_{z,v} = |z,v)(z,v| / pi^2`` is a POVM
with respect to the Lebesgue measure ``d^2z d^2v``.

Density conventions used throughout:

* ``povm_prob_zv`` is a density in ``d^2z d^2v`` (integrates to 1).
* ``marginal_prob_z`` is its ``v``-marginal, a density in ``d^2z``.  It equals
  ``(psi| pi_z |psi)`` with ``pi_z = (1/pi) |z) * (z|``.
* ``marginal_prob_xy`` is the same density per unit physical area
  ``dx dy = 2 theta d^2z``.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import roots_hermite

from .errors import DomainError, QuadratureWarning
from .fock import check_truncation, coherent_amplitudes, coherent_batch
from .overlap import _phase, overlap_zv, zv_guard  # noqa: F401
from .qspace import position_momentum_ops

__all__ = [
    "QuadratureGrid",
    "state_z",
    "state_zv",
    "translation_generator",
    "translate_dense",
    "povm_prob_zv",
    "marginal_prob_z",
    "marginal_prob_xy",
    "pi_z_series",
    "identity_resolution_matrix",
    "identity_resolution_check",
    "integrate_pzv",
    "position_uncertainty",
]


@dataclass(frozen=True)
class QuadratureGrid:
    """Nodes and positive weights for ``integral f(z) d^2z`` over the plane."""

    nodes: np.ndarray
    weights: np.ndarray
    scheme: str = "gauss-hermite"

    @classmethod
    def gauss_hermite(cls, order=40, scale=1.0):
        """Tensor Gauss-Hermite rule, rescaled to integrate plain functions.

        Exact for ``exp(-|z|^2/scale^2)`` times polynomials of degree
        ``< 2*order`` in each real coordinate.
        """
        x, w = roots_hermite(order)
        w = w * np.exp(x**2) * scale
        x = x * scale
        X, Y = np.meshgrid(x, x, indexing="ij")
        W = np.outer(w, w)
        return cls((X + 1j * Y).ravel(), W.ravel(), "gauss-hermite")

    @classmethod
    def uniform_disc(cls, radius, spacing=0.25):
        """Square lattice restricted to a disc (midpoint/trapezoid weights)."""
        m = int(np.floor(radius / spacing))
        x = spacing * np.arange(-m, m + 1)
        X, Y = np.meshgrid(x, x, indexing="ij")
        Z = (X + 1j * Y).ravel()
        Z = Z[np.abs(Z) <= radius + 1e-12]
        return cls(Z, np.full(Z.size, spacing**2), "uniform")

    def shifted(self, center):
        return QuadratureGrid(self.nodes + center, self.weights, self.scheme)

    def integrate(self, values):
        return np.sum(self.weights * values)

    def __len__(self):
        return self.nodes.size


def state_z(z, n):
    """The rank-one projector ``|z><z|`` on ``n`` levels."""
    c = coherent_batch(complex(z), n)
    return np.outer(c, c.conj())


def state_zv(z, v, n):
    """``|z,v) = exp((conj(z) v - conj(v) z)/2) |z><z+v|``; ``state_z`` at ``v=0``."""
    z, v = complex(z), complex(v)
    cz = coherent_batch(z, n)
    cw = coherent_batch(z + v, n)
    return _phase(z, v) * np.outer(cz, cw.conj())


def translation_generator(z, params, n):
    """Generator ``-(i/hbar) sqrt(theta/2) (conj(z) P + z P^dag)``.

    Its exponential translates states by the dimensionless amount ``z``
    (physical displacement ``sqrt(2 theta) z``).
    """
    ops = position_momentum_ops(params, n)
    s = np.sqrt(params.theta / 2.0) / params.hbar
    return (-1j * s) * (np.conj(z) * ops.P + z * ops.Pdag)


def translate_dense(z, psi, params, max_n=32):
    """Apply ``T(z)`` by exponentiating the dense superoperator (oracle route)."""
    n = psi.shape[0]
    if n > max_n:
        raise DomainError(f"dense translation limited to N <= {max_n}, got {n}")
    G = translation_generator(z, params, n).dense()
    return (scipy.linalg.expm(G) @ psi.ravel()).reshape(n, n)


def povm_prob_zv(psi, z, v):
    """Density ``P(z,v) = |(z,v|psi)|^2 / pi^2`` in ``d^2z d^2v``."""
    return np.abs(overlap_zv(psi, z, v)) ** 2 / math.pi**2


def _v_grid(order):
    return QuadratureGrid.gauss_hermite(order)


def marginal_prob_z(psi, z, order=40, tol=1e-8):
    """``P(z) = integral d^2v P(z,v)`` by Gauss-Hermite quadrature.

    The ``v`` nodes are centered at ``v = -z`` (Gaussian weight
    ``exp(-|z+v|^2)``, which every overlap carries).  Nodes outside the tail
    guard are dropped; a :class:`QuadratureWarning` is issued when the dropped
    Gaussian mass or the order-halving difference exceeds ``tol``.
    """
    psi = np.asarray(psi)
    n = psi.shape[0]
    z = complex(z)

    def _quad(q):
        g = _v_grid(q).shifted(-z)
        v = g.nodes
        ok = zv_guard(z, v, n)
        vals = povm_prob_zv(psi, np.full(ok.sum(), z), v[ok])
        raw = g.weights * np.exp(-np.abs(g.nodes + z) ** 2)
        return np.sum(g.weights[ok] * vals), raw[~ok].sum() / math.pi

    full, dropped = _quad(order)
    half, _ = _quad(max(order // 2, 4))
    err = max(dropped, abs(full - half))
    if err > tol:
        warnings.warn(
            f"marginal_prob_z: estimated quadrature error {err:.3g} exceeds {tol:g}",
            QuadratureWarning,
            stacklevel=2,
        )
    return float(full)


def marginal_prob_xy(psi, z, params, **kw):
    """``P(z)`` per unit physical area ``dx dy``."""
    return marginal_prob_z(psi, z, **kw) / (2.0 * params.theta)


def pi_z_series(psi, z, order=6):
    """Nonlocal route: ``(1/pi) sum_{k<=order} |d^k_z F|^2 / k!``.

    ``F(z + v, conj z) = exp(|v|^2/2) (z,v|psi)`` is holomorphic in its first
    slot; this is the star-product form ``(psi|z) * (z|psi) / pi`` expanded in
    derivatives and evaluated exactly from the matrix elements of ``psi``.
    """
    psi = np.asarray(psi)
    n = psi.shape[0]
    z = complex(z)
    zb = z.conjugate()
    row = np.empty(n, dtype=np.complex128)  # conj(z)^k / sqrt(k!)
    ez = np.empty(n, dtype=np.complex128)  # z^j / j!
    row[0] = ez[0] = 1.0
    for k in range(1, n):
        row[k] = row[k - 1] * zb / math.sqrt(k)
        ez[k] = ez[k - 1] * z / k
    rpsi = row @ psi
    half_lf = 0.5 * np.array([math.lgamma(k + 1) for k in range(n)])
    # g_q: v^q Taylor coefficient of g(conj z, z + v) = sum_k rpsi_k (z+v)^k / sqrt(k!)
    gq = np.zeros(order + 1, dtype=np.complex128)
    for q in range(min(order, n - 1) + 1):
        k = np.arange(q, n)
        gq[q] = np.sum(rpsi[k] * ez[k - q] * np.exp(half_lf[k] - math.lgamma(q + 1)))
    total = 0.0
    for m in range(order + 1):
        t = sum(((-zb) ** a / math.factorial(a)) * gq[m - a] for a in range(m + 1))
        total += math.factorial(m) * abs(t) ** 2
    return math.exp(-2.0 * abs(z) ** 2) * total / math.pi


def identity_resolution_matrix(n_check, order=40):
    """Quadrature of ``(dz/pi)(dv/pi) |z,v)(z,v|`` between matrix units.

    Returns the ``(n_check^2, n_check^2)`` matrix with entries
    ``((ij| R |kl))`` on matrix units ``|i><j|`` with indices ``< n_check``.
    The integrand of a matrix-unit pair factorizes into ``z`` and ``w = z + v``
    pieces (the phase has unit modulus), so each is a 2-D Gauss-Hermite sum.
    """
    g = QuadratureGrid.gauss_hermite(order)
    a = coherent_amplitudes(g.nodes, n_check)  # <k|z>
    Mz = np.einsum("q,qi,qk->ik", g.weights / math.pi, a, a.conj())  # sum <i|z><z|k>
    Mw = np.einsum("q,qj,ql->jl", g.weights / math.pi, a.conj(), a)  # sum <w|j><l|w>
    # ((ij|R|kl)) = sum_z <i|z><z|k> * sum_w <l|w><w|j>  (indices i,j | k,l)
    R = np.einsum("ik,jl->ijkl", Mz, Mw)
    return R.reshape(n_check * n_check, n_check * n_check)


def identity_resolution_check(n, n_check=None, order=40):
    """Max deviation of the quadrature identity from ``delta_ik delta_jl``.

    ``n_check`` defaults to ``max(1, N // 8)``; indices ``0 .. n_check`` are
    checked, i.e. ``(n_check + 1)^2`` matrix units.
    """
    n = check_truncation(n)
    if n_check is None:
        n_check = max(1, n // 8)
    if n_check > n // 8 and n_check > 1:
        raise DomainError(f"n_check={n_check} exceeds N/8 for N={n}")
    m = n_check + 1
    R = identity_resolution_matrix(m, order)
    return float(np.max(np.abs(R - np.eye(m * m))))


def integrate_pzv(psi, z_grid, v_order=40):
    """``integral d^2z d^2v |(z,v|psi)|^2 / pi^2`` over a ``z`` grid.

    For each ``z`` node the ``v`` integral uses a Hermite rule centered at
    ``v = -z``.  Node pairs outside the representable region are skipped.
    Returns ``(integral, skipped_fraction)``.
    """
    psi = np.asarray(psi)
    n = psi.shape[0]
    vg = _v_grid(v_order)
    w_all = vg.nodes  # z + v at the Hermite nodes
    total = 0.0
    skipped = 0
    for z, wz in zip(z_grid.nodes, z_grid.weights):
        ok = np.abs(z) ** 2 + np.abs(w_all) ** 2 <= n / 2.0
        skipped += int((~ok).sum())
        if not ok.any():
            continue
        cz = coherent_amplitudes(z, n)
        cz = cz / np.linalg.norm(cz)
        cw = coherent_amplitudes(w_all[ok], n)
        cw = cw / np.linalg.norm(cw, axis=1, keepdims=True)
        vals = np.abs(cw @ (cz.conj() @ psi)) ** 2 / math.pi**2
        total += wz * np.sum(vg.weights[ok] * vals)
    return float(total), skipped / (len(z_grid) * len(vg))


def position_uncertainty(psi, params):
    """``(Delta_X, Delta_Y)`` for a normalized state under left multiplication."""
    ops = position_momentum_ops(params, psi.shape[0])
    out = []
    for A in (ops.x, ops.y):
        Ap = A @ psi
        mean = np.vdot(psi, Ap).real
        sq = np.vdot(Ap, Ap).real
        out.append(math.sqrt(max(sq - mean**2, 0.0)))
    return tuple(out)
