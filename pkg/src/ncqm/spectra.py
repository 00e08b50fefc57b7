"""Angular momentum, the free particle and the generalized oscillator.

The oscillator

    H = PP^dag/2m + m theta omega_L^2 B_L^dag B_L + m theta omega_R^2 B_R B_R^dag

is quadratic in left and right ladder actions and is diagonalized by a
hyperbolic (Bogoliubov) rotation between them.  Its spectrum is
``E(n1, n2) = n1 K1 + (n2 + 1) K2 - m theta omega_R^2``.
"""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal, eigvalsh

from .errors import DegenerateModel, DomainError, SeriesTruncationWarning
from .fock import check_truncation
from .qspace import ModelParams, SuperOp, hs_inner, position_momentum_ops

__all__ = [
    "angular_momentum_superop",
    "angular_momentum_composite",
    "measured_angular_momentum",
    "AngularState",
    "angular_overlap_closed",
    "free_hamiltonian",
    "free_hamiltonian_bform",
    "momentum_state",
    "free_pzv_closed",
    "ho_hamiltonian",
    "ho_hamiltonian_bform",
    "ho_sector_matrix",
    "ho_compressed_spectrum",
    "ho_dense_eigenvalues",
    "BogoliubovData",
    "bogoliubov",
    "ho_spectrum",
    "ho_lowest_levels",
    "bogoliubov_ladders",
    "ho_ground_state",
    "ho_excited",
    "ho_ground_pzv_closed",
    "one_minus_gamma_scales",
]


# --------------------------------------------------------------------------
# angular momentum
# --------------------------------------------------------------------------
def angular_momentum_superop(params, n):
    """``L = hbar (B_R B_R^dag - B_L^dag B_L)``: right minus left number."""
    ops = position_momentum_ops(params, n)
    return params.hbar * (ops.B_R @ ops.B_Rdag - ops.B_Ldag @ ops.B_L)


def angular_momentum_composite(params, n):
    """``X_L P_y - Y_L P_x + (theta / 2 hbar) P P^dag``."""
    ops = position_momentum_ops(params, n)
    return ops.X @ ops.Py - ops.Y @ ops.Px + (params.theta / (2 * params.hbar)) * (ops.P @ ops.Pdag)


def measured_angular_momentum(psi, params):
    """``(psi| L |psi) / (hbar (psi|psi))`` as a real number."""
    L = angular_momentum_superop(params, psi.shape[0])
    return (hs_inner(psi, L(psi)) / hs_inner(psi, psi)).real / params.hbar


@dataclass(frozen=True)
class AngularState:
    """``|l) = sum_n alpha_n |n><n+l|`` with normalized coefficients."""

    l: int
    coeffs: np.ndarray = field(default_factory=lambda: np.array([1.0 + 0j]))

    def __post_init__(self):
        if int(self.l) != self.l or self.l < 0:
            raise ValueError(f"l must be a nonnegative integer, got {self.l!r}")
        c = np.asarray(self.coeffs, dtype=np.complex128).ravel()
        nrm = np.linalg.norm(c)
        if nrm == 0:
            raise ValueError("coefficients must not all vanish")
        c = c / nrm
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def matrix(self, n):
        n = check_truncation(n)
        if self.coeffs.size + self.l > n:
            raise DomainError(f"|l={self.l}) with {self.coeffs.size} terms needs N >= {self.coeffs.size + self.l}")
        psi = np.zeros((n, n), dtype=np.complex128)
        k = np.arange(self.coeffs.size)
        psi[k, k + self.l] = self.coeffs
        return psi


def angular_overlap_closed(z, v, state, n=None, tol=1e-10):
    """Closed-form ``(z,v|l)`` as a power series in ``conj(z)(z+v)``.

    With a truncation ``n`` only terms with ``k + l < n`` are summed; a
    :class:`SeriesTruncationWarning` is issued if the dropped terms exceed
    ``tol`` in magnitude.
    """
    z, v = complex(z), complex(v)
    w = z + v
    l = state.l
    pref = np.exp(0.5 * (np.conj(v) * z - np.conj(z) * v) - 0.5 * (abs(z) ** 2 + abs(w) ** 2))
    total = 0j
    dropped = 0j
    x = np.conj(z) * w
    for k, a in enumerate(state.coeffs):
        # alpha_k (zbar w)^k / k! * w^l / sqrt((k+l)!/k!)
        term = a * x**k * w**l / math.exp(0.5 * (math.lgamma(k + l + 1) + math.lgamma(k + 1)))
        if n is not None and k + l >= n:
            dropped += term
        else:
            total += term
    if abs(pref * dropped) > tol:
        warnings.warn(
            f"angular series: dropped terms contribute {abs(pref * dropped):.3g}",
            SeriesTruncationWarning,
            stacklevel=2,
        )
    return complex(pref * total)


# --------------------------------------------------------------------------
# free particle
# --------------------------------------------------------------------------
def free_hamiltonian(params, n):
    """``P^dag P / 2m``."""
    ops = position_momentum_ops(params, n)
    return (1.0 / (2 * params.m)) * (ops.Pdag @ ops.P)


def free_hamiltonian_bform(params, n):
    """``-(hbar^2 / m theta)(B_L^dag - B_R^dag)(B_R - B_L)``."""
    ops = position_momentum_ops(params, n)
    g = params.hbar**2 / (params.m * params.theta)
    return -g * ((ops.B_Ldag - ops.B_Rdag) @ (ops.B_R - ops.B_L))


def _log_powers(c, count):
    """``c^p / p!`` for ``p < count`` as complex logs (``-inf`` for ``0^p``)."""
    p = np.arange(count)
    lf = np.array([math.lgamma(i + 1) for i in range(count)])
    if c == 0:
        out = np.full(count, -np.inf, dtype=np.complex128)
        out[0] = 0.0
        return out
    return p * np.log(complex(c)) - lf


def momentum_state(k, params, n):
    """Eigenstate of ``P`` with eigenvalue ``k`` (and of ``P^dag`` with ``conj k``).

    ``sqrt(theta / (2 pi hbar^2)) exp(-theta |k|^2 / 4 hbar^2) e^{a b^dag} e^{c b}``
    with ``a = (i/hbar) sqrt(theta/2) k`` and ``c = (i/hbar) sqrt(theta/2) conj(k)``.
    The prefactor is the delta-normalization in ``k``, not a unit HS norm.
    Entries are the exact matrix elements on the first ``n`` levels; the
    truncated matrix is a ``P``-eigenvector away from the last row.

    Raises
    ------
    DomainError
        If ``theta |k|^2 / (2 hbar^2) > n / 4``.
    """
    n = check_truncation(n)
    k = complex(k)
    s = math.sqrt(params.theta / 2.0) / params.hbar
    if (s * abs(k)) ** 2 > n / 4.0:
        raise DomainError(f"momentum |k|={abs(k):.4g} not representable at N={n}")
    la = _log_powers(1j * s * k, n)
    lb = _log_powers(1j * s * k.conjugate(), n)
    lf = np.array([math.lgamma(i + 1) for i in range(n)])
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    psi = np.zeros((n, n), dtype=np.complex128)
    for m in range(n):
        ok = (i >= m) & (j >= m)
        ii = np.where(ok, i - m, 0)
        jj = np.where(ok, j - m, 0)
        logt = 0.5 * (lf[i] + lf[j]) - lf[m] + la[ii] + lb[jj]
        psi += np.where(ok, np.exp(logt), 0.0)
    pref = math.sqrt(params.theta / (2 * math.pi * params.hbar**2)) * math.exp(
        -params.theta * abs(k) ** 2 / (4 * params.hbar**2)
    )
    return pref * psi


def free_pzv_closed(k, z, v, params):
    """``|(z,v|psi_k)|^2`` in closed form; independent of ``z``.

    ``(theta / 2 pi hbar^2) exp(-theta |k|^2 / 2 hbar^2)
    exp((i/hbar) sqrt(theta/2) (conj(k) v - conj(v) k)) exp(-|v|^2)``.
    The middle factor is real because its exponent is.
    """
    del z
    k = complex(k)
    v = np.asarray(v, dtype=np.complex128)
    hb, th = params.hbar, params.theta
    s = math.sqrt(th / 2.0) / hb
    phase = (1j * s * (np.conj(k) * v - np.conj(v) * k)).real
    val = th / (2 * math.pi * hb**2) * np.exp(-th * abs(k) ** 2 / (2 * hb**2) + phase - np.abs(v) ** 2)
    return val[()] if np.ndim(val) == 0 else val


# --------------------------------------------------------------------------
# generalized oscillator
# --------------------------------------------------------------------------
def _abg(params):
    g = params.hbar**2 / (params.m * params.theta)
    mt = params.m * params.theta
    return g + mt * params.omega_l**2, g + mt * params.omega_r**2, g


def ho_hamiltonian(params, n):
    """``PP^dag/2m + m theta (omega_L^2 B_L^dag B_L + omega_R^2 B_R B_R^dag)``."""
    ops = position_momentum_ops(params, n)
    mt = params.m * params.theta
    return (
        (1.0 / (2 * params.m)) * (ops.P @ ops.Pdag)
        + (mt * params.omega_l**2) * (ops.B_Ldag @ ops.B_L)
        + (mt * params.omega_r**2) * (ops.B_R @ ops.B_Rdag)
    )


def ho_hamiltonian_bform(params, n):
    """``alpha B_L^dag B_L + beta B_R^dag B_R - gamma(B_L^dag B_R + B_R^dag B_L) - m theta omega_R^2``."""
    ops = position_momentum_ops(params, n)
    a, b, g = _abg(params)
    return (
        a * (ops.B_Ldag @ ops.B_L)
        + b * (ops.B_Rdag @ ops.B_R)
        - g * (ops.B_Ldag @ ops.B_R + ops.B_Rdag @ ops.B_L)
        - params.m * params.theta * params.omega_r**2 * SuperOp.identity(n)
    )


def ho_sector_matrix(params, n, l):
    """Compression of ``H`` onto ``span{|i><i+l| : i, i+l < n}``.

    ``H`` conserves ``l`` and acts tridiagonally in ``i``.  Entries are those
    of the untruncated operator, so eigenvalues are Rayleigh-Ritz upper
    bounds that decrease monotonically with ``n``.  Returns ``(diag, offdiag)``.
    """
    a, b, g = _abg(params)
    i = np.arange(max(0, -l), min(n, n - l))
    j = i + l
    diag = a * i + b * (j + 1) - params.m * params.theta * params.omega_r**2
    off = -g * np.sqrt((i[:-1] + 1.0) * (j[:-1] + 1.0))
    return diag, off


def ho_compressed_spectrum(params, n, count=6):
    """Lowest ``count`` eigenvalues over all ``l``-sectors of the compression.

    Returns a list of ``(E, l)`` pairs sorted by energy.
    """
    n = check_truncation(n)
    found = []
    for l in range(-(n - 1), n):
        d, e = ho_sector_matrix(params, n, l)
        k = min(count, d.size) - 1
        if e.size:
            w = eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, k))
        else:
            w = d[:1]
        found.extend((float(x), l) for x in w)
    found.sort()
    return found[:count]


def ho_dense_eigenvalues(params, n, count=6, compress=True, max_n=32):
    """Smallest eigenvalues of the materialized ``N^2 x N^2`` Hamiltonian.

    With ``compress`` the superoperator is built on ``N + 2`` levels and
    compressed onto the ``N``-level block, which removes the truncation
    corner (the matrix then holds exact matrix elements).  Without it the
    plain truncated operator is diagonalized, spurious edge modes included.
    """
    n = check_truncation(n)
    if n > max_n:
        raise DomainError(f"dense diagonalization capped at N={max_n}")
    if compress:
        D = ho_hamiltonian(params, n + 2).dense(keep=n)
    else:
        D = ho_hamiltonian(params, n).dense()
    D = 0.5 * (D + D.conj().T)
    return eigvalsh(D, subset_by_index=(0, count - 1))


@dataclass(frozen=True)
class BogoliubovData:
    phi: float
    Gamma: float
    K1: float
    K2: float
    alpha: float
    beta: float
    gamma: float


def bogoliubov(params):
    """Rotation parameter and mode energies of the oscillator.

    Raises
    ------
    DegenerateModel
        If both frequencies vanish (that is the free particle).
    """
    m, hb, th = params.m, params.hbar, params.theta
    s2 = params.omega_l**2 + params.omega_r**2
    if s2 == 0:
        raise DegenerateModel("omega_L = omega_R = 0 is the free particle")
    root = math.sqrt(s2 * (4 * hb**2 + m**2 * th**2 * s2))
    # 1 - Gamma computed directly to keep precision as theta -> 0
    one_minus = (m * th / (2 * hb**2)) * (root - m * th * s2)
    G = 1.0 - one_minus
    if not abs(G) < 1.0:
        raise DegenerateModel(f"|Gamma| = {abs(G)} is not below 1")
    phi = -0.5 * math.log((1 + G) / one_minus)
    d = m * th * (params.omega_l**2 - params.omega_r**2)
    a, b, g = _abg(params)
    return BogoliubovData(phi, G, 0.5 * (d + root), 0.5 * (-d + root), a, b, g)


def ho_spectrum(n1, n2, bog, params):
    """``n1 K1 + (n2 + 1) K2 - m theta omega_R^2``."""
    if n1 < 0 or n2 < 0:
        raise ValueError("quantum numbers must be nonnegative")
    return n1 * bog.K1 + (n2 + 1) * bog.K2 - params.m * params.theta * params.omega_r**2


def ho_lowest_levels(params, count=6):
    """The ``count`` smallest ``(E, n1, n2)`` from the spectrum formula."""
    bog = bogoliubov(params)
    span = count + 1
    levels = [(ho_spectrum(a, b, bog, params), a, b) for a in range(span) for b in range(span)]
    levels.sort()
    return levels[:count]


def bogoliubov_ladders(bog, params, n):
    """``(A1, A1_dag, A2, A2_dag)`` as superoperators."""
    ops = position_momentum_ops(params, n)
    c, s = math.cosh(bog.phi), math.sinh(bog.phi)
    A1 = c * ops.B_L + s * ops.B_R
    A1d = c * ops.B_Ldag + s * ops.B_Rdag
    A2 = s * ops.B_L + c * ops.B_R
    A2d = s * ops.B_Ldag + c * ops.B_Rdag
    return A1, A1d, A2, A2d


def _ground_guard(G, n, tail_tol, extra=0):
    # missing norm^2 of the geometric diagonal beyond the truncation
    tail = abs(G) ** (2 * (n - extra)) if G != 0 else 0.0
    if tail > tail_tol:
        raise DomainError(
            f"ground-state tail Gamma^(2N) = {tail:.3g} exceeds {tail_tol:g}; increase N"
        )


def ho_ground_state(bog, n, tail_tol=1e-10):
    """``sqrt(1 - Gamma^2) sum_n Gamma^n |n><n|`` on ``n`` levels.

    The prefactor is kept as is, so the HS norm squared is
    ``1 - Gamma^(2N)``.
    """
    n = check_truncation(n)
    G = bog.Gamma
    _ground_guard(G, n, tail_tol)
    return np.diag(math.sqrt(1 - G**2) * G ** np.arange(n, dtype=float)).astype(np.complex128)


def ho_excited(n1, n2, bog, params, n, tail_tol=1e-10):
    """Normalized ``(A1_dag)^n1 (A2)^n2 psi_0``.

    Each ladder application moves weight one level outwards, so the tail
    guard is applied with ``n1 + n2`` levels of margin.
    """
    _ground_guard(bog.Gamma, n, tail_tol, extra=n1 + n2)
    psi = ho_ground_state(bog, n, tail_tol=1.0)
    _, A1d, A2, _ = bogoliubov_ladders(bog, params, n)
    for _ in range(n2):
        psi = A2(psi)
    for _ in range(n1):
        psi = A1d(psi)
    return psi / np.linalg.norm(psi)


def ho_ground_pzv_closed(z, v, Gamma):
    """``|(z,v|psi_0)|^2 = (1-G^2) e^{-|v|^2} e^{-2(1-G)|z|^2} e^{-(1-G)(zbar v + vbar z)}``."""
    if not abs(Gamma) < 1:
        raise DomainError("|Gamma| must be below 1")
    z = np.asarray(z, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    g = 1.0 - Gamma
    val = (1 - Gamma**2) * np.exp(-np.abs(v) ** 2 - 2 * g * np.abs(z) ** 2 - 2 * g * (np.conj(z) * v).real)
    return val[()] if np.ndim(val) == 0 else val


def one_minus_gamma_scales(params):
    """``1 - Gamma`` at ``omega_R = 0`` from the ratio ``r = l_theta / l_omega``.

    ``l_theta = sqrt(2 theta)``, ``l_omega = sqrt(2 hbar / (m omega_L))``;
    ``1 - Gamma = -r^2 (r^2/2 - sqrt(1 + r^4/4))``.
    """
    r2 = params.m * params.omega_l * params.theta / params.hbar
    return -r2 * (r2 / 2 - math.sqrt(1 + r2**2 / 4))
