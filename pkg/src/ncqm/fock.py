"""Truncated single-mode boson Fock space.

The noncommutative plane ``[x, y] = i theta`` is represented on a boson
Fock space through ``b = (x + i y) / sqrt(2 theta)``.  Numerically we keep
the levels ``|0>, ..., |N-1>``.
"""
import numpy as np

from ._backend import kernels
from .errors import DomainError

__all__ = [
    "check_truncation",
    "build_ladder",
    "number_diag",
    "coherent_amplitudes",
    "coherent_vector",
    "coherent_batch",
    "coherent_guard",
]


def check_truncation(n):
    """Validate a truncation size and return it as ``int``."""
    if int(n) != n or n < 2:
        raise ValueError(f"truncation must be an integer >= 2, got {n!r}")
    return int(n)


def build_ladder(n):
    """Annihilation and creation matrices on the first ``n`` Fock levels.

    ``b[k-1, k] = sqrt(k)``; ``b_dag`` is the conjugate transpose.  The
    commutator ``[b, b_dag]`` is the identity except at the last diagonal
    entry, where it equals ``1 - n``.
    """
    n = check_truncation(n)
    b = np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(np.complex128)
    return b, b.conj().T.copy()


def number_diag(n, shift=0):
    """Diagonal of ``b_dag b + shift`` (exact, no truncation corner)."""
    return np.arange(n, dtype=float) + shift


def coherent_guard(z, n):
    """True where ``|z|^2 <= n/4`` (representable coherent states)."""
    return np.abs(np.asarray(z)) ** 2 <= n / 4.0


def coherent_amplitudes(z, n):
    """Unnormalized amplitudes ``exp(-|z|^2/2) z^k / sqrt(k!)``, ``k < n``.

    No tail guard and no renormalization; these are the exact low-order
    components of the infinite-dimensional coherent state.
    """
    z = np.asarray(z, dtype=np.complex128)
    out = kernels.coherent_amplitudes(z.ravel(), int(n))
    return out.reshape(z.shape + (int(n),))


def coherent_batch(z, n):
    """Normalized truncated coherent vectors for an array of points.

    Raises
    ------
    DomainError
        If any ``|z|^2 > n/4``.
    """
    n = check_truncation(n)
    z = np.asarray(z, dtype=np.complex128)
    if not np.all(coherent_guard(z, n)):
        worst = np.max(np.abs(z))
        raise DomainError(
            f"coherent state |z|={worst:.4g} not representable with N={n} "
            f"(need |z|^2 <= N/4 = {n / 4:g})"
        )
    c = coherent_amplitudes(z, n)
    norm = np.sqrt(np.sum(np.abs(c) ** 2, axis=-1, keepdims=True))
    return c / norm


def coherent_vector(z, n):
    """Normalized coherent state ``|z>`` truncated to ``n`` levels."""
    return coherent_batch(complex(z), n)
