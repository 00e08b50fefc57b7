"""Pure-Python/numpy implementations of the hot kernels.

These mirror ``_ckernels.pyx`` exactly and are used when the compiled
extension is unavailable or disabled with ``NCQM_PURE_PYTHON=1``.
"""
import math

import numpy as np


def coherent_amplitudes(zs, n):
    """Raw truncated coherent amplitudes ``exp(-|z|^2/2) z^k / sqrt(k!)``.

    Parameters
    ----------
    zs : array_like of complex, shape (K,)
    n : int
        Number of Fock levels kept.

    Returns
    -------
    ndarray, shape (K, n), complex128
    """
    zs = np.asarray(zs, dtype=np.complex128).ravel()
    out = np.empty((zs.size, n), dtype=np.complex128)
    out[:, 0] = np.exp(-0.5 * (zs.real**2 + zs.imag**2))
    for k in range(1, n):
        out[:, k] = out[:, k - 1] * zs / math.sqrt(k)
    return out


def _potential_derivs(z, zb, apow, bpow, coef):
    vzb = 0j
    vz = 0j
    vzz = 0j
    for a, b, c in zip(apow, bpow, coef):
        if b > 0:
            vzb += c * b * z**a * zb ** (b - 1)
        if a > 0:
            vz += c * a * z ** (a - 1) * zb**b
        if a > 1:
            vzz += c * a * (a - 1) * z ** (a - 2) * zb**b
    return vzb, vz, vzz


def _rhs(z, v, apow, bpow, coef, hbar, T):
    zb = z.conjugate()
    vzb, vz, vzz = _potential_derivs(z, zb, apow, bpow, coef)
    vdot = 1j * vzb / hbar
    zdot = 1j * v / T - vdot
    zd2 = zdot * zdot
    idot = 2.0 * T * (zd2 * vzz).imag
    jdot = -2.0 * (z * vz).imag
    return zdot, vdot, idot, jdot


def rk4_polynomial(z0, v0, apow, bpow, coef, hbar, T, dt, nsteps):
    """Classical RK4 for the first-order (z, v) system with a polynomial potential.

    Alongside ``z`` and ``v`` it integrates two real primitives with the same
    stages: ``I`` (energy correction) and ``J`` (torque integral).

    Returns
    -------
    z, v : complex ndarrays, shape (nsteps + 1,)
    I, J : float ndarrays, shape (nsteps + 1,)
    """
    apow = [int(a) for a in apow]
    bpow = [int(b) for b in bpow]
    coef = [complex(c) for c in coef]
    zs = np.empty(nsteps + 1, dtype=np.complex128)
    vs = np.empty(nsteps + 1, dtype=np.complex128)
    Is = np.empty(nsteps + 1)
    Js = np.empty(nsteps + 1)
    z = complex(z0)
    v = complex(v0)
    I = 0.0
    J = 0.0
    zs[0], vs[0], Is[0], Js[0] = z, v, I, J
    h2 = 0.5 * dt
    h6 = dt / 6.0
    for i in range(1, nsteps + 1):
        k1z, k1v, k1i, k1j = _rhs(z, v, apow, bpow, coef, hbar, T)
        k2z, k2v, k2i, k2j = _rhs(z + h2 * k1z, v + h2 * k1v, apow, bpow, coef, hbar, T)
        k3z, k3v, k3i, k3j = _rhs(z + h2 * k2z, v + h2 * k2v, apow, bpow, coef, hbar, T)
        k4z, k4v, k4i, k4j = _rhs(z + dt * k3z, v + dt * k3v, apow, bpow, coef, hbar, T)
        z = z + h6 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
        v = v + h6 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        I = I + h6 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i)
        J = J + h6 * (k1j + 2.0 * k2j + 2.0 * k3j + k4j)
        zs[i], vs[i], Is[i], Js[i] = z, v, I, J
    return zs, vs, Is, Js
