# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot kernels in ``_pykernels``.

Signatures and results match the pure-Python module.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, sqrt

cnp.import_array()


cdef inline double complex _ipow(double complex x, long n) noexcept nogil:
    cdef double complex r = 1.0
    while n > 0:
        if n & 1:
            r = r * x
        x = x * x
        n >>= 1
    return r


def coherent_amplitudes(zs, Py_ssize_t n):
    cdef double complex[::1] zv = np.ascontiguousarray(np.asarray(zs, dtype=np.complex128).ravel())
    cdef Py_ssize_t K = zv.shape[0]
    out = np.empty((K, n), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef Py_ssize_t i, k
    cdef double complex z
    cdef double ar, ai
    with nogil:
        for i in range(K):
            z = zv[i]
            ar = z.real
            ai = z.imag
            o[i, 0] = exp(-0.5 * (ar * ar + ai * ai))
            for k in range(1, n):
                o[i, k] = o[i, k - 1] * z / sqrt(<double>k)
    return out


cdef struct _Poly:
    long nt
    long* a
    long* b
    double complex* c


cdef inline void _rhs(double complex z, double complex v, _Poly* P,
                      double hbar, double T,
                      double complex* zdot, double complex* vdot,
                      double* idot, double* jdot) noexcept nogil:
    cdef double complex zb = z.conjugate()
    cdef double complex vzb = 0.0, vz = 0.0, vzz = 0.0
    cdef long k, a, b
    cdef double complex c
    cdef double complex I1 = 1j
    for k in range(P.nt):
        a = P.a[k]
        b = P.b[k]
        c = P.c[k]
        if b > 0:
            vzb = vzb + c * b * _ipow(z, a) * _ipow(zb, b - 1)
        if a > 0:
            vz = vz + c * a * _ipow(z, a - 1) * _ipow(zb, b)
        if a > 1:
            vzz = vzz + c * a * (a - 1) * _ipow(z, a - 2) * _ipow(zb, b)
    vdot[0] = I1 * vzb / hbar
    zdot[0] = I1 * v / T - vdot[0]
    idot[0] = 2.0 * T * (zdot[0] * zdot[0] * vzz).imag
    jdot[0] = -2.0 * (z * vz).imag


def rk4_polynomial(z0, v0, apow, bpow, coef, double hbar, double T, double dt, Py_ssize_t nsteps):
    cdef long[::1] av = np.ascontiguousarray(apow, dtype=np.int64)
    cdef long[::1] bv = np.ascontiguousarray(bpow, dtype=np.int64)
    cdef double complex[::1] cv = np.ascontiguousarray(coef, dtype=np.complex128)
    cdef _Poly P
    P.nt = av.shape[0]
    if P.nt > 0:
        P.a = &av[0]
        P.b = &bv[0]
        P.c = &cv[0]
    zs = np.empty(nsteps + 1, dtype=np.complex128)
    vs = np.empty(nsteps + 1, dtype=np.complex128)
    Is = np.empty(nsteps + 1, dtype=np.float64)
    Js = np.empty(nsteps + 1, dtype=np.float64)
    cdef double complex[::1] zo = zs
    cdef double complex[::1] vo = vs
    cdef double[::1] io = Is
    cdef double[::1] jo = Js
    cdef double complex z = z0, v = v0
    cdef double Iacc = 0.0, Jacc = 0.0
    cdef double complex k1z, k1v, k2z, k2v, k3z, k3v, k4z, k4v
    cdef double k1i, k1j, k2i, k2j, k3i, k3j, k4i, k4j
    cdef double h2 = 0.5 * dt, h6 = dt / 6.0
    cdef Py_ssize_t i
    zo[0] = z
    vo[0] = v
    io[0] = 0.0
    jo[0] = 0.0
    with nogil:
        for i in range(1, nsteps + 1):
            _rhs(z, v, &P, hbar, T, &k1z, &k1v, &k1i, &k1j)
            _rhs(z + h2 * k1z, v + h2 * k1v, &P, hbar, T, &k2z, &k2v, &k2i, &k2j)
            _rhs(z + h2 * k2z, v + h2 * k2v, &P, hbar, T, &k3z, &k3v, &k3i, &k3j)
            _rhs(z + dt * k3z, v + dt * k3v, &P, hbar, T, &k4z, &k4v, &k4i, &k4j)
            z = z + h6 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
            v = v + h6 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            Iacc = Iacc + h6 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i)
            Jacc = Jacc + h6 * (k1j + 2.0 * k2j + 2.0 * k3j + k4j)
            zo[i] = z
            vo[i] = v
            io[i] = Iacc
            jo[i] = Jacc
    return zs, vs, Is, Js
