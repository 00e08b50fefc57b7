"""Overlaps ``(z,v|psi)`` and the differential-operator dictionary.

Every Hilbert-Schmidt operator ``psi`` defines a field

    f(z, v) = exp((conj(v) z - conj(z) v)/2) <z| psi |z+v>

on ``C^2``.  Left and right ladder actions on ``psi`` become first-order
differential operators on ``f``, and every ``f`` obeys two linear
constraints.  This module checks both statements by finite differences.

Derivatives are Wirtinger derivatives built from central differences in the
four real coordinates ``(Re z, Im z, Re v, Im v)``; the overlap is not
holomorphic, so complex-step tricks would be wrong.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .fock import coherent_amplitudes
from .qspace import ModelParams, SuperOp, position_momentum_ops

__all__ = [
    "zv_guard",
    "overlap_zv",
    "OverlapField",
    "FDStencil",
    "Jet",
    "ladder_dictionary_check",
    "constraint_residuals",
    "diffop_check",
    "angular_L_forms",
]


def zv_guard(z, v, n):
    """True where ``|z|^2 + |z+v|^2 <= n/2``."""
    z = np.asarray(z)
    w = z + np.asarray(v)
    return np.abs(z) ** 2 + np.abs(w) ** 2 <= n / 2.0


def _unit_coherent(z, n):
    c = np.atleast_2d(coherent_amplitudes(z, n))
    return c / np.linalg.norm(c, axis=-1, keepdims=True)


def _phase(z, v):
    """The unit-modulus factor ``exp((conj(z) v - conj(v) z)/2)`` of ``|z,v)``."""
    return np.exp(0.5 * (np.conj(z) * v - np.conj(v) * z))


def overlap_zv(psi, z, v):
    """``(z,v|psi)`` for scalar or equal-shape array arguments.

    Raises
    ------
    DomainError
        If any point leaves the representable region of the truncation.
    """
    psi = np.asarray(psi)
    n = psi.shape[0]
    z, v = np.broadcast_arrays(np.asarray(z, dtype=np.complex128), np.asarray(v, dtype=np.complex128))
    if not np.all(zv_guard(z, v, n)):
        raise DomainError(f"(z, v) outside the representable region for N={n}")
    zf, vf = z.ravel(), v.ravel()
    cz = _unit_coherent(zf, n)
    cw = _unit_coherent(zf + vf, n)
    vals = np.sum((cz.conj() @ psi) * cw, axis=1)
    out = (np.conj(_phase(zf, vf)) * vals).reshape(z.shape)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class OverlapField:
    """The field ``(z,v) -> (z,v|psi)`` backed by a fixed state."""

    psi: np.ndarray

    def __post_init__(self):
        a = np.array(self.psi, dtype=np.complex128, copy=True)
        a.setflags(write=False)
        object.__setattr__(self, "psi", a)

    def __call__(self, z, v):
        return overlap_zv(self.psi, z, v)


def _as_field(obj):
    if callable(obj):
        return obj
    return OverlapField(obj)


@dataclass(frozen=True)
class Jet:
    """Value and Wirtinger derivatives of a field at one point.

    Attributes ``dz, dzb, dv, dvb`` are first derivatives; ``dzdzb`` and
    ``dvdvb`` are the mixed second derivatives (a quarter Laplacian).
    ``err`` is the Richardson error estimate (largest over all entries).
    """

    f: complex
    dz: complex
    dzb: complex
    dv: complex
    dvb: complex
    dzdzb: complex
    dvdvb: complex
    err: float


@dataclass(frozen=True)
class FDStencil:
    """Central differences of step ``h`` with one Richardson level."""

    h: float = 1e-3
    richardson: bool = True

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("FD step must be positive")

    # unit displacements of (z, v) along Re z, Im z, Re v, Im v
    _AXES = ((1.0, 0.0), (1j, 0.0), (0.0, 1.0), (0.0, 1j))

    def jet(self, f, z, v):
        z, v = complex(z), complex(v)
        hs = (self.h, self.h / 2) if self.richardson else (self.h,)
        zs, vs = [z], [v]
        for h in hs:
            for dz, dv in self._AXES:
                for s in (1.0, -1.0):
                    zs.append(z + s * h * dz)
                    vs.append(v + s * h * dv)
        vals = np.asarray(f(np.array(zs), np.array(vs)), dtype=np.complex128)
        f0 = vals[0]
        firsts, seconds = [], []
        for i, h in enumerate(hs):
            block = vals[1 + 8 * i: 9 + 8 * i].reshape(4, 2)
            firsts.append((block[:, 0] - block[:, 1]) / (2 * h))
            seconds.append((block[:, 0] - 2 * f0 + block[:, 1]) / h**2)
        if self.richardson:
            d1 = (4 * firsts[1] - firsts[0]) / 3
            d2 = (4 * seconds[1] - seconds[0]) / 3
            err = float(max(np.max(np.abs(d1 - firsts[1])), np.max(np.abs(d2 - seconds[1]))))
        else:
            d1, d2 = firsts[0], seconds[0]
            err = float("nan")
        fx, fy, fu, fw = d1
        return Jet(
            f=f0,
            dz=0.5 * (fx - 1j * fy),
            dzb=0.5 * (fx + 1j * fy),
            dv=0.5 * (fu - 1j * fw),
            dvb=0.5 * (fu + 1j * fw),
            dzdzb=0.25 * (d2[0] + d2[1]),
            dvdvb=0.25 * (d2[2] + d2[3]),
            err=err,
        )


def _ladder_ops(n):
    from .fock import build_ladder

    b, bd = build_ladder(n)
    return {
        "B_Ldag": SuperOp.left(bd),
        "B_L": SuperOp.left(b),
        "B_R": SuperOp.right(b),
        "B_Rdag": SuperOp.right(bd),
    }


def ladder_dictionary_check(psi, z, v, stencil=FDStencil()):
    """Residuals of the four ladder-to-derivative correspondences.

    Returns a dict with entries ``B_Ldag``, ``B_L``, ``B_R``, ``B_Rdag_v``
    (the ``d/dv`` form), ``B_Rdag_z`` (the ``d/dz`` form) and
    ``B_Rdag_forms`` (difference between the two forms).
    """
    psi = np.asarray(psi)
    ops = _ladder_ops(psi.shape[0])
    j = stencil.jet(OverlapField(psi), z, v)
    zb, vb = np.conj(z), np.conj(v)
    direct = {k: complex(overlap_zv(op(psi), z, v)) for k, op in ops.items()}
    via_v = j.dv + (zb + vb / 2) * j.f
    via_z = j.dz + zb * j.f
    return {
        "B_Ldag": abs(direct["B_Ldag"] - zb * j.f),
        "B_L": abs(direct["B_L"] - (j.dzb + (z + v) * j.f)),
        "B_R": abs(direct["B_R"] - (z + v) * j.f),
        "B_Rdag_v": abs(direct["B_Rdag"] - via_v),
        "B_Rdag_z": abs(direct["B_Rdag"] - via_z),
        "B_Rdag_forms": abs(via_v - via_z),
    }


def constraint_residuals(psi_or_field, z, v, stencil=FDStencil()):
    """``(r1, r2)`` with ``r1 = (d_vbar + v/2) f`` and ``r2 = (d_z - d_v - vbar/2) f``.

    Accepts a state (wrapped as :class:`OverlapField`) or any vectorized
    callable ``f(z, v)``, which allows negative controls.
    """
    j = stencil.jet(_as_field(psi_or_field), z, v)
    r1 = j.dvb + 0.5 * v * j.f
    r2 = j.dz - j.dv - 0.5 * np.conj(v) * j.f
    return complex(r1), complex(r2)


def angular_L_forms(j, z, v, hbar=1.0):
    """Both differential forms of total angular momentum applied to a jet.

    Returns ``(ladder_form, split_form)``: the first from the dictionary
    ``hbar[(z+v)(d_v + zbar + vbar/2) - zbar(d_zbar + z + v)]``, the second the
    orbital plus intrinsic form ``hbar(z d_z - zbar d_zbar + v d_v - vbar d_vbar)``.
    """
    zb, vb = np.conj(z), np.conj(v)
    ladder = hbar * ((z + v) * (j.dv + (zb + vb / 2) * j.f) - zb * (j.dzb + (z + v) * j.f))
    split = hbar * (z * j.dz - zb * j.dzb + v * j.dv - vb * j.dvb)
    return complex(ladder), complex(split)


def _intrinsic_L(f, stencil, hbar):
    """Field ``(z,v) -> L_v f`` by finite differences (one point at a time)."""

    def g(zs, vs):
        zs, vs = np.atleast_1d(zs), np.atleast_1d(vs)
        out = np.empty(zs.shape, dtype=np.complex128)
        for i, (zz, vv) in enumerate(zip(zs, vs)):
            j = stencil.jet(f, zz, vv)
            out[i] = hbar * (vv * j.dv - np.conj(vv) * j.dvb)
        return out

    return g


def intrinsic_L_constraint_residual(psi, z, v, params=ModelParams(), stencil=FDStencil()):
    """Constraint residual of ``L_v f`` alone; generically nonzero.

    The intrinsic part of the split angular momentum does not preserve the
    physical subspace, so this is a negative control.  Uses nested
    differences with a coarser outer step.
    """
    inner = FDStencil(h=stencil.h, richardson=stencil.richardson)
    outer = FDStencil(h=10 * stencil.h, richardson=stencil.richardson)
    g = _intrinsic_L(OverlapField(psi), inner, params.hbar)
    return constraint_residuals(g, z, v, outer)


def _ho_superop(params, n):
    ops = position_momentum_ops(params, n)
    m, th = params.m, params.theta
    return (
        (1.0 / (2 * m)) * (ops.P @ ops.Pdag)
        + (m * th * params.omega_l**2) * (ops.B_Ldag @ ops.B_L)
        + (m * th * params.omega_r**2) * (ops.B_R @ ops.B_Rdag)
    )


def diffop_check(psi, z, v, which, params=ModelParams(), stencil=FDStencil()):
    """Compare a differential form of an observable with the operator route.

    ``which`` is one of

    ``"free_H"``
        ``-(hbar^2/(m theta)) d_z d_zbar`` versus ``P^dag P / 2m``.
    ``"angular_L"``
        both angular momentum forms versus ``hbar(B_R B_R^dag - B_L^dag B_L)``.
    ``"ho_H"``, ``"ho_H_hermitian"``
        the oscillator's dictionary form and its rewritten form versus the
        superoperator Hamiltonian (an extended check, not run by default).

    Returns the largest absolute residual (for ``angular_L`` the maximum over
    both forms).
    """
    psi = np.asarray(psi)
    n = psi.shape[0]
    ops = position_momentum_ops(params, n)
    j = stencil.jet(OverlapField(psi), z, v)
    m, th, hb = params.m, params.theta, params.hbar
    zb, vb = np.conj(z), np.conj(v)
    if which == "free_H":
        H = (1.0 / (2 * m)) * (ops.Pdag @ ops.P)
        ref = overlap_zv(H(psi), z, v)
        return float(abs(-(hb**2 / (m * th)) * j.dzdzb - ref))
    if which == "angular_L":
        L = hb * (ops.B_R @ ops.B_Rdag - ops.B_Ldag @ ops.B_L)
        ref = overlap_zv(L(psi), z, v)
        a, b = angular_L_forms(j, z, v, hb)
        return float(max(abs(a - ref), abs(b - ref)))
    if which in ("ho_H", "ho_H_hermitian"):
        ref = overlap_zv(_ho_superop(params, n)(psi), z, v)
        wl2, wr2 = params.omega_l**2, params.omega_r**2
        kin = -(hb**2 / (m * th)) * j.dzdzb
        if which == "ho_H":
            val = (
                kin
                + m * th * wl2 * zb * (j.dzb + (z + v) * j.f)
                + m * th * wr2 * (z + v) * (j.dv + (zb + vb / 2) * j.f)
            )
        else:
            landau = -j.dvdvb + 0.5 * v * j.dv - 0.5 * vb * j.dvb + (abs(v) ** 2 / 4 - 0.5) * j.f
            val = (
                kin
                + m * th * (wl2 + wr2) * abs(z) ** 2 * j.f
                - m * th * wl2 * (z * j.dz - zb * j.dzb)
                + m * th * wr2 * landau
                + m * th * (wl2 + wr2) * (zb * (-j.dvb + 0.5 * v * j.f) + z * (j.dv + 0.5 * vb * j.f))
            )
        return float(abs(val - ref))
    raise ValueError(f"unknown differential operator {which!r}")
