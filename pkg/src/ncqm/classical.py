"""Classical dynamics of the local (z, v) action.

The stationary points of

    S = int dt [ i hbar (zbar' v - z' vbar + (vbar' v - v' vbar)/2)
                 - (hbar^2 / m theta) |v|^2 - V(zbar, z) ]

obey the first-order system

    v' = (i / hbar) V_zbar,        z' = (i / T) v - v',        T = m theta / hbar,

with dimensionless ``z`` (physical position ``sqrt(2 theta) z``) and ``v``.
Along solutions ``E = (hbar^2 / m theta)|v|^2 + V`` is an exact first
integral.  Eliminating ``v`` gives nonlocal forms of energy and angular
momentum that carry time primitives; these are integrated with the same
Runge-Kutta stages as the state so their conservation is checked at
integrator order.

Sign convention: with the system above the primitive in the nonlocal energy
is ``I(t) = int 2 T Im(z'^2 V_zz) dt`` and the potential correction to the
angular momentum enters as ``-T (V - z V_z - zbar V_zbar)``.
"""
import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .errors import DomainError, StepSizeError
from .qspace import ModelParams

__all__ = [
    "PolynomialPotential",
    "ClassicalState",
    "Trajectory",
    "eom_rhs",
    "eom_residuals",
    "initial_state",
    "integrate",
    "energy_local",
    "energy_expanded",
    "energy_nonlocal",
    "angular_momentum_general",
    "polar_samples",
    "invariants_polar",
    "circular_mode_rates",
    "TRAJECTORY_COLUMNS",
    "trajectory_rows",
]

TRAJECTORY_COLUMNS = ("t", "Re z", "Im z", "Re v", "Im v", "E_local", "E_nonlocal", "L")


@dataclass(frozen=True)
class PolynomialPotential:
    """Real potential ``V = sum c_ab z^a zbar^b``.

    ``terms`` maps ``(a, b)`` to ``c_ab``; reality requires
    ``c_ba = conj(c_ab)``, which is checked on construction.
    """

    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (a, b), c in dict(self.terms).items():
            a, b = int(a), int(b)
            if a < 0 or b < 0:
                raise ValueError("powers must be nonnegative")
            c = complex(c)
            if c != 0:
                clean[(a, b)] = c
        for (a, b), c in clean.items():
            partner = clean.get((b, a), 0j)
            if abs(partner - c.conjugate()) > 1e-14 * max(1.0, abs(c)):
                raise DomainError(f"coefficients of z^{a} zbar^{b} and z^{b} zbar^{a} are not conjugate")
        object.__setattr__(self, "terms", clean)

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls):
        return cls({})

    @classmethod
    def isotropic(cls, c):
        """``c |z|^2``."""
        return cls({(1, 1): c})

    @classmethod
    def harmonic(cls, params, omega):
        """``(m omega^2 / 2) rho^2`` with ``rho^2 = 2 theta |z|^2``."""
        return cls.isotropic(params.m * omega**2 * params.theta)

    @classmethod
    def from_normal_ordered(cls, terms):
        """Coherent-state symbol of ``sum c (b^dag)^p b^q`` (normal ordered).

        ``terms`` maps ``(p, q)`` to the coefficient; ``<z| (b^dag)^p b^q |z>``
        is ``zbar^p z^q``, so this only relabels powers.
        """
        return cls({(q, p): c for (p, q), c in dict(terms).items()})

    @classmethod
    def parse(cls, text):
        """Parse ``"a b re [im]; ..."``, or the shorthands ``zero``, ``iso:c``.

        Raises ``ValueError`` on malformed input.
        """
        text = text.strip()
        if text in ("", "zero", "0"):
            return cls.zero()
        if text.startswith("iso:"):
            return cls.isotropic(float(text[4:]))
        terms = {}
        for item in text.split(";"):
            item = item.strip()
            if not item:
                continue
            parts = item.replace(",", " ").split()
            if len(parts) not in (3, 4):
                raise ValueError(f"potential term {item!r} must be 'a b re [im]'")
            a, b = int(parts[0]), int(parts[1])
            c = complex(float(parts[2]), float(parts[3]) if len(parts) == 4 else 0.0)
            terms[(a, b)] = terms.get((a, b), 0j) + c
        return cls(terms)

    # -- evaluation -------------------------------------------------------
    def arrays(self):
        items = sorted(self.terms.items())
        a = np.array([k[0] for k, _ in items], dtype=np.int64)
        b = np.array([k[1] for k, _ in items], dtype=np.int64)
        c = np.array([v for _, v in items], dtype=np.complex128)
        return a, b, c

    def _eval(self, z, da=0, db=0):
        z = np.asarray(z, dtype=np.complex128)
        zb = np.conj(z)
        out = np.zeros(z.shape, dtype=np.complex128)
        for (a, b), c in self.terms.items():
            if a < da or b < db:
                continue
            fa = math.perm(a, da)
            fb = math.perm(b, db)
            out = out + c * fa * fb * z ** (a - da) * zb ** (b - db)
        return out

    def __call__(self, z):
        return self._eval(z).real

    def dz(self, z):
        return self._eval(z, da=1)

    def dzb(self, z):
        return self._eval(z, db=1)

    def dzz(self, z):
        return self._eval(z, da=2)

    @property
    def is_rotation_invariant(self):
        return all(a == b for a, b in self.terms)


@dataclass(frozen=True)
class ClassicalState:
    t: float
    z: complex
    v: complex

    def __post_init__(self):
        for val in (self.t, self.z, self.v):
            if not np.isfinite(complex(val)):
                raise ValueError("state components must be finite")


@dataclass(frozen=True)
class Trajectory:
    """Samples of an integrated solution.

    ``I`` is the energy-correction primitive and ``J`` the torque primitive,
    both zero at the first sample.
    """

    t: np.ndarray
    z: np.ndarray
    v: np.ndarray
    I: np.ndarray
    J: np.ndarray
    dt: float
    potential: PolynomialPotential
    params: ModelParams
    eq31_residual: float = float("nan")

    @property
    def zdot(self):
        return eom_rhs(self.z, self.v, self.potential, self.params)[0]

    @property
    def vdot(self):
        return eom_rhs(self.z, self.v, self.potential, self.params)[1]

    def __len__(self):
        return self.t.size


def eom_rhs(z, v, V, p):
    """``(z', v')`` of the first-order system; vectorized over samples."""
    vdot = 1j * V.dzb(z) / p.hbar
    zdot = 1j * np.asarray(v) / p.T - vdot
    return zdot, vdot


def eom_residuals(z, v, zdot, vdot, V, p):
    """Largest residual of the four first-order equations of motion.

    The lines are ``i hbar vbar' - V_z``, ``-i hbar v' - V_zbar``,
    ``i hbar (zbar' + vbar') - (hbar^2/m theta) vbar`` and its conjugate,
    each divided by ``max(1, |terms|)``.
    """
    hb = p.hbar
    g = hb**2 / (p.m * p.theta)
    Vz, Vzb = V.dz(z), V.dzb(z)
    lines = [
        (1j * hb * np.conj(vdot) - Vz, np.abs(hb * vdot) + np.abs(Vz)),
        (-1j * hb * vdot - Vzb, np.abs(hb * vdot) + np.abs(Vzb)),
        (1j * hb * np.conj(zdot + vdot) - g * np.conj(v), np.abs(hb * (zdot + vdot)) + np.abs(g * v)),
        (-1j * hb * (zdot + vdot) - g * v, np.abs(hb * (zdot + vdot)) + np.abs(g * v)),
    ]
    return float(max(np.max(np.abs(r) / np.maximum(1.0, s)) for r, s in lines))


def initial_state(z0, zdot0, V, p, t0=0.0):
    """State whose position moves with velocity ``zdot0`` at ``z0``.

    Solves ``z' = (i/T) v - (i/hbar) V_zbar`` for ``v``.
    """
    z0, zdot0 = complex(z0), complex(zdot0)
    v0 = -1j * p.T * zdot0 + (p.T / p.hbar) * complex(V.dzb(z0))
    return ClassicalState(t0, z0, v0)


def integrate(s0, V, p, t_end, dt=1e-3, drift_tol=1e-8, check_residuals=True):
    """Fixed-step classical RK4 from ``s0`` to ``t_end``.

    Raises
    ------
    StepSizeError
        If ``E_local`` changes by more than ``drift_tol`` (relative to
        ``max(1, |E|)``) in a single step.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not t_end > s0.t:
        raise ValueError("t_end must exceed the initial time")
    nsteps = int(round((t_end - s0.t) / dt))
    if nsteps < 1:
        raise ValueError("interval shorter than one step")
    a, b, c = V.arrays()
    z, v, I, J = kernels.rk4_polynomial(complex(s0.z), complex(s0.v), a, b, c, p.hbar, p.T, dt, nsteps)
    t = s0.t + dt * np.arange(nsteps + 1)
    E = energy_local(z, v, V, p)
    scale = max(1.0, float(np.max(np.abs(E))))
    step = np.max(np.abs(np.diff(E))) / scale
    if step > drift_tol:
        raise StepSizeError(f"energy changed by {step:.3g} in one step (dt={dt:g})")
    res31 = float("nan")
    if check_residuals:
        zd, vd = eom_rhs(z, v, V, p)
        r = eom_residuals(z, v, zd, vd, V, p)
        if r > 1e-12:
            raise StepSizeError(f"equation-of-motion residual {r:.3g} exceeds 1e-12")
        if nsteps >= 2:
            res31 = second_order_residual(z, v, dt, V, p)
    return Trajectory(t, z, v, I, J, dt, V, p, res31)


def second_order_residual(z, v, dt, V, p):
    """Max of ``|z'' + V_zbar/(m theta) + v''|`` with central differences.

    In physical units this is ``z'' = -(2/m) V_zbar - sqrt(2 theta) v''``.
    """
    zdd = (z[2:] - 2 * z[1:-1] + z[:-2]) / dt**2
    vdd = (v[2:] - 2 * v[1:-1] + v[:-2]) / dt**2
    r = zdd + V.dzb(z[1:-1]) / (p.m * p.theta) + vdd
    return float(np.max(np.abs(r)))


def energy_local(z, v, V, p):
    """``(hbar^2 / m theta) |v|^2 + V``."""
    return p.hbar**2 / (p.m * p.theta) * np.abs(v) ** 2 + V(z)


def energy_expanded(z, v, V, p):
    """``(m/2)|x'|^2 + V - m theta |v'|^2 + i hbar (v vbar' - v' vbar)``.

    ``x = sqrt(2 theta) z`` is the physical position.
    """
    zd, vd = eom_rhs(z, v, V, p)
    kin = 0.5 * p.m * 2 * p.theta * np.abs(zd) ** 2
    cross = (1j * p.hbar * (v * np.conj(vd) - vd * np.conj(v))).real
    return kin + V(z) - p.m * p.theta * np.abs(vd) ** 2 + cross


def energy_nonlocal(traj):
    """``m theta |z'|^2 + V + I(t)`` sampled along the trajectory."""
    p = traj.params
    return p.m * p.theta * np.abs(traj.zdot) ** 2 + traj.potential(traj.z) + traj.I


def angular_momentum_general(traj, include_torque=True):
    """``2 m theta Im(zbar z') + J - T (V - z V_z - zbar V_zbar)``.

    ``J = -2 int Im(z V_z) dt`` is the torque primitive.  It vanishes for
    rotation-invariant potentials; with it included the quantity is a first
    integral for every potential, so the mechanical form
    (``include_torque=False``) is the one that reveals broken symmetry.
    """
    p, V, z = traj.params, traj.potential, traj.z
    L = 2 * p.m * p.theta * (np.conj(z) * traj.zdot).imag
    L = L - p.T * (V(z) - 2 * (z * V.dz(z)).real)
    if include_torque:
        L = L + traj.J
    return L


def polar_samples(traj):
    """Physical ``(rho, rho', phi')`` with ``x + i y = rho e^{i phi}``."""
    s = math.sqrt(2 * traj.params.theta)
    z, zd = traj.z, traj.zdot
    r = np.abs(z)
    if np.any(r == 0):
        raise DomainError("polar coordinates undefined at the origin")
    rho = s * r
    rho_dot = s * (np.conj(z) * zd).real / r
    phi_dot = (np.conj(z) * zd).imag / r**2
    return rho, rho_dot, phi_dot


def invariants_polar(rho, rho_dot, phi_dot, V_radial, dV_radial, p):
    """``(E, L)`` for a rotation-invariant potential ``V(rho)``.

    ``L = m rho^2 phi' - T (V - rho V')`` and
    ``E = m rho'^2 / 2 + V + (L + T V)^2 / (2 m rho^2)``.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise DomainError("rho must be positive")
    Vr, dVr = V_radial(rho), dV_radial(rho)
    L = p.m * rho**2 * phi_dot - p.T * (Vr - rho * dVr)
    E = 0.5 * p.m * rho_dot**2 + Vr + (L + p.T * Vr) ** 2 / (2 * p.m * rho**2)
    return E, L


def circular_mode_rates(c, p):
    """Rates ``lam`` of circular solutions ``z ~ e^{i lam t}`` for ``V = c|z|^2``.

    Roots of ``lam^2 + (c/hbar) lam - c/(hbar T) = 0``.
    """
    b = c / p.hbar
    disc = math.sqrt(b * b + 4 * c / (p.hbar * p.T))
    return (-b + disc) / 2, (-b - disc) / 2


def trajectory_rows(traj):
    """Rows for export in the order of ``TRAJECTORY_COLUMNS``."""
    El = energy_local(traj.z, traj.v, traj.potential, traj.params)
    En = energy_nonlocal(traj)
    L = angular_momentum_general(traj)
    return np.column_stack([traj.t, traj.z.real, traj.z.imag, traj.v.real, traj.v.imag, El, En, L])


def trajectory_csv(traj):
    """The trajectory as CSV text (LF line endings, 17 significant digits)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRAJECTORY_COLUMNS)
    for row in trajectory_rows(traj):
        w.writerow([f"{x:.17g}" for x in row])
    return buf.getvalue()
