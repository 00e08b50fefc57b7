import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncqm.errors import DomainError
from ncqm.overlap import (
    FDStencil,
    OverlapField,
    constraint_residuals,
    diffop_check,
    intrinsic_L_constraint_residual,
    ladder_dictionary_check,
    overlap_zv,
)
from ncqm.qspace import ModelParams, hs_inner, random_state
from ncqm.spectra import AngularState, momentum_state
from ncqm.states import state_zv

seeds = st.integers(0, 2**32 - 1)
pt = st.complex_numbers(max_magnitude=0.8, allow_nan=False, allow_infinity=False)


def vacuum(n):
    psi = np.zeros((n, n), dtype=complex)
    psi[0, 0] = 1
    return psi


class TestOverlap:
    def test_vacuum_origin(self):
        assert overlap_zv(vacuum(16), 0, 0) == pytest.approx(1)

    def test_vacuum_closed_form(self):
        z, v = 0.3 - 0.4j, -0.2 + 0.6j
        w = z + v
        ref = np.exp((np.conj(v) * z - np.conj(z) * v) / 2) * np.exp(-abs(z) ** 2 / 2 - abs(w) ** 2 / 2)
        assert abs(overlap_zv(vacuum(32), z, v) - ref) < 1e-14

    def test_agrees_with_hs_route(self, rng):
        n = 32
        psi = random_state(n, rng)
        worst = 0.0
        for _ in range(20):
            z, v = complex(*rng.uniform(-1, 1, 2)), complex(*rng.uniform(-1, 1, 2))
            worst = max(worst, abs(overlap_zv(psi, z, v) - hs_inner(state_zv(z, v, n), psi)))
        assert worst < 1e-12

    def test_vectorized(self, rng):
        psi = random_state(16, rng)
        z = np.array([0.1, 0.2j, -0.3])
        v = np.array([0.0, 0.1, 0.2 - 0.1j])
        out = overlap_zv(psi, z, v)
        assert out.shape == (3,)
        assert np.allclose(out, [overlap_zv(psi, a, b) for a, b in zip(z, v)])

    def test_guard(self):
        with pytest.raises(DomainError):
            overlap_zv(vacuum(8), 1.5, 1.0)

    def test_field_is_immutable(self):
        f = OverlapField(vacuum(8))
        with pytest.raises(ValueError):
            f.psi[0, 0] = 2


class TestStencil:
    def test_rejects_bad_step(self):
        with pytest.raises(ValueError):
            FDStencil(h=0)

    def test_wirtinger_of_polynomial(self):
        f = lambda z, v: z**2 * np.conj(z) + v * np.conj(v) ** 2  # noqa: E731
        z, v = 0.3 + 0.2j, -0.1 + 0.4j
        j = FDStencil().jet(f, z, v)
        assert abs(j.dz - 2 * z * np.conj(z)) < 1e-10
        assert abs(j.dzb - z**2) < 1e-10
        assert abs(j.dv - np.conj(v) ** 2) < 1e-10
        assert abs(j.dvb - 2 * v * np.conj(v)) < 1e-10
        assert abs(j.dzdzb - 2 * z) < 1e-8
        assert abs(j.dvdvb - 2 * np.conj(v)) < 1e-8


class TestDictionary:
    def test_vacuum_lines(self):
        r = ladder_dictionary_check(vacuum(32), 0.3, 0.2j)
        assert r["B_Ldag"] < 1e-12
        assert r["B_R"] < 1e-12
        assert max(r.values()) < 1e-8

    @given(seeds, pt, pt)
    def test_random_states(self, seed, z, v):
        psi = random_state(32, np.random.default_rng(seed), margin=20)
        r = ladder_dictionary_check(psi, z, v)
        assert r["B_Ldag"] < 1e-12 and r["B_R"] < 1e-12
        assert r["B_Rdag_forms"] < 1e-8
        assert max(r.values()) < 10 * FDStencil().h ** 2


class TestConstraints:
    def test_vacuum(self):
        r1, r2 = constraint_residuals(vacuum(32), 0.3, 0.2j)
        assert abs(r1) < 1e-7 and abs(r2) < 1e-7

    @given(seeds, pt, pt)
    def test_hold_for_every_state(self, seed, z, v):
        # not only nice states: a dense random matrix
        psi = random_state(24, np.random.default_rng(seed))
        r1, r2 = constraint_residuals(psi, z, v)
        assert abs(r1) < 1e-6 and abs(r2) < 1e-6

    def test_negative_control(self):
        v = 0.2j
        r1, _ = constraint_residuals(lambda z, vv: np.conj(vv), 0.3, v)
        assert abs(r1 - (1 + abs(v) ** 2 / 2)) < 1e-8

    def test_intrinsic_part_leaves_physical_subspace(self, rng):
        psi = random_state(32, rng, margin=20)
        r1, r2 = intrinsic_L_constraint_residual(psi, 0.3 + 0.1j, 0.2 - 0.3j)
        assert max(abs(r1), abs(r2)) > 1e-3


class TestDifferentialForms:
    def test_free_momentum_eigenstate(self, ref_params):
        k = 1.0 + 0.5j
        psi = momentum_state(k, ref_params, 64)
        assert diffop_check(psi, 0.3, 0.1j, "free_H", ref_params) < 1e-6
        # eigenvalue form: -(hbar^2/m theta) f_zzbar = |k|^2/2m f
        j = FDStencil().jet(OverlapField(psi), 0.3, 0.1j)
        lhs = -(ref_params.hbar**2 / (ref_params.m * ref_params.theta)) * j.dzdzb
        assert abs(lhs - abs(k) ** 2 / (2 * ref_params.m) * j.f) < 1e-6

    def test_angular_l1(self, ref_params):
        psi = AngularState(1, [1.0]).matrix(32)
        assert diffop_check(psi, 0.4, 0.2 - 0.1j, "angular_L", ref_params) < 1e-6
        from ncqm.overlap import angular_L_forms

        j = FDStencil().jet(OverlapField(psi), 0.4, 0.2 - 0.1j)
        a, b = angular_L_forms(j, 0.4, 0.2 - 0.1j)
        assert abs(a - j.f) < 1e-6 and abs(b - j.f) < 1e-6

    def test_angular_vacuum(self, ref_params):
        j = FDStencil().jet(OverlapField(vacuum(32)), 0.4, 0.2)
        from ncqm.overlap import angular_L_forms

        assert max(abs(x) for x in angular_L_forms(j, 0.4, 0.2)) < 1e-8

    @given(seeds, pt, pt)
    def test_forms_on_random_states(self, seed, z, v):
        p = ModelParams(theta=0.4)
        psi = random_state(32, np.random.default_rng(seed), margin=20)
        assert diffop_check(psi, z, v, "free_H", p) < 100 * FDStencil().h ** 2
        assert diffop_check(psi, z, v, "angular_L", p) < 100 * FDStencil().h ** 2

    @pytest.mark.parametrize("which", ["ho_H", "ho_H_hermitian"])
    def test_oscillator_forms_extended(self, which, rng):
        p = ModelParams(theta=0.2, omega_l=1.0, omega_r=0.6)
        psi = random_state(32, rng, margin=20)
        assert diffop_check(psi, 0.3 + 0.2j, -0.1 + 0.3j, which, p) < 100 * FDStencil().h ** 2

    def test_unknown_operator(self, rng):
        with pytest.raises(ValueError):
            diffop_check(vacuum(8), 0, 0, "nope", ModelParams())
