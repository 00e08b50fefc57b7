import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import ncqm
from ncqm._backend import available_backends

BACKENDS = available_backends()
pot = (
    np.array([1, 2, 0, 2], dtype=np.int64),
    np.array([1, 0, 2, 2], dtype=np.int64),
    np.array([0.3, 0.05 + 0.02j, 0.05 - 0.02j, 0.1], dtype=np.complex128),
)


def test_selected_backend_is_available():
    assert ncqm.BACKEND in BACKENDS
    assert "python" in BACKENDS


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_coherent_amplitudes(name):
    k = BACKENDS[name]
    zs = np.array([0, 0.5 - 0.2j, 1.3j])
    out = k.coherent_amplitudes(zs, 12)
    idx = np.arange(12)
    lf = np.array([math.lgamma(i + 1) for i in idx])
    for row, z in zip(out, zs):
        ref = np.exp(-abs(z) ** 2 / 2) * np.array([z**i for i in idx]) / np.exp(0.5 * lf)
        assert np.allclose(row, ref, rtol=1e-14, atol=1e-300)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_rk4_shapes_and_start(name):
    z, v, I, J = BACKENDS[name].rk4_polynomial(0.4 + 0.1j, 0.2j, *pot, 1.0, 0.2, 1e-3, 50)
    assert z.shape == v.shape == I.shape == J.shape == (51,)
    assert z[0] == 0.4 + 0.1j and v[0] == 0.2j and I[0] == 0 and J[0] == 0


@pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")
@given(st.complex_numbers(max_magnitude=1, allow_nan=False), st.complex_numbers(max_magnitude=1, allow_nan=False))
def test_backends_agree(z0, v0):
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    a = py.rk4_polynomial(z0, v0, *pot, 1.0, 0.2, 1e-3, 200)
    b = cy.rk4_polynomial(z0, v0, *pot, 1.0, 0.2, 1e-3, 200)
    for x, y in zip(a, b):
        assert np.allclose(x, y, rtol=1e-12, atol=1e-13)
    zs = np.array([z0, v0])
    assert np.allclose(py.coherent_amplitudes(zs, 20), cy.coherent_amplitudes(zs, 20), rtol=1e-13, atol=0)


def test_fallback_selected_by_environment():
    import subprocess
    import sys

    code = "import ncqm; print(ncqm.BACKEND)"
    out = subprocess.run(
        [sys.executable, "-c", code], env={"NCQM_PURE_PYTHON": "1", "PATH": ""}, capture_output=True, text=True
    )
    assert out.stdout.strip() == "python"
