import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvtrack.errors import InvalidState
from curvtrack.qcore import (
    IDENTITY,
    KET_E,
    KET_G,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    bloch_components,
    check_density,
    check_pure,
    eig2,
    expectation,
    fidelity,
    gauge_fix,
    pauli_compose,
    projector,
)
from tests.strategies import vectors


def test_basis_order_e_first():
    assert np.array_equal(KET_E, [1, 0])
    assert expectation(KET_E, SIGMA_Z) == 1.0
    assert expectation(KET_G, SIGMA_Z) == -1.0


def test_constants_are_read_only():
    with pytest.raises(ValueError):
        SIGMA_X[0, 0] = 5


@pytest.mark.parametrize(
    "v, expected",
    [
        ((0, 0, 2.0), np.diag([1.0, -1.0])),
        ((3.0, 0, 0), 0.5 * np.array([[0, 3.0], [3.0, 0]])),
    ],
)
def test_pauli_compose_simple(v, expected):
    assert np.allclose(pauli_compose(v), expected, atol=0)


def test_pauli_compose_rotating_frame_form():
    om, phi, de = 1.3, 0.7, -0.4
    h = pauli_compose((om * math.cos(phi), om * math.sin(phi), de))
    ref = 0.5 * np.array([[de, om * np.exp(-1j * phi)], [om * np.exp(1j * phi), -de]])
    assert np.allclose(h, ref, atol=1e-15)


@given(vectors, vectors, st.floats(-3, 3), st.floats(-3, 3))
def test_pauli_compose_linear(v, w, a, b):
    mix = tuple(a * x + b * y for x, y in zip(v, w))
    assert np.abs(pauli_compose(mix) - (a * pauli_compose(v) + b * pauli_compose(w))).max() <= 1e-12


@given(vectors)
def test_bloch_components_roundtrip(v):
    assert np.allclose(bloch_components(pauli_compose(v)), v, atol=1e-14)


def test_pauli_compose_rejects_nan():
    with pytest.raises(ValueError):
        pauli_compose((0, math.nan, 1))


def test_expectation_examples():
    assert expectation(KET_G, SIGMA_Y) == 0.0
    plus_y = (KET_E + 1j * KET_G) / math.sqrt(2)
    assert expectation(plus_y, SIGMA_Y) == pytest.approx(1.0, abs=1e-15)
    assert expectation(0.5 * IDENTITY, SIGMA_Z) == 0.0


def test_state_validation():
    with pytest.raises(InvalidState):
        check_pure([1.0, 1.0])
    with pytest.raises(InvalidState):
        check_density(np.diag([0.7, 0.7]))
    with pytest.raises(InvalidState):
        check_density(np.array([[0.5, 1.0], [0.0, 0.5]]))
    with pytest.raises(InvalidState):
        check_density(np.diag([1.2, -0.2]))  # trace 1, Hermitian, not positive


def test_eig2_examples():
    e_g, e_e, psi_g, psi_e = eig2(0.5 * 2.0 * SIGMA_Z)
    assert (e_g, e_e) == (-1.0, 1.0)
    assert np.allclose(psi_e, KET_E) and np.allclose(psi_g, KET_G)
    # diagonal torus Hamiltonian at delta = 0: 1/2 omega sigma_z
    _, e_e, psi_g, psi_e = eig2(pauli_compose((0.0, 0.0, 0.8)))
    assert e_e == pytest.approx(0.4)
    assert np.allclose(psi_e, KET_E) and np.allclose(psi_g, KET_G)
    c = 1.7
    e_g, e_e, *_ = eig2(pauli_compose((c, 0.0, c)))
    assert e_e - e_g == pytest.approx(c * math.sqrt(2), rel=1e-14)


def test_eig2_degenerate_returns_basis():
    e_g, e_e, psi_g, psi_e = eig2(0.3 * IDENTITY)
    assert e_g == e_e == 0.3
    assert np.array_equal(psi_g, KET_G) and np.array_equal(psi_e, KET_E)


@st.composite
def hermitian(draw):
    v = draw(vectors)
    return pauli_compose(v) + draw(st.floats(-5, 5)) * IDENTITY


@given(hermitian())
def test_eig2_reconstruction(h):
    e_g, e_e, psi_g, psi_e = eig2(h)
    recon = e_g * projector(psi_g) + e_e * projector(psi_e)
    assert np.abs(recon - h).max() <= 1e-10 * max(1.0, np.linalg.norm(h, 2))
    assert e_g <= e_e


@given(hermitian())
def test_eig2_gauge_deterministic(h):
    a, b = eig2(h), eig2(h.copy())
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    _, _, psi_g, psi_e = a
    for psi in (psi_g, psi_e):
        k = int(np.argmax(np.abs(psi) + np.array([1e-12, 0.0])))
        assert psi[k].imag == 0.0 and psi[k].real > 0


def test_gauge_fix_tie_goes_to_e():
    psi = gauge_fix(np.array([1j, -1]) / math.sqrt(2))
    assert psi[0].imag == 0 and psi[0].real > 0


def test_fidelity_examples():
    gg = projector(KET_G)
    assert fidelity(gg, KET_G) == 1.0
    assert fidelity(gg, KET_E) == 0.0
    psi = np.array([0.6, 0.8j])
    assert fidelity(0.5 * IDENTITY, psi) == pytest.approx(0.5)


@given(st.floats(0, 1), st.floats(0, 2 * math.pi), st.floats(0, math.pi), st.floats(0, 2 * math.pi))
def test_fidelity_is_projector_expectation(p, phase, a, b):
    psi = np.array([math.cos(a / 2), np.exp(1j * b) * math.sin(a / 2)])
    chi = np.array([math.sqrt(p), np.exp(1j * phase) * math.sqrt(1 - p)])
    rho = 0.7 * projector(chi) + 0.3 * projector(KET_G)
    assert fidelity(rho, psi) == pytest.approx(expectation(rho, projector(psi)), abs=1e-12)
