import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freequbit.errors import ValidationError
from freequbit.qubit import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    DecayParams,
    QubitDensityMatrix,
    apply_rotation,
    bloch_state,
    evolve,
    rotation_matrix,
)

angles = st.floats(0, math.pi)
azimuths = st.floats(-math.pi, math.pi)


@given(angles, azimuths)
def test_bloch_state_pure_and_oriented(theta, phi):
    r = bloch_state(theta, phi)
    assert r.purity() == pytest.approx(1.0, abs=1e-12)
    v = r.bloch_vector()
    assert v[2] == pytest.approx(math.cos(theta), abs=1e-12)
    assert np.hypot(v[0], v[1]) == pytest.approx(math.sin(theta), abs=1e-12)
    if 1e-3 < theta < math.pi - 1e-3:
        assert math.remainder(math.atan2(-v[1], v[0]) - phi, 2 * math.pi) == pytest.approx(0.0, abs=1e-9)


def test_expectation_values_match_bloch_vector():
    r = bloch_state(1.0, 0.4)
    m = r.matrix()
    v = [np.trace(m @ s).real for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)]
    assert np.allclose(v, r.bloch_vector())


def test_poles():
    assert bloch_state(0.0) == QubitDensityMatrix.excited()
    assert bloch_state(math.pi).p_excited == pytest.approx(0.0, abs=1e-30)


def test_positivity_enforced():
    with pytest.raises(ValidationError):
        QubitDensityMatrix(0.5, 0.6)
    with pytest.raises(ValidationError):
        QubitDensityMatrix(1.2)
    with pytest.raises(ValidationError):
        bloch_state(4.0)


def test_decay_params():
    with pytest.raises(ValidationError):
        DecayParams(1.0, 2.5)
    with pytest.raises(ValidationError):
        DecayParams(0.0, 1.0)
    DecayParams(1.0, 2.0)


@given(angles, azimuths, st.floats(0, 10), st.floats(0.1, 5), st.floats(0.05, 1))
@settings(max_examples=60)
def test_evolution_stays_physical(theta, phi, tau, t1, frac):
    d = DecayParams(t1, 2 * t1 * frac)
    r = bloch_state(theta, phi)
    out = evolve(r, tau, d)
    assert out.p_excited == pytest.approx(r.p_excited * math.exp(-tau / t1))
    assert abs(out.coherence) == pytest.approx(abs(r.coherence) * math.exp(-tau / d.t2))
    assert out.purity() <= 1 + 1e-12


def test_lab_frame_phase():
    d = DecayParams(1e9, 1e9, omega0=2.0)
    out = evolve(bloch_state(math.pi / 2, 0.0), 0.3, d, rotating_frame=False)
    assert np.angle(out.coherence) == pytest.approx(0.6)
    with pytest.raises(ValidationError):
        evolve(bloch_state(1.0), -1.0, d)


def test_rotations():
    x_pi2 = apply_rotation(QubitDensityMatrix.excited(), (1, 0, 0), math.pi / 2)
    assert x_pi2.p_excited == pytest.approx(0.5)
    flipped = apply_rotation(QubitDensityMatrix.ground(), (0, 1, 0), math.pi)
    assert flipped.p_excited == pytest.approx(1.0)
    u = rotation_matrix((0, 0, 1), 0.9)
    assert np.allclose(u @ u.conj().T, np.eye(2))
    with pytest.raises(ValidationError):
        rotation_matrix((1, 1, 0), 1.0)


@given(angles, azimuths)
def test_json_round_trip(theta, phi):
    r = bloch_state(theta, phi)
    assert QubitDensityMatrix.from_json(r.to_json()) == r
