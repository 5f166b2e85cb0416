import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from freequbit import units
from freequbit.electron import (
    ElectronLadderState,
    disperse,
    dispersion_chi,
    ladder_moment,
    make_duo,
    make_pinem,
    make_unshaped,
    pinem_window,
)
from freequbit.errors import TruncationError, ValidationError


def test_unshaped():
    e = make_unshaped()
    assert e.labels.tolist() == [0.0]
    assert ladder_moment(e, 1) == 0


def test_duo_labels_and_moment():
    e = make_duo(0.7)
    assert e.labels.tolist() == [-0.5, 0.5]
    assert ladder_moment(e, 1) == pytest.approx(0.5 * np.exp(0.7j))
    assert e.mean_label() == pytest.approx(0.0)


def test_normalisation_enforced():
    with pytest.raises(ValidationError):
        ElectronLadderState(0, np.array([1.0, 1.0]))
    with pytest.raises(ValidationError):
        ElectronLadderState(0, np.array([]))
    assert ElectronLadderState.normalized(3, [1.0, 1j]).norm == pytest.approx(1.0)


def test_amplitudes_immutable():
    e = make_duo(0.0)
    with pytest.raises(ValueError):
        e.amplitudes[0] = 0.0


@given(st.floats(0, 6), st.floats(-math.pi, math.pi))
@settings(max_examples=30, deadline=None)
def test_pinem_comb(gp, phi):
    e = make_pinem(gp, phi)
    assert abs(e.norm - 1.0) < 1e-12
    n = e.indices
    ref = special.jv(n, 2 * gp) * np.exp(1j * phi * n)
    assert np.allclose(e.amplitudes, ref, atol=1e-10)
    assert ladder_moment(e, 0) == pytest.approx(1.0)


def test_pinem_window_too_small():
    with pytest.raises(TruncationError, match="window"):
        make_pinem(5.0, window=4)
    with pytest.raises(ValidationError):
        make_pinem(-1.0)
    assert pinem_window(0.0) == 20


def test_dispersion_preserves_populations():
    e = make_pinem(1.0, 0.3)
    d = disperse(e, 0.4)
    assert np.allclose(d.populations(), e.populations())
    assert disperse(e, 0.0) == e


def test_dispersion_chi_nonrelativistic():
    beta, w0, L = 1e-3, 1e15, 1e-3
    v = beta * units.C_LIGHT
    assert dispersion_chi(L, beta, w0) == pytest.approx(-units.HBAR * w0**2 * L / (2 * units.M_ELECTRON * v**3), rel=1e-5)


def test_moment_order():
    e = ElectronLadderState.normalized(-1, [1, 2, 3])
    c = e.amplitudes
    assert ladder_moment(e, 2) == pytest.approx(np.conj(c[0]) * c[2])
    assert ladder_moment(e, 5) == 0
    with pytest.raises(ValidationError):
        ladder_moment(e, -1)


def test_json_round_trip():
    e = disperse(make_pinem(0.8, 0.2), 0.1)
    assert ElectronLadderState.from_json(e.to_json()) == e
    d = make_duo(1.1)
    assert ElectronLadderState.from_json(d.to_json()) == d
