import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freequbit import units
from freequbit.coupling import CouplingConstant
from freequbit.electron import make_duo
from freequbit.errors import IndeterminateStateError, ValidationError
from freequbit.experiments import (
    ExperimentConfig,
    ProbeSpec,
    PumpSpec,
    TomographyResult,
    estimate_coupling,
    gamma_from_ldos,
    parse_grid,
    run_t1_scan,
    run_t2_scan,
    sample_counts,
    tomography,
    vacuum_ldos,
)
from freequbit.fitting import fit_exp_decay
from freequbit.qubit import DecayParams, bloch_state
from freequbit.scattering import eels_spectrum

TAU = tuple(np.linspace(0, 4, 21))
PHI_GRID = np.linspace(0, 2 * math.pi, 12, endpoint=False)


def t1_cfg(**kw):
    base = dict(coupling=CouplingConstant(0.3), decay=DecayParams(1.0, 1.0), pump=PumpSpec(0.0), tau_grid=TAU)
    base.update(kw)
    return ExperimentConfig(**base)


def t2_cfg(**kw):
    base = dict(
        coupling=CouplingConstant(0.3),
        decay=DecayParams(1e6, 0.5),
        pump=PumpSpec(math.pi / 2, 0.0),
        probe=ProbeSpec("duo"),
        tau_grid=tuple(np.linspace(0, 2, 21)),
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_t1_gain_readout_closed_form():
    scan = run_t1_scan(t1_cfg())
    s2 = math.sin(0.3) ** 2
    assert np.allclose(scan.value, s2 * (2 * np.exp(-np.array(TAU)) - 1), atol=1e-14)
    assert scan.observable_kind == "average_gain"
    assert fit_exp_decay(scan).rate == pytest.approx(1.0, rel=1e-6)


def test_t1_pulse_readout():
    scan = run_t1_scan(t1_cfg(t1_readout="pulse", tau_grid=tuple(np.linspace(0, 4, 21))))
    assert scan.observable_kind == "delta_p"
    # an x pi/2 pulse maps the population inversion onto the coherence
    assert scan.value[0] == pytest.approx(0.5 * math.sin(0.6), rel=1e-12)
    assert np.all(np.diff(scan.value) < 0)


def test_t2_closed_form():
    cfg = t2_cfg()
    scan = run_t2_scan(cfg)
    tau = np.array(cfg.tau_grid)
    p = 0.5 * np.exp(-tau / 1e6)
    expected = math.sin(0.6) * 0.5 * np.exp(-tau / 0.5) + 0.5 * math.sin(0.3) ** 2 * (2 * p - 1)
    assert np.allclose(scan.value, expected, atol=1e-14)
    assert fit_exp_decay(scan).rate == pytest.approx(2.0, rel=1e-6)


def test_t2_requires_duo():
    with pytest.raises(ValidationError):
        run_t2_scan(t2_cfg(probe=ProbeSpec("unshaped")))


def test_shot_noise_deterministic_and_order_free():
    a = run_t2_scan(t2_cfg(shots=10000, seed=3))
    b = run_t2_scan(t2_cfg(shots=10000, seed=3))
    assert a == b
    sub = run_t2_scan(t2_cfg(shots=10000, seed=3, tau_grid=tuple(np.linspace(0, 2, 21))[:5]))
    assert np.array_equal(sub.value, a.value[:5])
    c = run_t2_scan(t2_cfg(shots=10000, seed=4))
    assert not np.array_equal(a.value, c.value)
    assert np.all(a.stderr > 0)


def test_sample_counts():
    s = eels_spectrum(make_duo(0.0), bloch_state(1.0), CouplingConstant(0.2))
    c = sample_counts(s, 1000, seed=1)
    assert c.counts.sum() + c.leak_count == 1000
    assert c.estimate().total == pytest.approx(c.counts.sum() / 1000)
    assert sum(c.as_dict().values()) == c.counts.sum()
    with pytest.raises(ValidationError):
        sample_counts(s, 0, seed=1)


def test_config_validation():
    with pytest.raises(ValidationError):
        t1_cfg(shots=-1)
    with pytest.raises(ValidationError):
        t1_cfg(seed=2**64)
    with pytest.raises(ValidationError):
        t1_cfg(tau_grid=(1.0, 0.5))
    with pytest.raises(ValidationError):
        t1_cfg(t1_readout="other")
    with pytest.raises(ValidationError):
        ProbeSpec("triple")
    with pytest.raises(ValidationError):
        ExperimentConfig.from_dict({"tau_grid": [0, 1]})


def test_config_from_dict():
    cfg = ExperimentConfig.from_dict(
        {
            "physical": {"dipole_debye": [288, 0, 0], "gap_ev": 3.0, "r_perp_nm": 6.0, "beta": 0.07},
            "decay": {"t1": 2.0, "t2": 1.0},
            "pump": {"rotations": [{"axis": [0, 1, 0], "angle": math.pi / 2}]},
            "probe": {"kind": "duo", "phi_e": 0.3},
            "tau_grid": {"start": 0, "stop": 1, "num": 5},
            "shots": 100,
            "seed": 9,
        }
    )
    assert cfg.coupling.magnitude == pytest.approx(0.1, abs=0.02)
    assert cfg.decay.omega0 == pytest.approx(units.ev_to_omega(3.0))
    assert cfg.pump.state().p_excited == pytest.approx(0.5)
    assert cfg.tau_grid == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert parse_grid([1, 2]).tolist() == [1.0, 2.0]


@given(st.floats(0.05, math.pi - 0.05), st.floats(0, 2 * math.pi - 1e-6), st.floats(0.05, 0.5), st.floats(-math.pi, math.pi))
@settings(max_examples=40, deadline=None)
def test_tomography_noiseless(theta, phi, gm, gp):
    cfg = t2_cfg(coupling=CouplingConstant(gm, gp), pump=PumpSpec(theta, phi), tau_grid=(0.0,))
    res = tomography(cfg, PHI_GRID)
    assert res.theta_a == pytest.approx(theta, abs=1e-6)
    assert math.remainder(res.phi_a - phi, 2 * math.pi) == pytest.approx(0, abs=1e-6)
    assert res.hemisphere == ("upper" if theta < math.pi / 2 else "lower") or abs(theta - math.pi / 2) < 1e-6


def test_tomography_poles_and_equator():
    res = tomography(t2_cfg(pump=PumpSpec(0.0), tau_grid=(0.0,)), PHI_GRID)
    assert res.theta_a == 0.0 and math.isnan(res.phi_a) and not res.phase_determined
    res = tomography(t2_cfg(pump=PumpSpec(math.pi), tau_grid=(0.0,)), PHI_GRID)
    assert res.theta_a == math.pi and res.hemisphere == "lower"
    res = tomography(t2_cfg(pump=PumpSpec(math.pi / 2, 1.0), tau_grid=(0.0,)), PHI_GRID)
    assert res.hemisphere == "equator"
    back = TomographyResult.from_dict(tomography(t2_cfg(pump=PumpSpec(0.0), tau_grid=(0.0,)), PHI_GRID).to_dict())
    assert math.isnan(back.phi_a)


def test_tomography_indeterminate():
    with pytest.raises(IndeterminateStateError):
        tomography(t2_cfg(coupling=CouplingConstant(0.0), tau_grid=(0.0,)), PHI_GRID)
    # decayed coherence on the equator: nothing rises above the shot-noise floor
    cfg = t2_cfg(decay=DecayParams(1e6, 1e-3), tau_grid=(1.0,), pump=PumpSpec(math.pi / 2), shots=10**4)
    with pytest.raises(IndeterminateStateError):
        tomography(cfg, PHI_GRID)
    # noiselessly the tiny population decay still points at the ground pole
    res = tomography(dataclasses.replace(cfg, shots=0), PHI_GRID)
    assert res.theta_a == math.pi and not res.phase_determined
    with pytest.raises(ValidationError):
        tomography(t2_cfg(), [0.0, 1.0])


def test_tomography_noisy_sign():
    cfg = t2_cfg(pump=PumpSpec(math.pi / 4, 1.0), tau_grid=(0.0,), shots=10**6, seed=2)
    res = tomography(cfg, PHI_GRID)
    assert res.hemisphere == "upper"
    assert res.theta_a == pytest.approx(math.pi / 4, abs=0.1)


def test_estimate_coupling_inverts_law():
    for g in (0.01, 0.1, 0.3):
        assert estimate_coupling(0.5 * math.sin(2 * g)) == pytest.approx(g, rel=1e-12)
    with pytest.raises(ValidationError):
        estimate_coupling(0.9)


def test_free_space_rate_from_ldos():
    w0 = units.ev_to_omega(3.0)
    d = 10.0
    gamma = gamma_from_ldos(d, w0, vacuum_ldos(w0))
    ref = w0**3 * (d * units.DEBYE) ** 2 / (3 * math.pi * units.EPS0 * units.HBAR * units.C_LIGHT**3)
    assert gamma == pytest.approx(ref, rel=1e-12)
    with pytest.raises(ValidationError):
        gamma_from_ldos(d, w0, -1.0)
