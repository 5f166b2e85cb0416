"""Pump-probe measurement schemes built on the scattering kernels.

Each scan point is: prepare the qubit (pump), let it relax for ``tau``,
scatter one probe electron, and read an observable from the energy
spectrum. With ``shots > 0`` the spectrum is replaced by a multinomial
estimate drawn from a per-point RNG stream ``SeedSequence([seed, index])``,
so results do not depend on evaluation order.

Energies are in units of the qubit quantum.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import units
from .coupling import CouplingConstant, PhysicalParams, coupling_g
from .electron import disperse, make_duo, make_pinem, make_unshaped
from .errors import IndeterminateStateError, ValidationError
from .fitting import fit_sinusoid
from .qubit import DecayParams, QubitDensityMatrix, apply_rotation, bloch_state, evolve
from .scattering import Spectrum, eels_spectrum
from .series import ScanSeries, require_increasing

PROBE_KINDS = ("unshaped", "duo", "pinem")
T1_READOUTS = ("gain", "pulse")


@dataclass(frozen=True)
class ProbeSpec:
    """Electron shape: ``unshaped``, ``duo`` (phase ``phi_e``) or ``pinem``.

    ``phi_e=None`` for a duo probe means "choose it so that the interference
    phase is pi/2 for the prepared qubit".
    """

    kind: str = "unshaped"
    phi_e: float = None
    g_pinem: float = 0.0
    phi: float = 0.0
    chi: float = 0.0

    def __post_init__(self):
        if self.kind not in PROBE_KINDS:
            raise ValidationError(f"probe kind must be one of {PROBE_KINDS}, got {self.kind!r}")

    def build(self, phi_e=None):
        if self.kind == "unshaped":
            return make_unshaped()
        if self.kind == "duo":
            pe = self.phi_e if phi_e is None else phi_e
            return make_duo(0.0 if pe is None else pe)
        return disperse(make_pinem(self.g_pinem, self.phi), self.chi)


@dataclass(frozen=True)
class PumpSpec:
    """Qubit preparation from ``|g>``: a Bloch point, or a rotation sequence.

    ``rotations`` is a sequence of ``(axis, angle)`` pairs applied in order;
    when given it overrides ``theta_a``/``phi_a``.
    """

    theta_a: float = 0.0
    phi_a: float = 0.0
    rotations: tuple = ()

    def state(self):
        if not self.rotations:
            return bloch_state(self.theta_a, self.phi_a)
        rho = QubitDensityMatrix.ground()
        for axis, angle in self.rotations:
            rho = apply_rotation(rho, axis, angle)
        return rho


@dataclass(frozen=True)
class ExperimentConfig:
    coupling: CouplingConstant
    decay: DecayParams
    pump: PumpSpec = field(default_factory=PumpSpec)
    probe: ProbeSpec = field(default_factory=ProbeSpec)
    tau_grid: tuple = (0.0,)
    shots: int = 0
    seed: int = 0
    physical: PhysicalParams = None
    t1_readout: str = "gain"

    def __post_init__(self):
        tau = require_increasing(self.tau_grid)
        object.__setattr__(self, "tau_grid", tuple(float(t) for t in tau))
        if int(self.shots) != self.shots or self.shots < 0:
            raise ValidationError("shots must be a non-negative integer")
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError("seed must be an unsigned 64-bit integer")
        if self.t1_readout not in T1_READOUTS:
            raise ValidationError(f"t1_readout must be one of {T1_READOUTS}")
        object.__setattr__(self, "shots", int(self.shots))
        object.__setattr__(self, "seed", int(self.seed))

    @classmethod
    def from_dict(cls, d):
        """Build from the JSON config layout (see the README)."""
        physical = physical_from_dict(d["physical"]) if "physical" in d else None
        if "coupling" in d:
            c = d["coupling"]
            coupling = CouplingConstant(c["magnitude"], c.get("phase", 0.0), c.get("kappa", 0.0))
        elif physical is not None:
            coupling = coupling_g(physical)
        else:
            raise ValidationError("config needs either 'coupling' or 'physical'")
        dc = d.get("decay", {"t1": 1.0, "t2": 1.0})
        omega0 = physical.omega0 if physical is not None else 0.0
        decay = DecayParams(dc["t1"], dc["t2"], dc.get("omega0", omega0))
        pu = d.get("pump", {})
        rot = tuple((tuple(r["axis"]), r["angle"]) for r in pu.get("rotations", ()))
        pump = PumpSpec(pu.get("theta_a", 0.0), pu.get("phi_a", 0.0), rot)
        pr = d.get("probe", {})
        probe = ProbeSpec(pr.get("kind", "unshaped"), pr.get("phi_e"), pr.get("g_pinem", 0.0), pr.get("phi", 0.0), pr.get("chi", 0.0))
        return cls(
            coupling=coupling,
            decay=decay,
            pump=pump,
            probe=probe,
            tau_grid=tuple(parse_grid(d.get("tau_grid", [0.0]))),
            shots=d.get("shots", 0),
            seed=d.get("seed", 0),
            physical=physical,
            t1_readout=d.get("t1_readout", "gain"),
        )


def physical_from_dict(ph):
    """``{dipole_debye, gap_ev, r_perp_nm, beta | kinetic_energy_kev}`` -> PhysicalParams."""
    beta = ph["beta"] if "beta" in ph else units.beta_from_kinetic_energy(ph["kinetic_energy_kev"])
    return PhysicalParams.from_lab_units(tuple(ph["dipole_debye"]), ph["gap_ev"], ph["r_perp_nm"], beta)


def parse_grid(spec):
    """A grid given as a list or as ``{"start", "stop", "num"}``."""
    if isinstance(spec, dict):
        return np.linspace(spec["start"], spec["stop"], int(spec["num"]))
    return np.asarray(spec, dtype=float)


# --------------------------------------------------------------------------
# sampling
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Counts:
    labels: np.ndarray
    counts: np.ndarray
    leak_count: int
    shots: int

    def as_dict(self):
        return {float(l): int(c) for l, c in zip(self.labels, self.counts)}

    def estimate(self):
        """Frequency estimate ``P_n = counts / shots`` as a :class:`Spectrum`."""
        return Spectrum(self.labels, self.counts / self.shots, self.leak_count / self.shots)


def point_rng(seed, index):
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def sample_counts(s: Spectrum, shots, seed, index=0):
    """Multinomial detector counts for ``shots`` electrons (leak is its own bin)."""
    if int(shots) != shots or shots < 1:
        raise ValidationError("shots must be an integer >= 1")
    pr = np.append(s.probabilities, s.leak)
    pr = pr / pr.sum()
    draw = point_rng(seed, index).multinomial(int(shots), pr)
    return Counts(s.labels.copy(), draw[:-1], int(draw[-1]), int(shots))


def _observe(s: Spectrum, cfg: ExperimentConfig, index):
    return sample_counts(s, cfg.shots, cfg.seed, index).estimate() if cfg.shots else s


def _gain(s: Spectrum, e_mean, shots):
    mean = s.mean_label()
    if not shots:
        return mean - e_mean, 0.0
    var = max(float(np.dot(s.labels**2, s.probabilities)) - mean * mean, 0.0)
    return mean - e_mean, math.sqrt(var / shots)


def _delta_p(s: Spectrum, shots):
    hi, lo = s.prob(0.5), s.prob(-0.5)
    if not shots:
        return hi - lo, 0.0
    var = max(hi + lo - (hi - lo) ** 2, 0.0)
    return hi - lo, math.sqrt(var / shots)


def bloch_angles(rho: QubitDensityMatrix):
    """``(theta_a, phi_a)`` of the Bloch vector direction."""
    x, y, z = rho.bloch_vector()
    return math.atan2(math.hypot(x, y), z), math.atan2(-y, x)


def auto_phi_e(rho: QubitDensityMatrix, g: CouplingConstant):
    """Duo phase giving interference phase ``phi_a - phi_e - phi_g = pi/2``."""
    return bloch_angles(rho)[1] - g.phase - 0.5 * math.pi


# --------------------------------------------------------------------------
# scans
# --------------------------------------------------------------------------


def run_t1_scan(cfg: ExperimentConfig):
    """Mean energy gain (``gain`` readout) or pulse-then-duo ``delta_p`` versus delay.

    With the ``gain`` readout an unshaped probe after a ``|e>`` pump gives
    ``sin^2|g| (2 p0 exp(-tau/T1) - 1)``. The ``pulse`` readout applies a
    pi/2 rotation about x after the delay and probes immediately with a duo
    electron, so the population decay appears as a ``delta_p`` decay.
    """
    rho0 = cfg.pump.state()
    g = cfg.coupling
    values, errs = [], []
    if cfg.t1_readout == "gain":
        e = cfg.probe.build()
        for k, tau in enumerate(cfg.tau_grid):
            s = _observe(eels_spectrum(e, evolve(rho0, tau, cfg.decay), g), cfg, k)
            v, se = _gain(s, e.mean_label(), cfg.shots)
            values.append(v)
            errs.append(se)
        return ScanSeries(cfg.tau_grid, values, errs, "average_gain")
    axis = (1.0, 0.0, 0.0)
    phi_e = cfg.probe.phi_e
    if phi_e is None:
        phi_e = auto_phi_e(apply_rotation(QubitDensityMatrix.excited(), axis, 0.5 * math.pi), g)
    e = make_duo(phi_e)
    for k, tau in enumerate(cfg.tau_grid):
        rho = apply_rotation(evolve(rho0, tau, cfg.decay), axis, 0.5 * math.pi)
        s = _observe(eels_spectrum(e, rho, g), cfg, k)
        v, se = _delta_p(s, cfg.shots)
        values.append(v)
        errs.append(se)
    return ScanSeries(cfg.tau_grid, values, errs, "delta_p")


def run_t2_scan(cfg: ExperimentConfig):
    """Duo-electron ``delta_p = P(+1/2) - P(-1/2)`` versus delay."""
    if cfg.probe.kind != "duo":
        raise ValidationError("T2 scans need a duo probe")
    rho0 = cfg.pump.state()
    g = cfg.coupling
    phi_e = cfg.probe.phi_e if cfg.probe.phi_e is not None else auto_phi_e(rho0, g)
    e = make_duo(phi_e)
    values, errs = [], []
    for k, tau in enumerate(cfg.tau_grid):
        s = _observe(eels_spectrum(e, evolve(rho0, tau, cfg.decay), g), cfg, k)
        v, se = _delta_p(s, cfg.shots)
        values.append(v)
        errs.append(se)
    return ScanSeries(cfg.tau_grid, values, errs, "delta_p")


@dataclass(frozen=True, eq=False)
class TomographyResult:
    theta_a: float
    phi_a: float
    hemisphere: str
    amplitude: float
    phase_offset: float
    lobe_difference: float
    phase_determined: bool

    def to_dict(self):
        return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in self.__dict__.items()}

    @classmethod
    def from_dict(cls, d):
        vals = {k: (float("nan") if v is None else v) for k, v in d.items()}
        return cls(**vals)

    def __eq__(self, other):
        if not isinstance(other, TomographyResult):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def tomography(cfg: ExperimentConfig, phi_e_grid):
    """Reconstruct the qubit Bloch angles from a duo-phase scan.

    The scan is fitted to ``delta_p(phi_e) = C + A sin(phi_e + phi0)``; then
    ``sin(theta) = A / (cos|g| sin|g|)``, ``phi_a = pi - phi0 + phi_g`` and
    ``cos(theta) = 2 (P(+3/2) - P(-3/2)) / sin^2|g|`` from the side lobes. The
    side lobes also decide the hemisphere: ``upper`` (towards ``|e>``) when
    the gain lobe is larger.

    The delay is the first entry of ``tau_grid``.

    Raises
    ------
    IndeterminateStateError
        If neither the interference amplitude nor the side lobes rise above
        the noise floor.
    """
    grid = np.asarray(phi_e_grid, dtype=float)
    if grid.size < 3:
        raise ValidationError("phi_e grid needs at least 3 points")
    g = cfg.coupling
    c, s = math.cos(g.magnitude), math.sin(g.magnitude)
    if s == 0.0:
        raise IndeterminateStateError("zero coupling carries no information about the qubit")
    rho = evolve(cfg.pump.state(), cfg.tau_grid[0], cfg.decay)
    dp, dp_err, lobes, lobe_err = [], [], [], []
    for k, pe in enumerate(grid):
        spec = _observe(eels_spectrum(make_duo(pe), rho, g), cfg, k)
        v, se = _delta_p(spec, cfg.shots)
        dp.append(v)
        dp_err.append(se)
        up, dn = spec.prob(1.5), spec.prob(-1.5)
        lobes.append(up - dn)
        if cfg.shots:
            lobe_err.append(math.sqrt(max(up + dn - (up - dn) ** 2, 0.0) / cfg.shots))
    fit = fit_sinusoid(grid, np.array(dp), np.array(dp_err) if cfg.shots else None)
    lobe = float(np.mean(lobes))
    if cfg.shots:
        amp_floor = 3.0 * math.sqrt(max(0.5 * (fit.covariance[1, 1] + fit.covariance[2, 2]), 0.0))
        lobe_floor = 3.0 * math.sqrt(float(np.sum(np.square(lobe_err)))) / grid.size
    else:
        amp_floor = 1e-12
        lobe_floor = 1e-15
    phase_ok = fit.amplitude > amp_floor
    if not phase_ok and abs(lobe) <= lobe_floor:
        raise IndeterminateStateError("interference amplitude and side lobes are both below the noise floor")
    sin_t = min(fit.amplitude / (c * s), 1.0) if phase_ok else 0.0
    cos_t = max(-1.0, min(1.0, 2.0 * lobe / (s * s)))
    if phase_ok:
        theta = math.atan2(sin_t, cos_t)
        phi = (math.pi - fit.phase + g.phase) % (2.0 * math.pi)
    else:
        theta = 0.0 if lobe > 0 else math.pi
        phi = float("nan")
    if abs(lobe) <= lobe_floor:
        hemisphere = "equator"
    else:
        hemisphere = "upper" if lobe > 0 else "lower"
    return TomographyResult(theta, phi, hemisphere, fit.amplitude, fit.phase, lobe, phase_ok)


# --------------------------------------------------------------------------
# estimators and conversions
# --------------------------------------------------------------------------


def estimate_coupling(delta_p_value, ab=0.5, sin_phi=1.0):
    """``|g|`` from a duo ``delta_p = sin(2|g|) ab sin(Phi)`` reading."""
    x = delta_p_value / (ab * sin_phi)
    if not -1.0 <= x <= 1.0:
        raise ValidationError(f"delta_p = {delta_p_value} is outside the invertible range")
    return 0.5 * math.asin(x)


def gamma_from_ldos(dipole_debye, omega0, rho_z):
    """Radiative rate ``pi w0 |d|^2 rho_z / (hbar eps0)`` from a partial LDOS.

    ``rho_z`` is in s/m^3; for the vacuum value ``w0^2 / (3 pi^2 c^3)`` this
    is the free-space rate ``w0^3 |d|^2 / (3 pi eps0 hbar c^3)``.
    """
    if rho_z < 0:
        raise ValidationError("LDOS must be >= 0")
    if omega0 <= 0:
        raise ValidationError("omega0 must be > 0")
    d = float(np.linalg.norm(np.atleast_1d(dipole_debye))) * units.DEBYE
    return math.pi * omega0 * d * d * rho_z / (units.HBAR * units.EPS0)


def vacuum_ldos(omega0):
    """Partial (one polarisation) vacuum LDOS ``w0^2 / (3 pi^2 c^3)``."""
    return omega0**2 / (3.0 * math.pi**2 * units.C_LIGHT**3)
