"""Collective observables of ``N`` co-located, non-interacting qubits.

Energies are in units of ``hbar w0`` and use the symmetric convention
``E = <J_z>`` in ``[-N/2, N/2]``. The decay model is the symmetric Dicke
cascade with rates ``gamma (J + M)(J - M + 1)``.

To first order in ``g`` a single electron passing the group gains one
quantum with amplitude ``-i g* b+ J-`` and loses one with ``-i g b J+``, so

    P+ = |g|^2 <J+ J->,    P- = |g|^2 <J- J+>,    P+ - P- = 2 |g|^2 <J_z>.
"""

import csv
import io
import math
import warnings
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .coupling import CouplingConstant
from .errors import ConvergenceError, ValidationError
from .kernels import dicke_rk4
from .qubit import QubitDensityMatrix
from .scattering import Spectrum
from .series import ScanSeries, require_increasing

REGIME_LIMIT = 0.1
STEP_FACTOR = 0.01
MAX_DENSE_QUBITS = 10


@dataclass(frozen=True, eq=False)
class DickeEnsemble:
    """Mixture of symmetric Dicke states ``|J, M>``, ``J = N/2``.

    ``populations[m]`` is the weight of ``M = m - J`` (``m`` excitations).
    """

    n_qubits: int
    populations: np.ndarray
    gamma_single: float = 1.0

    def __post_init__(self):
        n = int(self.n_qubits)
        if n < 1:
            raise ValidationError("n_qubits must be >= 1")
        p = np.array(self.populations, dtype=float).ravel()
        if p.size != n + 1:
            raise ValidationError(f"need {n + 1} populations for N = {n}, got {p.size}")
        if np.any(p < 0):
            raise ValidationError("populations must be >= 0")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValidationError(f"populations sum to {p.sum()!r}, not 1")
        if not self.gamma_single >= 0:
            raise ValidationError("gamma_single must be >= 0")
        p.setflags(write=False)
        object.__setattr__(self, "n_qubits", n)
        object.__setattr__(self, "populations", p)
        object.__setattr__(self, "gamma_single", float(self.gamma_single))

    @classmethod
    def dicke(cls, n_qubits, excitations, gamma_single=1.0):
        p = np.zeros(n_qubits + 1)
        p[excitations] = 1.0
        return cls(n_qubits, p, gamma_single)

    @classmethod
    def all_excited(cls, n_qubits, gamma_single=1.0):
        return cls.dicke(n_qubits, n_qubits, gamma_single)

    @classmethod
    def all_ground(cls, n_qubits, gamma_single=1.0):
        return cls.dicke(n_qubits, 0, gamma_single)

    @property
    def j(self):
        return 0.5 * self.n_qubits

    @property
    def m_values(self):
        """``M = -J ... J``."""
        return np.arange(self.n_qubits + 1) - self.j

    def rates(self):
        """Cascade rates ``gamma (J + M)(J - M + 1)`` out of each level."""
        m = np.arange(self.n_qubits + 1)
        return self.gamma_single * m * (self.n_qubits - m + 1.0)

    def mean_energy(self):
        return float(self.m_values @ self.populations)

    def raising_lowering(self):
        """``(<J+ J->, <J- J+>)``."""
        m = np.arange(self.n_qubits + 1)
        n = self.n_qubits
        return float(self.populations @ (m * (n - m + 1.0))), float(self.populations @ ((n - m) * (m + 1.0)))

    def density_matrix(self):
        """Dense ``2^N x 2^N`` matrix (qubit 0 most significant, basis g, e)."""
        n = self.n_qubits
        if n > MAX_DENSE_QUBITS:
            raise ValidationError(f"dense form limited to {MAX_DENSE_QUBITS} qubits")
        rho = np.zeros((2**n, 2**n))
        for m, w in enumerate(self.populations):
            if w == 0:
                continue
            v = dicke_vector(n, m)
            rho += w * np.outer(v, v)
        return rho


def dicke_vector(n_qubits, excitations):
    """Symmetric state with ``excitations`` qubits in ``|e>`` as a ``2^N`` vector."""
    v = np.zeros(2**n_qubits)
    for ones in combinations(range(n_qubits), excitations):
        v[sum(1 << (n_qubits - 1 - k) for k in ones)] = 1.0
    return v / np.linalg.norm(v)


def _collective_ops(n):
    sm = np.array([[0.0, 1.0], [0.0, 0.0]])  # |g><e| in (g, e)
    jm = np.zeros((2**n, 2**n))
    for i in range(n):
        jm += np.kron(np.kron(np.eye(2**i), sm), np.eye(2 ** (n - i - 1)))
    return jm


def _moments(state):
    """``(N, <J+ J->, <J- J+>)`` for the supported ensemble descriptions."""
    if isinstance(state, DickeEnsemble):
        return (state.n_qubits,) + state.raising_lowering()
    if isinstance(state, np.ndarray):
        rho = np.asarray(state, dtype=complex)
        n = int(round(math.log2(rho.shape[0])))
        if rho.shape != (2**n, 2**n) or n > MAX_DENSE_QUBITS:
            raise ValidationError("density matrix must be 2^N x 2^N with N <= 10")
        jm = _collective_ops(n)
        jp = jm.T
        return n, float(np.trace(rho @ jp @ jm).real), float(np.trace(rho @ jm @ jp).real)
    states = list(state)
    if not states or not all(isinstance(s, QubitDensityMatrix) for s in states):
        raise ValidationError("expected a DickeEnsemble, a 2^N matrix or a list of QubitDensityMatrix")
    p = np.array([s.p_excited for s in states])
    q = np.array([s.coherence for s in states])
    cross = abs(q.sum()) ** 2 - float(np.sum(np.abs(q) ** 2))
    return len(states), float(p.sum() + cross), float((1.0 - p).sum() + cross)


def perturbative_spectrum(state, g: CouplingConstant):
    """First-order gain/loss spectrum of an unshaped electron after ``N`` qubits.

    Parameters
    ----------
    state : DickeEnsemble, list of QubitDensityMatrix, or ndarray
        Product states and dense ``2^N`` matrices are accepted as well as
        Dicke mixtures.
    g : CouplingConstant
        Shared single-qubit coupling.

    Returns
    -------
    Spectrum
        Labels ``(-1, 0, 1)``.
    """
    n, jpjm, jmjp = _moments(state)
    g2 = g.magnitude**2
    if g2 * n > REGIME_LIMIT:
        warnings.warn(f"N |g|^2 = {g2 * n:.3g} exceeds {REGIME_LIMIT}; first-order spectrum is unreliable")
    p_plus = g2 * jpjm
    p_minus = g2 * jmjp
    return Spectrum(np.array([-1.0, 0.0, 1.0]), np.array([p_minus, 1.0 - p_plus - p_minus, p_plus]))


def uncorrected_gain_loss(mean_energy, n_qubits, g_mag):
    """Uncorrected gain/loss pair, kept as a regression reference.

    ``P+ = g^2 (2E + N/2)``, ``P- = -g^2 (2E - N/2)``. It yields ``P+ < 0``
    for an all-ground ensemble, which is why :func:`perturbative_spectrum`
    does not use it.
    """
    g2 = g_mag * g_mag
    return g2 * (2.0 * mean_energy + 0.5 * n_qubits), -g2 * (2.0 * mean_energy - 0.5 * n_qubits)


@dataclass(frozen=True, eq=False)
class DickeDecay:
    tau: np.ndarray
    populations: np.ndarray
    energy: np.ndarray
    intensity: np.ndarray
    emitted: np.ndarray

    def peak(self):
        """``(tau*, I_peak)`` of the sampled intensity."""
        k = int(np.argmax(self.intensity))
        return float(self.tau[k]), float(self.intensity[k])

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["tau", "E_mean", "intensity"])
        for row in zip(self.tau, self.energy, self.intensity):
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()


def dicke_decay(ens: DickeEnsemble, tau_grid, hmax=None, backend=None):
    """Integrate the symmetric cascade with RK4 and sample on ``tau_grid``.

    The step never exceeds ``0.01 / (gamma N^2)``. Energy and intensity are
    in units of ``hbar w0`` (and ``hbar w0`` per unit time).

    Raises
    ------
    ConvergenceError
        If populations go negative or probability drifts; a smaller
        ``hmax`` is suggested.
    """
    tau = require_increasing(tau_grid)
    n = ens.n_qubits
    rates = ens.rates()
    limit = STEP_FACTOR / (max(ens.gamma_single, 1e-300) * n * n)
    h = limit if hmax is None else min(float(hmax), limit)
    if not h > 0:
        raise ValidationError("hmax must be > 0")
    pops, emitted = dicke_rk4(ens.populations, rates, tau, h, backend=backend)
    drift = np.max(np.abs(pops.sum(axis=1) - 1.0))
    if pops.min() < -1e-12 or drift > 1e-10:
        raise ConvergenceError(
            f"cascade integration unstable (min p = {pops.min():.2e}, drift = {drift:.2e}); "
            f"retry with hmax <= {h / 10:.3e}"
        )
    pops = np.clip(pops, 0.0, None)
    energy = pops @ ens.m_values
    intensity = pops @ rates
    return DickeDecay(tau, pops, energy, intensity, emitted)


def gain_scan(ens: DickeEnsemble, tau_grid, g: CouplingConstant, backend=None):
    """Noiseless probe-electron mean gain ``<E_gain>(tau)`` after cascade decay."""
    dec = dicke_decay(ens, tau_grid, backend=backend)
    vals = []
    for p in dec.populations:
        snap = DickeEnsemble(ens.n_qubits, p / p.sum(), ens.gamma_single)
        vals.append(perturbative_spectrum(snap, g).mean_label())
    return ScanSeries(dec.tau, np.array(vals), None, "average_gain")


def reconstruct_emission(scan: ScanSeries, g: CouplingConstant):
    """Emission intensity ``-dE/dtau`` from a mean-gain scan.

    Uses ``<E_gain> = 2 |g|^2 <E_qubits>`` and second-order finite differences.
    """
    if g.magnitude == 0:
        raise ValidationError("coupling must be non-zero to invert the gain")
    if len(scan) < 3:
        raise ValidationError("need at least 3 scan points")
    energy = scan.value / (2.0 * g.magnitude**2)
    return -np.gradient(energy, scan.tau, edge_order=2)
