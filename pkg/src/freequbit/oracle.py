"""Brute-force reference for the scattering operator.

:func:`exact_coupling` integrates the time-ordered qubit propagator in the
interaction picture along the straight electron trajectory using the
relativistic field of a uniformly moving charge, and reads the effective
``(G, K)`` of ``U = exp(-i (G s+ + G* s- + K s_z))`` off the result. It never
touches the Bessel-function closed form.

:func:`exact_multiqubit_scattering` applies ``prod_i S_i`` to several qubits
and a shaped electron by dense matrix exponentials on the truncated ladder.

Time is measured in units of ``r_perp / v`` throughout.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.linalg import expm

from . import units
from .coupling import CouplingConstant, PhysicalParams, coupling_g
from .electron import ElectronLadderState
from .errors import AccuracyError, ValidationError
from .kernels import ordered_product, rk4_propagate
from .qubit import QubitDensityMatrix
from .scattering import Spectrum, guarded

MAX_QUBITS = 6


@dataclass(frozen=True)
class TrajectoryGrid:
    """Integration window ``[-z_extent, z_extent]`` (units of r_perp) and node count."""

    z_extent: float = 50.0
    steps: int = 20001
    scheme: str = "ordered-product"
    tail_correction: bool = True

    def __post_init__(self):
        if self.steps < 1001 or self.steps % 2 == 0:
            raise ValidationError("steps must be odd and >= 1001")
        if self.z_extent < 20:
            raise ValidationError("z_extent must be >= 20")
        if self.scheme not in ("ordered-product", "midpoint", "rk4"):
            raise ValidationError(f"unknown scheme {self.scheme!r}")

    def refined(self):
        return TrajectoryGrid(self.z_extent, 2 * (self.steps - 1) + 1, self.scheme, self.tail_correction)


@dataclass(frozen=True)
class ExactCoupling:
    G: complex
    K: float
    refinement_change: float = float("nan")

    def as_coupling(self):
        return CouplingConstant.from_complex(self.G, kappa=self.K)


def _field_factors(p: PhysicalParams, relativistic):
    """Return (lam_x, lam_z, gamma_f, u0) for the dimensionless drive."""
    v = p.velocity
    base = units.E_CHARGE / (4.0 * math.pi * units.EPS0 * units.HBAR * v * p.impact_parameter)
    lam_x = base * p.dipole_x * units.DEBYE
    lam_z = base * p.dipole_z * units.DEBYE
    gam = p.lorentz_gamma if relativistic else 1.0
    u0 = p.omega0 * p.impact_parameter / v
    return lam_x, lam_z, gam, u0


def _drive(s, lam_x, lam_z, gam):
    """``d . E / hbar`` in units of ``v / r_perp`` at dimensionless time ``s``."""
    return gam * (lam_x + lam_z * s) / (1.0 + (gam * s) ** 2) ** 1.5


def _su2(w):
    a = abs(w)
    sc = math.sin(a) / a if a > 0 else 1.0
    return np.array([[math.cos(a), -1j * sc * np.conj(w)], [-1j * sc * w, math.cos(a)]])


def _tails(lam_x, lam_z, gam, u0, z):
    """First-order contributions of ``|s| > z`` (right, left)."""
    even = lambda x: gam * lam_x / (1.0 + (gam * x) ** 2) ** 1.5
    odd = lambda x: gam * lam_z * x / (1.0 + (gam * x) ** 2) ** 1.5
    vals = {}
    for name, fn in (("e", even), ("o", odd)):
        for wt in ("cos", "sin"):
            if (name == "e" and lam_x == 0.0) or (name == "o" and lam_z == 0.0):
                vals[name + wt] = 0.0
            else:
                vals[name + wt] = quad(fn, z, np.inf, weight=wt, wvar=u0, limlst=200)[0]
    right = vals["ecos"] + vals["ocos"] + 1j * (vals["esin"] + vals["osin"])
    left = vals["ecos"] - vals["ocos"] - 1j * (vals["esin"] - vals["osin"])
    return right, left


def _extract(u):
    cos_l = 0.5 * (u[0, 0] + u[1, 1]).real
    gs = 0.5 * (1j * u[1, 0] - 1j * np.conj(u[0, 1]))
    ks = 0.5 * (u[0, 0] - u[1, 1]).imag
    sin_l = math.sqrt(abs(gs) ** 2 + ks * ks)
    lam = math.atan2(sin_l, cos_l)
    fac = lam / sin_l if sin_l > 0 else 1.0
    return complex(gs * fac), float(ks * fac)


def propagator(p: PhysicalParams, grid: TrajectoryGrid = TrajectoryGrid(), time_shift=0.0, relativistic=True, backend=None):
    """Interaction-picture qubit propagator for one electron passage (basis g, e)."""
    lam_x, lam_z, gam, u0 = _field_factors(p, relativistic)
    z = grid.z_extent
    nodes = np.linspace(-z, z, grid.steps) + time_shift
    h = nodes[1] - nodes[0]
    mids = 0.5 * (nodes[1:] + nodes[:-1])
    if grid.scheme == "ordered-product":
        # fourth-order Magnus step: two Gauss points plus the commutator term
        d = h / (2.0 * math.sqrt(3.0))
        sa, sb = mids - d, mids + d
        fa = _drive(sa - time_shift, lam_x, lam_z, gam) * np.exp(1j * u0 * sa)
        fb = _drive(sb - time_shift, lam_x, lam_z, gam) * np.exp(1j * u0 * sb)
        w = 0.5 * h * (fa + fb)
        kz = (math.sqrt(3.0) / 6.0) * h * h * np.imag(fb * np.conj(fa))
        u = ordered_product(w, kz, backend=backend)
    elif grid.scheme == "midpoint":
        w = h * _drive(mids - time_shift, lam_x, lam_z, gam) * np.exp(1j * u0 * mids)
        u = ordered_product(w, backend=backend)
    else:
        f_nodes = _drive(nodes - time_shift, lam_x, lam_z, gam) * np.exp(1j * u0 * nodes)
        f_mid = _drive(mids - time_shift, lam_x, lam_z, gam) * np.exp(1j * u0 * mids)
        u = rk4_propagate(f_nodes, f_mid, h, backend=backend)
    if grid.tail_correction:
        right, left = _tails(lam_x, lam_z, gam, u0, z)
        phase = np.exp(1j * u0 * time_shift)
        u = _su2(right * phase) @ u @ _su2(left * phase)
    return u


def exact_coupling(p: PhysicalParams, grid: TrajectoryGrid = TrajectoryGrid(), check_refinement=True, rtol=1e-8, time_shift=0.0, relativistic=True, backend=None):
    """Numerically exact ``(G, K)`` for one electron passage.

    With ``check_refinement`` the integration is repeated on a grid with
    twice the resolution; a relative change of ``G`` above ``rtol`` raises
    :class:`AccuracyError`. The refined result is returned.
    """
    kw = dict(time_shift=time_shift, relativistic=relativistic, backend=backend)
    g1, k1 = _extract(propagator(p, grid, **kw))
    if not check_refinement:
        return ExactCoupling(g1, k1)
    g2, k2 = _extract(propagator(p, grid.refined(), **kw))
    scale = abs(g2)
    change = abs(g2 - g1) / scale if scale > 0 else abs(g2 - g1)
    if change > rtol:
        raise AccuracyError(f"grid refinement changed G by {change:.3e} (> {rtol:.1e})")
    return ExactCoupling(g2, k2, change)


def random_params(rng, max_g=0.1):
    """Draw a plausible geometry with ``|g| <= max_g`` (rejection sampling)."""
    while True:
        p = PhysicalParams.from_lab_units(
            (rng.uniform(0, 300), 0.0, rng.uniform(0, 300)),
            rng.uniform(0.5, 4.0),
            rng.uniform(2.0, 15.0),
            rng.uniform(0.02, 0.4),
        )
        if 0 < coupling_g(p).magnitude <= max_g:
            return p


# --------------------------------------------------------------------------
# multi-qubit product scattering
# --------------------------------------------------------------------------


def _generator(n_slots, g: CouplingConstant):
    """Dense ``g b s+ + g* b+ s- + kappa s_z`` on index ``2 j + s`` (s=0: g, 1: e)."""
    dim = 2 * n_slots
    x = np.zeros((dim, dim), dtype=complex)
    gv = g.value
    for j in range(n_slots - 1):
        x[2 * j + 1, 2 * (j + 1)] = gv
        x[2 * (j + 1), 2 * j + 1] = np.conj(gv)
    for j in range(n_slots):
        x[2 * j, 2 * j] = -g.kappa
        x[2 * j + 1, 2 * j + 1] = g.kappa
    return x


def _joint_qubit_matrix(states):
    if isinstance(states, np.ndarray):
        rho = np.asarray(states, dtype=complex)
        n = int(round(math.log2(rho.shape[0])))
        if rho.shape != (2**n, 2**n):
            raise ValidationError("qubit density matrix must be 2^N x 2^N")
        return rho, n
    rho = np.ones((1, 1), dtype=complex)
    for st in states:
        if not isinstance(st, QubitDensityMatrix):
            raise ValidationError("states must be QubitDensityMatrix instances")
        rho = np.kron(rho, st.matrix())
    return rho, len(states)


def exact_multiqubit_scattering(states, e: ElectronLadderState, g: CouplingConstant, guard=None):
    """Electron spectrum after passing ``N <= 6`` co-located qubits.

    ``states`` is either a list of single-qubit density matrices (product
    state, qubit 0 most significant) or a full ``2^N x 2^N`` matrix in the
    same ordering with single-qubit basis ``(g, e)``.
    """
    rho, n = _joint_qubit_matrix(states)
    if n < 1 or n > MAX_QUBITS:
        raise ValidationError(f"number of qubits must be in [1, {MAX_QUBITS}], got {n}")
    if guard is None:
        guard = n
    if guard < n:
        raise ValidationError(f"guard {guard} < number of qubits {n}")
    e = guarded(e, guard)
    slots = e.amplitudes.size
    s_block = expm(-1j * _generator(slots, g))
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    pops = np.zeros(slots)
    for k in range(w.size):
        if w[k] <= 1e-15:
            continue
        psi = np.einsum("j,q->jq", e.amplitudes, v[:, k]).reshape((slots,) + (2,) * n)
        for i in range(n):
            psi = np.moveaxis(psi, 1 + i, 1)
            shp = psi.shape
            psi = (s_block @ psi.reshape(2 * slots, -1)).reshape(shp)
            psi = np.moveaxis(psi, 1, 1 + i)
        pops += w[k] * np.sum(np.abs(psi.reshape(slots, -1)) ** 2, axis=1)
    return Spectrum(e.labels, pops, 1.0 - float(pops.sum()))
