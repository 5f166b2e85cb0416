"""Electron-qubit scattering on the truncated sideband ladder and EELS spectra.

The scattering operator is

    S = exp(-i (g b s+ + g* b+ s- + kappa s_z))

where ``b`` lowers the electron energy by one quantum and ``s+`` excites
the qubit. On each invariant pair ``{|n+1, g>, |n, e>}`` the generator
squares to ``(|g|^2 + kappa^2)``, which gives the exact closed form used in
:func:`scatter_pure`. With ``kappa = 0`` it reduces to
``cos|g| - i sin|g| (e^{i phi_g} b s+ + e^{-i phi_g} b+ s-)``.
"""

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .coupling import CouplingConstant
from .electron import ElectronLadderState, ladder_moment
from .errors import AmbiguousPeaksError, TruncationError, ValidationError
from .qubit import QubitDensityMatrix

SUPPORT_THRESHOLD = 1e-16
CLIP_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Electron energy-loss spectrum: probability per sideband label."""

    labels: np.ndarray
    probabilities: np.ndarray
    leak: float = 0.0

    def __post_init__(self):
        lab = np.asarray(self.labels, dtype=float).ravel()
        pr = np.asarray(self.probabilities, dtype=float).ravel()
        if lab.shape != pr.shape:
            raise ValidationError("labels and probabilities differ in length")
        if np.any(pr < -CLIP_TOL):
            raise ValidationError(f"negative probability {pr.min():.3e} in spectrum")
        pr = np.clip(pr, 0.0, None)
        object.__setattr__(self, "labels", lab)
        object.__setattr__(self, "probabilities", pr)
        object.__setattr__(self, "leak", max(0.0, float(self.leak)))

    def __len__(self):
        return self.labels.size

    def __eq__(self, other):
        if not isinstance(other, Spectrum):
            return NotImplemented
        return (
            np.array_equal(self.labels, other.labels)
            and np.array_equal(self.probabilities, other.probabilities)
            and self.leak == other.leak
        )

    @property
    def total(self):
        return float(self.probabilities.sum())

    def as_dict(self):
        return {float(l): float(p) for l, p in zip(self.labels, self.probabilities)}

    def prob(self, label):
        hit = np.nonzero(np.abs(self.labels - label) < 1e-9)[0]
        return float(self.probabilities[hit[0]]) if hit.size else 0.0

    def mean_label(self):
        return float(np.dot(self.labels, self.probabilities))

    def trimmed(self):
        """Drop exactly-empty sidebands (guard slots)."""
        keep = self.probabilities > 0.0
        return Spectrum(self.labels[keep], self.probabilities[keep], self.leak)

    def broadened(self, sigma, grid):
        """Gaussian display broadening; ``sigma`` and ``grid`` in label units."""
        grid = np.asarray(grid, dtype=float)
        if sigma <= 0:
            raise ValidationError("broadening width must be > 0")
        z = (grid[:, None] - self.labels[None, :]) / sigma
        kern = np.exp(-0.5 * z * z) / (sigma * math.sqrt(2.0 * math.pi))
        return kern @ self.probabilities

    def to_dict(self):
        return {
            "labels": self.labels.tolist(),
            "probabilities": self.probabilities.tolist(),
            "leak": self.leak,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["labels"], float), np.array(d["probabilities"], float), d.get("leak", 0.0))

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "probability"])
        for l, p in zip(self.labels, self.probabilities):
            w.writerow([_fmt_label(l), repr(float(p))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.reader(io.StringIO(text)))[1:]
        lab = np.array([float(r[0]) for r in rows])
        pr = np.array([float(r[1]) for r in rows])
        return cls(lab, pr, max(0.0, 1.0 - float(pr.sum())))


def _fmt_label(l):
    return str(int(l)) if float(l).is_integer() else repr(float(l))


@dataclass(frozen=True, eq=False)
class JointState:
    """Post-interaction joint state as a mixture of pure block states.

    ``blocks[k, j, 0]`` and ``blocks[k, j, 1]`` are the ``|g>`` and ``|e>``
    amplitudes of sideband index ``offset + j`` in pure component ``k``,
    mixed with ``weights[k]``.
    """

    offset: int
    half_integer: bool
    weights: np.ndarray
    blocks: np.ndarray

    @property
    def labels(self):
        idx = np.arange(self.blocks.shape[1]) + self.offset
        return idx - 0.5 if self.half_integer else idx.astype(float)

    def trace(self):
        return float(np.sum(self.weights * np.sum(np.abs(self.blocks) ** 2, axis=(1, 2))))

    def electron_populations(self):
        return np.einsum("k,kjs->j", self.weights, np.abs(self.blocks) ** 2)

    def qubit_matrix(self):
        """Reduced qubit density matrix."""
        return np.einsum("k,kjs,kjt->st", self.weights, self.blocks, self.blocks.conj())

    def spectrum(self):
        pops = self.electron_populations()
        return Spectrum(self.labels, pops, 1.0 - float(pops.sum()))


def _support(amps):
    pop = np.abs(amps) ** 2
    nz = np.nonzero(pop > SUPPORT_THRESHOLD)[0]
    if nz.size == 0:
        return 0, amps.size - 1
    return int(nz[0]), int(nz[-1])


def guarded(state, guard=1, pad=True):
    """Return ``state`` on a window with at least ``guard`` empty slots per side."""
    lo, hi = _support(state.amplitudes)
    have_left = lo
    have_right = state.amplitudes.size - 1 - hi
    need_left = max(0, guard - have_left)
    need_right = max(0, guard - have_right)
    if need_left or need_right:
        if not pad:
            raise TruncationError(
                f"ladder window needs {guard} guard slot(s) per side; "
                f"has {have_left} left and {have_right} right"
            )
        return state.padded(need_left, need_right)
    return state


def _shift_down(c):
    """``out[n] = c[n-1]`` with zero fill."""
    out = np.zeros_like(c)
    out[1:] = c[:-1]
    return out


def _shift_up(c):
    """``out[n] = c[n+1]`` with zero fill."""
    out = np.zeros_like(c)
    out[:-1] = c[1:]
    return out


def scatter_pure(amps, amp_g, amp_e, g: CouplingConstant):
    """Apply ``S`` to ``sum_n C_n |n> (amp_g |g> + amp_e |e>)``.

    Returns ``(out_g, out_e)`` on the same window; the caller guarantees the
    edge slots are empty.
    """
    gv = g.value
    lam = math.hypot(g.magnitude, g.kappa)
    cl = math.cos(lam)
    sinc = math.sin(lam) / lam if lam > 0 else 1.0
    diag_g = cl + 1j * g.kappa * sinc
    diag_e = cl - 1j * g.kappa * sinc
    out_g = diag_g * amp_g * amps - 1j * sinc * gv.conjugate() * amp_e * _shift_down(amps)
    out_e = diag_e * amp_e * amps - 1j * sinc * gv * amp_g * _shift_up(amps)
    return out_g, out_e


def apply_scattering(e: ElectronLadderState, rho: QubitDensityMatrix, g: CouplingConstant, guard=1, pad=True):
    """Exact ``S (rho_e x rho) S^dagger`` as a :class:`JointState`."""
    e = guarded(e, guard, pad)
    comps = rho.pure_components()
    weights = np.array([w for w, _ in comps])
    blocks = np.empty((len(comps), e.amplitudes.size, 2), dtype=complex)
    for k, (_, vec) in enumerate(comps):
        og, oe = scatter_pure(e.amplitudes, vec[0], vec[1], g)
        blocks[k, :, 0] = og
        blocks[k, :, 1] = oe
    return JointState(e.offset, e.half_integer, weights, blocks)


def _closed_form_populations(c, rho, g):
    cg, sg = math.cos(g.magnitude), math.sin(g.magnitude)
    p, q = rho.p_excited, rho.coherence
    eg = np.exp(1j * g.phase)
    cm1 = _shift_down(c)
    cp1 = _shift_up(c)
    interf = 2.0 * np.real(
        1j * cg * sg * (c * cm1.conj() * q * eg + c * cp1.conj() * q.conjugate() * eg.conjugate())
    )
    return (
        np.abs(c) ** 2 * cg**2
        + p * np.abs(cm1) ** 2 * sg**2
        + (1.0 - p) * np.abs(cp1) ** 2 * sg**2
        + interf
    )


def eels_spectrum(e: ElectronLadderState, rho: QubitDensityMatrix, g: CouplingConstant, method="closed", guard=1, pad=True):
    """Post-interaction electron energy spectrum.

    ``method="closed"`` evaluates the analytic sideband formula (``kappa``
    must be 0); ``method="exact"`` traces the qubit out of
    :func:`apply_scattering`.
    """
    if method == "exact" or g.kappa != 0.0:
        return apply_scattering(e, rho, g, guard, pad).spectrum()
    if method != "closed":
        raise ValidationError(f"unknown method {method!r}")
    e = guarded(e, guard, pad)
    pops = _closed_form_populations(e.amplitudes, rho, g)
    return Spectrum(e.labels, pops, 1.0 - float(pops.sum()))


def principal_peaks(s: Spectrum):
    """Labels ``(lower, upper)`` of the two dominant, adjacent peaks."""
    if len(s) < 2:
        raise AmbiguousPeaksError("spectrum has fewer than two sidebands")
    order = np.argsort(s.probabilities, kind="stable")[::-1]
    a, b = s.labels[order[0]], s.labels[order[1]]
    if len(s) > 2 and np.isclose(s.probabilities[order[1]], s.probabilities[order[2]], rtol=0, atol=1e-15):
        raise AmbiguousPeaksError("second and third peaks are degenerate")
    if abs(abs(a - b) - 1.0) > 1e-9:
        raise AmbiguousPeaksError(f"dominant peaks at {a} and {b} are not adjacent sidebands")
    return min(a, b), max(a, b)


def delta_p(s: Spectrum):
    """Gain-minus-loss difference ``P+ - P-`` of the two principal peaks."""
    lo, hi = principal_peaks(s)
    return s.prob(hi) - s.prob(lo)


def gain_loss(s: Spectrum, reference=0.0):
    """``(P_gain, P_loss)`` one quantum above/below ``reference`` (unshaped probes)."""
    return s.prob(reference + 1.0), s.prob(reference - 1.0)


def average_gain(e: ElectronLadderState, rho: QubitDensityMatrix, g: CouplingConstant, method="exact"):
    """Mean energy gain in units of the qubit quantum (final minus initial mean)."""
    s = eels_spectrum(e, rho, g, method=method)
    return s.mean_label() - e.mean_label()


def average_gain_closed(e: ElectronLadderState, rho: QubitDensityMatrix, g: CouplingConstant):
    """Analytic mean gain: ``sin^2|g| (2p - 1) + i cos sin (q e^{i phi} <b> - c.c.)``.

    Returns ``(total, interference)`` in units of the qubit quantum.
    """
    cg, sg = math.cos(g.magnitude), math.sin(g.magnitude)
    x = rho.coherence * complex(math.cos(g.phase), math.sin(g.phase)) * ladder_moment(e, 1)
    interference = float((1j * cg * sg * (x - x.conjugate())).real)
    population = sg * sg * (2.0 * rho.p_excited - 1.0)
    return population + interference, interference
