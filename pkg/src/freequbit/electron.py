"""Shaped free-electron states on the discrete energy-sideband ladder.

A state holds complex amplitudes ``C_n`` for consecutive sidebands
``n = offset ... offset + len - 1`` spaced by the qubit quantum. Duo-energy
states use half-integer labels; they are stored on the same integer ladder
with ``half_integer=True`` meaning ``label = index - 1/2``.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from . import units
from .errors import TruncationError, ValidationError
from .special import bessel_j_ladder

NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ElectronLadderState:
    offset: int
    amplitudes: np.ndarray
    half_integer: bool = False

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if amps.size == 0:
            raise ValidationError("ladder window must contain at least one sideband")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"state is not normalised (norm = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "offset", int(self.offset))
        object.__setattr__(self, "half_integer", bool(self.half_integer))

    @classmethod
    def normalized(cls, offset, amplitudes, half_integer=False):
        amps = np.asarray(amplitudes, dtype=complex)
        return cls(offset, amps / np.linalg.norm(amps), half_integer)

    @property
    def n_min(self):
        return self.offset

    @property
    def n_max(self):
        return self.offset + self.amplitudes.size - 1

    @property
    def indices(self):
        return np.arange(self.n_min, self.n_max + 1)

    @property
    def labels(self):
        """Sideband labels (half-integers for duo states)."""
        idx = self.indices.astype(float)
        return idx - 0.5 if self.half_integer else idx

    @property
    def norm(self):
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def populations(self):
        return np.abs(self.amplitudes) ** 2

    def mean_label(self):
        return float(np.dot(self.labels, self.populations()))

    def padded(self, left, right):
        """Same state on a window widened by ``left``/``right`` empty slots."""
        amps = np.concatenate([np.zeros(left, complex), self.amplitudes, np.zeros(right, complex)])
        return ElectronLadderState(self.offset - left, amps, self.half_integer)

    def __eq__(self, other):
        if not isinstance(other, ElectronLadderState):
            return NotImplemented
        return (
            self.offset == other.offset
            and self.half_integer == other.half_integer
            and np.array_equal(self.amplitudes, other.amplitudes)
        )

    def to_dict(self):
        return {
            "offset": self.offset,
            "half_integer": self.half_integer,
            "amplitudes": [[float(c.real), float(c.imag)] for c in self.amplitudes],
        }

    @classmethod
    def from_dict(cls, d):
        amps = np.array([complex(re, im) for re, im in d["amplitudes"]])
        return cls(int(d["offset"]), amps, bool(d.get("half_integer", False)))

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def make_unshaped():
    """Zero-loss electron, ``C_n = delta_{n,0}``."""
    return ElectronLadderState(0, np.array([1.0 + 0j]))


def make_duo(phi_e):
    """Equal superposition of the -1/2 and +1/2 sidebands with relative phase ``phi_e``."""
    amps = np.array([1.0, np.exp(1j * phi_e)]) / math.sqrt(2.0)
    return ElectronLadderState(0, amps, half_integer=True)


def pinem_window(g_pinem_mag):
    """Smallest half-width that safely holds a PINEM comb."""
    return int(math.ceil(2.0 * (2.0 * g_pinem_mag) + 20))


def make_pinem(g_pinem_mag, phi=0.0, window=None, tol=1e-10):
    """PINEM comb ``C_n = exp(i phi n) J_n(2|g_P|)`` for ``|n| <= window``.

    Raises
    ------
    TruncationError
        If the probability outside the window exceeds ``tol``.
    """
    if g_pinem_mag < 0:
        raise ValidationError("PINEM coupling magnitude must be >= 0")
    if window is None:
        window = pinem_window(g_pinem_mag)
    window = int(window)
    if window < 0:
        raise ValidationError("window must be >= 0")
    jpos = bessel_j_ladder(window, 2.0 * g_pinem_mag)
    n = np.arange(-window, window + 1)
    jn = np.where(n < 0, jpos[np.abs(n)] * np.where(np.abs(n) % 2, -1.0, 1.0), jpos[np.abs(n)])
    amps = np.exp(1j * phi * n) * jn
    deficit = 1.0 - float(np.sum(jn**2))
    if deficit > tol:
        raise TruncationError(
            f"PINEM window {window} loses {deficit:.3e} probability; "
            f"use window >= {pinem_window(g_pinem_mag)}"
        )
    return ElectronLadderState(-window, amps / np.linalg.norm(amps))


def disperse(state, chi):
    """Free-space dispersion: ``C_n -> C_n exp(i chi n^2)`` with ``n`` the label."""
    lab = state.labels
    amps = state.amplitudes * np.exp(1j * chi * lab * lab)
    return ElectronLadderState(state.offset, amps, state.half_integer)


def dispersion_chi(length, beta, omega0):
    """Quadratic sideband phase accumulated over a drift ``length`` (metres).

    Second-order expansion of the relativistic momentum in energy,
    ``d^2p/dE^2 = -1 / (m gamma^3 v^3)``, gives
    ``chi = -hbar w0^2 L / (2 m gamma^3 v^3)``.
    """
    gam = units.lorentz_gamma(beta)
    v = beta * units.C_LIGHT
    return -units.HBAR * omega0**2 * length / (2.0 * units.M_ELECTRON * gam**3 * v**3)


def ladder_moment(state, l=1):
    """``<b^l> = sum_n conj(C_n) C_{n+l}``; ``b`` lowers the electron energy."""
    l = int(l)
    if l < 0:
        raise ValidationError("moment order must be >= 0")
    c = state.amplitudes
    if l >= c.size:
        return 0j
    if l == 0:
        return complex(np.vdot(c, c))
    return complex(np.vdot(c[:-l], c[l:]))
