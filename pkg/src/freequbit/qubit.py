"""Qubit density matrices, control pulses and T1/T2 free evolution.

Basis ordering is ``(|g>, |e>)``. A state is stored as the excited
population ``p`` and the coherence ``q = rho_ge = <g|rho|e>``; for the pure
state ``a|g> + exp(i phi) b|e>`` this is ``q = a b exp(-i phi)``.
"""

import cmath
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

POSITIVITY_TOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=complex)


@dataclass(frozen=True)
class QubitDensityMatrix:
    p_excited: float
    coherence: complex = 0j

    def __post_init__(self):
        p = float(self.p_excited)
        q = complex(self.coherence)
        if not -POSITIVITY_TOL <= p <= 1.0 + POSITIVITY_TOL:
            raise ValidationError(f"p_excited must lie in [0, 1], got {p}")
        p = min(max(p, 0.0), 1.0)
        if abs(q) ** 2 > p * (1.0 - p) + POSITIVITY_TOL:
            raise ValidationError("density matrix is not positive: |q|^2 > p (1 - p)")
        object.__setattr__(self, "p_excited", p)
        object.__setattr__(self, "coherence", q)

    @classmethod
    def from_matrix(cls, rho):
        rho = np.asarray(rho, dtype=complex)
        return cls(float(rho[1, 1].real), complex(rho[0, 1]))

    @classmethod
    def ground(cls):
        return cls(0.0, 0j)

    @classmethod
    def excited(cls):
        return cls(1.0, 0j)

    def matrix(self):
        p, q = self.p_excited, self.coherence
        return np.array([[1.0 - p, q], [q.conjugate(), p]], dtype=complex)

    def purity(self):
        p, q = self.p_excited, self.coherence
        return (1.0 - p) ** 2 + p * p + 2.0 * abs(q) ** 2

    def bloch_vector(self):
        q = self.coherence
        return np.array([2.0 * q.real, 2.0 * q.imag, 2.0 * self.p_excited - 1.0])

    def pure_components(self):
        """Eigen-decomposition into at most two ``(weight, (amp_g, amp_e))`` pairs."""
        w, v = np.linalg.eigh(self.matrix())
        out = []
        for k in range(2)[::-1]:
            if w[k] > 1e-15:
                out.append((float(w[k]), v[:, k].copy()))
        return out

    def to_dict(self):
        return {
            "p_excited": self.p_excited,
            "q_re": self.coherence.real,
            "q_im": self.coherence.imag,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["p_excited"]), complex(d["q_re"], d["q_im"]))

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class DecayParams:
    """Relaxation (T1) and decoherence (T2) times; ``t2 <= 2 t1`` is enforced."""

    t1: float
    t2: float
    omega0: float = 0.0

    def __post_init__(self):
        if not (self.t1 > 0.0 and self.t2 > 0.0):
            raise ValidationError("t1 and t2 must be > 0")
        if self.t2 > 2.0 * self.t1 * (1.0 + 1e-12):
            raise ValidationError(f"t2 = {self.t2} exceeds 2 t1 = {2 * self.t1}")


def bloch_state(theta_a, phi_a=0.0):
    """Pure state at polar angle ``theta_a`` (``|e>`` at 0) and azimuth ``phi_a``."""
    if not -1e-12 <= theta_a <= math.pi + 1e-12:
        raise ValidationError(f"theta_a must lie in [0, pi], got {theta_a}")
    ce = math.cos(theta_a / 2.0)
    sg = math.sin(theta_a / 2.0)
    return QubitDensityMatrix(ce * ce, cmath.exp(-1j * phi_a) * ce * sg)


def evolve(rho, tau, decay, rotating_frame=True):
    """Free evolution for a delay ``tau`` with exponential T1/T2 decay to ``|g>``."""
    if tau < 0:
        raise ValidationError("tau must be >= 0")
    p = rho.p_excited * math.exp(-tau / decay.t1)
    q = rho.coherence * math.exp(-tau / decay.t2)
    if not rotating_frame:
        q *= cmath.exp(1j * decay.omega0 * tau)
    return QubitDensityMatrix(p, q)


def rotation_matrix(axis, angle):
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,) or abs(np.linalg.norm(axis) - 1.0) > 1e-9:
        raise ValidationError("rotation axis must be a unit 3-vector")
    ns = axis[0] * SIGMA_X + axis[1] * SIGMA_Y + axis[2] * SIGMA_Z
    return math.cos(angle / 2.0) * np.eye(2) - 1j * math.sin(angle / 2.0) * ns


def apply_rotation(rho, axis, angle):
    """Conjugate ``rho`` by ``exp(-i angle/2 axis . sigma)``."""
    r = rotation_matrix(axis, angle)
    return QubitDensityMatrix.from_matrix(r @ rho.matrix() @ r.conj().T)
