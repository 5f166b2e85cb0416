"""Electron-qubit coupling constant and velocity optimisation.

The first-order (Magnus) coupling of a point electron passing a dipole at
impact parameter ``r_perp`` with velocity ``v = beta c`` is

    g = e w0 / (2 pi eps0 gamma hbar v^2) * (d_x K1(u) + i d_z K0(u) / gamma),
    u = w0 r_perp / (v gamma).
"""

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import units
from .errors import ValidationError
from .special import bessel_k


@dataclass(frozen=True)
class PhysicalParams:
    """Qubit and electron-trajectory parameters (SI, dipole in Debye).

    ``dipole_y`` is accepted but does not couple: the electron field at the
    qubit has no y component for a trajectory in the y = 0 plane.
    """

    dipole_x: float
    dipole_y: float
    dipole_z: float
    omega0: float
    impact_parameter: float
    beta: float

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValidationError(f"beta must lie in (0, 1), got {self.beta}")
        if not self.impact_parameter > 0.0:
            raise ValidationError("impact_parameter must be > 0")
        if not self.omega0 > 0.0:
            raise ValidationError("omega0 must be > 0")
        for name in ("dipole_x", "dipole_y", "dipole_z"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")
        if self.dipole_y != 0.0:
            warnings.warn(
                "dipole_y is ignored: the trajectory field has no y component",
                stacklevel=3,
            )

    @classmethod
    def from_lab_units(cls, dipole_debye, gap_ev, r_perp_nm, beta):
        """Build from (d_x, d_y, d_z) in Debye, gap in eV and r_perp in nm."""
        dx, dy, dz = dipole_debye
        return cls(
            dipole_x=float(dx),
            dipole_y=float(dy),
            dipole_z=float(dz),
            omega0=units.ev_to_omega(gap_ev),
            impact_parameter=r_perp_nm * units.NM,
            beta=float(beta),
        )

    @property
    def lorentz_gamma(self):
        return units.lorentz_gamma(self.beta)

    @property
    def velocity(self):
        return self.beta * units.C_LIGHT

    @property
    def dipole_magnitude_si(self):
        return units.DEBYE * math.sqrt(self.dipole_x**2 + self.dipole_y**2 + self.dipole_z**2)

    @property
    def bessel_argument(self):
        """``u = w0 r_perp / (v gamma)``."""
        return self.omega0 * self.impact_parameter / (self.velocity * self.lorentz_gamma)

    def replace(self, **changes):
        vals = dict(
            dipole_x=self.dipole_x,
            dipole_y=self.dipole_y,
            dipole_z=self.dipole_z,
            omega0=self.omega0,
            impact_parameter=self.impact_parameter,
            beta=self.beta,
        )
        vals.update(changes)
        return PhysicalParams(**vals)


def _principal(phase):
    phase = math.remainder(phase, 2.0 * math.pi)
    if phase <= -math.pi:
        phase += 2.0 * math.pi
    return phase


@dataclass(frozen=True)
class CouplingConstant:
    """Complex coupling ``g = magnitude * exp(i phase)`` plus diagonal ``kappa``."""

    magnitude: float
    phase: float = 0.0
    kappa: float = 0.0

    def __post_init__(self):
        if not self.magnitude >= 0.0:
            raise ValidationError(f"coupling magnitude must be >= 0, got {self.magnitude}")
        object.__setattr__(self, "phase", _principal(float(self.phase)))

    @classmethod
    def from_complex(cls, g, kappa=0.0):
        g = complex(g)
        if g == 0:
            return cls(0.0, 0.0, kappa)
        return cls(abs(g), cmath.phase(g), kappa)

    @property
    def value(self):
        return cmath.rect(self.magnitude, self.phase)

    def to_dict(self):
        return {"magnitude": self.magnitude, "phase": self.phase, "kappa": self.kappa}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["magnitude"]), float(d.get("phase", 0.0)), float(d.get("kappa", 0.0)))


def coupling_complex(p: PhysicalParams) -> complex:
    gam = p.lorentz_gamma
    v = p.velocity
    u = p.bessel_argument
    pref = units.E_CHARGE * p.omega0 / (2.0 * math.pi * units.EPS0 * gam * units.HBAR * v * v)
    dx = p.dipole_x * units.DEBYE
    dz = p.dipole_z * units.DEBYE
    k0 = bessel_k(0, u) if dz != 0.0 else 0.0
    k1 = bessel_k(1, u) if dx != 0.0 else 0.0
    return pref * (dx * k1 + 1j * dz * k0 / gam)


def coupling_g(p: PhysicalParams) -> CouplingConstant:
    """First-order coupling constant for the given geometry (``kappa = 0``)."""
    return CouplingConstant.from_complex(coupling_complex(p))


@dataclass(frozen=True)
class OptimalVelocity:
    beta: float
    u_star: float
    orientation: str
    warning: str = field(default=None)


def _stationary_x(u):
    # d/du [u^2 K1(u)] = -u (u K0(u) - K1(u))
    return u * bessel_k(0, u) - bessel_k(1, u)


def _stationary_z(u):
    # d/du [u^2 K0(u)] = u (2 K0(u) - u K1(u))
    return 2.0 * bessel_k(0, u) - u * bessel_k(1, u)


def optimal_u(orientation):
    """Root ``u* = w0 r_perp / v_opt`` maximising |g| over velocity."""
    if orientation not in ("x", "z"):
        raise ValidationError("orientation must be 'x' or 'z'")
    fn = _stationary_x if orientation == "x" else _stationary_z
    return brentq(fn, 0.5, 4.0, xtol=1e-12, rtol=1e-14)


def optimal_velocity(orientation, omega0, r_perp) -> OptimalVelocity:
    """Velocity maximising |g| for an x- or z-oriented dipole.

    Uses the nonrelativistic form of the coupling (gamma = 1), where the
    optimum depends only on ``w0 r_perp / v``.
    """
    if not omega0 > 0.0 or not r_perp > 0.0:
        raise ValidationError("omega0 and r_perp must be > 0")
    u = optimal_u(orientation)
    beta = omega0 * r_perp / u / units.C_LIGHT
    note = None
    if beta >= 0.3:
        note = (
            f"optimal beta = {beta:.3f} >= 0.3; the nonrelativistic optimum is "
            "unreliable here"
        )
        warnings.warn(note, stacklevel=2)
    return OptimalVelocity(beta=beta, u_star=u, orientation=orientation, warning=note)


def coupling_scale(p: PhysicalParams) -> float:
    """Dimensionless interaction scale ``e |d| / (4 pi hbar v eps0 r_perp)``."""
    return (
        units.E_CHARGE
        * p.dipole_magnitude_si
        / (4.0 * math.pi * units.HBAR * p.velocity * units.EPS0 * p.impact_parameter)
    )


def magnus_order_estimate(n: int, p: PhysicalParams) -> float:
    """Order-of-magnitude size of the n-th Magnus term, ``scale**n / n!``."""
    if n < 1:
        raise ValidationError("Magnus order must be >= 1")
    return coupling_scale(p) ** n / math.factorial(n)


def coupling_vs_impact_parameter(p: PhysicalParams, r_perp_grid):
    """|g| evaluated on a grid of impact parameters (metres)."""
    return np.array([coupling_g(p.replace(impact_parameter=float(r))).magnitude for r in r_perp_grid])
