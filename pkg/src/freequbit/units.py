"""SI constants and boundary unit conversions.

Everything inside the package is SI. Inputs in eV, Debye, nm or keV are
converted once at the API boundary with the helpers below.
"""

import math

from scipy import constants as _c

E_CHARGE = _c.e
HBAR = _c.hbar
EPS0 = _c.epsilon_0
C_LIGHT = _c.c
M_ELECTRON = _c.m_e
#: 1 D = 1e-21 / c  C m  (= 3.33564e-30 C m)
DEBYE = 1e-21 / _c.c
NM = 1e-9
EV = _c.e


def ev_to_omega(energy_ev):
    """Transition energy in eV -> angular frequency in rad/s."""
    return energy_ev * EV / HBAR


def omega_to_ev(omega):
    return omega * HBAR / EV


def debye_to_si(d):
    return d * DEBYE


def lorentz_gamma(beta):
    return 1.0 / math.sqrt(1.0 - beta * beta)


def beta_from_kinetic_energy(kev):
    """Electron v/c for a given kinetic energy (acceleration voltage) in keV."""
    rest_kev = M_ELECTRON * C_LIGHT**2 / EV / 1e3
    gam = 1.0 + kev / rest_kev
    return math.sqrt(1.0 - 1.0 / (gam * gam))


def kinetic_energy_from_beta(beta):
    rest_kev = M_ELECTRON * C_LIGHT**2 / EV / 1e3
    return (lorentz_gamma(beta) - 1.0) * rest_kev
