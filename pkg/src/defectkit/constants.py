"""Physical constants (CODATA via scipy) in the unit system used internally.

Lengths are in Angstrom, energies in eV, charges in units of e.
"""

import math

from scipy import constants as _sc

#: Coulomb constant e^2 / (4 pi eps0) in eV*Angstrom (~14.399645).
COULOMB_EV_ANGSTROM = _sc.e / (4.0 * math.pi * _sc.epsilon_0) * 1e10

#: hbar^2 / (2 m_e) in eV*Angstrom^2 (~3.80998).
HBAR2_OVER_2M = _sc.hbar**2 / (2.0 * _sc.m_e) / _sc.e * 1e20

#: h*c in eV*nm (~1239.84).
HC_EV_NM = _sc.h * _sc.c / _sc.e * 1e9

#: One Debye in e*Angstrom.
DEBYE_IN_E_ANGSTROM = 1e-21 / _sc.c / _sc.e * 1e10

#: Free-electron |gamma_e| = g_e mu_B / hbar in rad s^-1 T^-1.
GAMMA_ELECTRON = abs(_sc.physical_constants["electron gyromag. ratio"][0])

MU0_OVER_4PI = _sc.mu_0 / (4.0 * math.pi)
HBAR = _sc.hbar
PLANCK = _sc.h
EPSILON0 = _sc.epsilon_0
SPEED_OF_LIGHT = _sc.c
ELEMENTARY_CHARGE = _sc.e
