"""Physical constants and unit conversions.

Internally every rate and frequency is an angular frequency in rad/ns and
every time is in ns.  These are the only definitions of h and hbar used in
the package.
"""

import math

#: Reduced Planck constant in meV*ns (CODATA 2018).
HBAR_MEV_NS = 6.582119569e-4

#: Planck constant in meV*s (CODATA 2018).
H_MEV_S = 4.135667696e-12

TWO_PI = 2.0 * math.pi


def ghz_to_rad_ns(f_ghz):
    """Convert an ordinary frequency f = x/2pi in GHz to rad/ns."""
    return TWO_PI * f_ghz


def rad_ns_to_ghz(omega):
    return omega / TWO_PI


def mev_to_rad_ns(energy_mev):
    """Convert an energy in meV to an angular frequency in rad/ns."""
    return energy_mev / HBAR_MEV_NS


def rad_ns_to_mev(omega):
    return omega * HBAR_MEV_NS
