"""Small-signal electrical model of the diode and cavity spectral properties.

Units: resistance in Ohm, capacitance in pF, frequency in GHz, energies in meV.
"""

import math
from dataclasses import dataclass

import numpy as np

from .analysis import DomainError
from .constants import H_MEV_S
from .fitting import Model, RankDeficiencyError, nlls_fit

_PF = 1e-12
_GHZ = 1e9


@dataclass(frozen=True)
class DiodeModel:
    """Series RC one-port seen from a ``z0`` reference line."""

    r_series: float
    capacitance: float
    z0: float = 50.0

    def __post_init__(self):
        for name in ("r_series", "capacitance", "z0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def tau_rc(self):
        """Charging time ``(r_series + z0) C`` in ns."""
        return (self.r_series + self.z0) * self.capacitance * _PF / 1e-9


@dataclass(frozen=True)
class CavitySpectrum:
    energies: np.ndarray
    intensities: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        y = np.asarray(self.intensities, dtype=float)
        if e.ndim != 1 or e.shape != y.shape:
            raise ValueError("energies and intensities must be 1-D arrays of equal length")
        if np.any(np.diff(e) <= 0):
            raise ValueError("energies must be strictly increasing")
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "intensities", y)


def _check_freq(f):
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0):
        raise DomainError("frequency must be > 0")
    return f


def _z(r, c_pf, f_ghz):
    return r - 1j / (2 * np.pi * f_ghz * _GHZ * c_pf * _PF)


def impedance(m, f):
    """``Z = R - j / (2 pi f C)`` in Ohm at frequency ``f`` (GHz)."""
    z = _z(m.r_series, m.capacitance, _check_freq(f))
    return complex(z) if np.ndim(z) == 0 else z


def s11(m, f):
    """Reflection coefficient ``(Z - z0) / (Z + z0)``."""
    z = impedance(m, f)
    return (z - m.z0) / (z + m.z0)


def invert_s11(s, f, z0=50.0):
    """Exact ``(R, C_pF)`` of a series RC from one complex S11 sample at ``f`` GHz."""
    f = float(_check_freq(f))
    z = z0 * (1 + s) / (1 - s)
    return float(z.real), float(-1.0 / (2 * np.pi * f * _GHZ * z.imag) / _PF)


def s11_from_polar(mag_db, phase_deg):
    return 10 ** (np.asarray(mag_db) / 20.0) * np.exp(1j * np.deg2rad(phase_deg))


def extract_rc(freqs, s_values, z0=50.0):
    """Least-squares ``(R, C)`` from S11 samples; returns the :class:`FitResult`.

    The residual stacks real and imaginary parts of ``S11_model - S11_data``.
    Starting values come from exact single-point inversion averaged over the
    samples.
    """
    f = _check_freq(np.atleast_1d(freqs))
    s = np.asarray(np.atleast_1d(s_values), dtype=complex)
    if f.shape != s.shape:
        raise ValueError("frequencies and S11 values must have equal length")
    if np.unique(f).size < 2:
        raise RankDeficiencyError("need S11 samples at two or more distinct frequencies")
    guesses = np.array([invert_s11(si, fi, z0) for fi, si in zip(f, s)])
    p0 = np.median(guesses, axis=0)
    if not (p0[0] > 0 and p0[1] > 0):
        p0 = np.array([z0, 1.0])

    def stacked(x, r, c_pf):
        z = _z(r, c_pf, x)
        sm = (z - z0) / (z + z0)
        return np.concatenate([sm.real, sm.imag])

    model = Model("s11_series_rc", ("r_series", "capacitance"), stacked)
    # model returns 2n values for n frequencies; pass f as x and stacked data as y
    res = nlls_fit(model, f, np.concatenate([s.real, s.imag]), p0, bounds=([1e-9, 1e-12], [np.inf, np.inf]))
    res.extra["z0"] = float(z0)
    return res


def bandwidth_3db(r_total, c):
    """First-order low-pass corner ``1 / (2 pi R C)`` in GHz (R in Ohm, C in pF)."""
    if not (r_total > 0 and c > 0):
        raise DomainError("R and C must be positive")
    return 1.0 / (2 * math.pi * r_total * c * _PF) / _GHZ


def diode_bandwidth(m):
    """3 dB bandwidth with the source impedance in the charging path."""
    return bandwidth_3db(m.r_series + m.z0, m.capacitance)


def tau_from_bandwidth(f3db_ghz):
    """RC time constant (ns) of a first-order low-pass with the given corner."""
    return 1.0 / (2 * math.pi * f3db_ghz)


def lorentzian_q(spectrum):
    """Fit a Lorentzian plus offset; adds ``q`` and ``kappa_ghz`` to ``extra``.

    A fit without a resolvable peak (non-positive amplitude, centre outside
    the data, or a linewidth not determined by the data) is returned with
    ``converged = False``.
    """
    e, y = spectrum.energies, spectrum.intensities
    if e.size < 5:
        raise ValueError("need at least 5 spectral points")
    k = int(np.argmax(y))
    offset = float(np.min(y))
    amp = float(y[k] - offset)
    above = np.nonzero(y - offset >= 0.5 * amp)[0] if amp > 0 else np.array([k])
    fwhm = max(float(e[above[-1]] - e[above[0]]), float(np.median(np.diff(e))))
    res = nlls_fit("lorentzian", e, y, [amp, float(e[k]), fwhm, offset])
    p = res.params
    p["fwhm"] = abs(p["fwhm"])
    res.extra["q"] = p["center"] / p["fwhm"]
    res.extra["kappa_ghz"] = p["fwhm"] / H_MEV_S / _GHZ
    err = res.stderr("fwhm")
    if not (p["amplitude"] > 0 and e[0] <= p["center"] <= e[-1] and np.isfinite(err) and err < p["fwhm"]):
        res.converged = False
        res.message = "no resolvable peak"
    return res


def q_total(q_rad, q_abs):
    """Loss-channel combination ``Q_rad Q_abs / (Q_rad + Q_abs)``."""
    if not (q_rad > 0 and q_abs > 0):
        raise DomainError("quality factors must be positive")
    return q_rad * q_abs / (q_rad + q_abs)


def kappa_from_q(energy_mev, q):
    """Cavity loss rate kappa/2pi in GHz for a mode at ``energy_mev`` with quality ``q``."""
    return energy_mev / q / H_MEV_S / _GHZ
