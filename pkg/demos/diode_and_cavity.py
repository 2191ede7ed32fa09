"""
Diode and cavity characterization
=================================

The electrical side sets how fast the exciton can be tuned; the optical side
sets the cavity loss rate.  Both are recovered here from synthetic data.
"""

import numpy as np

from qdcavity import device

rng = np.random.default_rng(0)

# %%
# S11 of a series RC diode (180 Ohm, 0.3 pF) measured from 0.1 to 5 GHz,
# inverted back to R and C.
diode = device.DiodeModel(r_series=180.0, capacitance=0.3)
f = np.linspace(0.1, 5.0, 20)
fit = device.extract_rc(f, device.s11(diode, f))
print(f"R = {fit['r_series']:.3f} Ohm, C = {fit['capacitance']:.4f} pF")

# %%
# With the 50 Ohm source in the charging path a 200 Ohm, 0.3 pF diode has a
# 3 dB bandwidth of about 2 GHz.  A 1.2 GHz electro-optical bandwidth
# corresponds to an RC constant near 130 ps.
print(f"f_3dB = {device.bandwidth_3db(250.0, 0.3):.2f} GHz")
print(f"tau_RC(1.2 GHz) = {device.tau_from_bandwidth(1.2) * 1e3:.0f} ps")

# %%
# A cavity line at 978 meV with Q = 10,500, with 1% noise
e0, q = 978.0, 10500.0
fwhm = e0 / q
e = np.linspace(e0 - 8 * fwhm, e0 + 8 * fwhm, 401)
counts = (fwhm / 2) ** 2 / ((e - e0) ** 2 + (fwhm / 2) ** 2) + 0.01 * rng.uniform(-1, 1, e.size)
line = device.lorentzian_q(device.CavitySpectrum(e, counts))
print(f"Q = {line['q']:.0f}, kappa/2pi = {line['kappa_ghz']:.1f} GHz")

# %%
# Radiative and absorption-limited Q combine like parallel resistors.
print(f"Q_total(27,000, 60,000) = {device.q_total(27000, 60000):.0f}")
