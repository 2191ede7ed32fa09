"""
Vacuum Rabi oscillations
========================

With a cavity Q of 60,000 (kappa/2pi ~ 3.9 GHz) and g/2pi = 5.4 GHz the
system is strongly coupled: an exciton placed on resonance swaps its energy
with the cavity photon at 2g before it leaks out.
"""

import numpy as np

from qdcavity import analysis, scenarios

res = scenarios.run_scenario(scenarios.preset("strong_coupling_check"))
traj = res.trajectory

freq, n_max = analysis.oscillation_frequency(analysis.population_waveform(traj))
print(f"{n_max} exciton maxima, oscillation at {freq:.2f} GHz (2g/2pi = 10.8 GHz)")

# %%
# Populations every 20 ps: exciton and photon trade places.
for t in np.arange(0.0, 0.21, 0.02):
    k = int(np.searchsorted(traj.times, t - 1e-12))
    print(f"t = {traj.times[k]:.2f} ns  exciton {traj.pop_exciton[k]:.3f}  photon {traj.photon_number[k]:.3f}")
