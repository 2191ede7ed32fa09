"""Simulation and analysis of a Stark-tuned quantum-dot exciton in a photonic-crystal cavity.

Modules
-------
qops       operator algebra on the three-level emitter (x) truncated cavity space
schedule   RC-filtered square-wave detuning, Stark map, detuning schedules
dynamics   master-equation integration with numerical-health diagnostics
fitting    Levenberg-Marquardt least squares and the shipped models
analysis   waveforms, lifetimes, Purcell and beta factors, symmetry metrics
device     diode impedance, S11, RC extraction, cavity Q
scenarios  scenario configs, presets and the scenario runner
cli        ``qdcavity`` command line
"""

__version__ = "0.1.0"
