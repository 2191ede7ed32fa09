"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines are collected in
the "acceptance criteria" section of the terminal summary.
"""

import math
import warnings
from functools import lru_cache

import numpy as np
import pytest

import oracles
from qdcavity import analysis, cli, device, dynamics, scenarios
from qdcavity import schedule as sched
from qdcavity.constants import HBAR_MEV_NS


def _report(log, n, checks):
    """``checks``: list of (ok, description).  Records one line and asserts."""
    ok = all(c for c, _ in checks)
    detail = "; ".join(f"{d} [{'ok' if c else 'FAIL'}]" for c, d in checks)
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    log.append(line)
    print(line)
    assert ok, line


@lru_cache(maxsize=None)
def _run(name):
    cfg = scenarios.preset(name)
    cfg["run"]["diag_stride"] = 1  # positivity checked at every sample
    with warnings.catch_warnings():
        warnings.simplefilter("error", dynamics.TruncationWarning)
        return scenarios.run_scenario(cfg)


def test_criterion_01_numerical_health(acceptance_log):
    checks = []
    for name in scenarios.PRESETS:
        res = _run(name)
        trajs = [(name, res.trajectory)]
        if res.reference is not None:
            trajs.append((f"{name} reference", res.reference))
        for label, traj in trajs:
            d = traj.diagnostics()
            ok = (d["max_trace_error"] < 1e-8 and d["max_hermiticity_error"] < 1e-9
                  and d["min_eigenvalue"] > -1e-9 and d["max_top_fock_population"] < 1e-6)
            checks.append((ok, f"{label}: tr {d['max_trace_error']:.1e} herm {d['max_hermiticity_error']:.1e} "
                               f"eig {d['min_eigenvalue']:.1e} top {d['max_top_fock_population']:.1e}"))
    _report(acceptance_log, 1, checks)


def test_criterion_02_oracle_equivalence(acceptance_log):
    rng = np.random.default_rng(2)
    checks = []
    for k in range(5):
        g, kappa, gamma = rng.uniform(1, 40), rng.uniform(5, 150), rng.uniform(0, 5)
        relax, delta = rng.uniform(20, 150), rng.uniform(-200, 200)
        rho0 = oracles.random_density_matrix(rng, 9)
        params = dynamics.SimParams(g=g, kappa_cav=kappa, gamma_qd=gamma, gamma_relax=relax,
                                    pump=dynamics.NO_PUMP, n_fock=2)
        traj = dynamics.evolve(rho0, params, sched.constant_schedule(delta), (0.0, 0.5), 0.05,
                               check_health=False)
        exact = oracles.propagate(rho0, oracles.superoperator(g, kappa, gamma, relax, delta, 2), 0.5)
        err = float(np.max(np.abs(traj.final_state - exact)))
        checks.append((err < 1e-7, f"set {k}: max|diff| {err:.1e}"))
    _report(acceptance_log, 2, checks)


def _weak_rate(delta_rad_ns):
    cfg = scenarios.preset("weak_coupling_check")
    cfg["schedule"]["energy_mev"] = cfg["sim"]["cavity_energy_mev"] + HBAR_MEV_NS * delta_rad_ns
    with warnings.catch_warnings():
        warnings.simplefilter("error", dynamics.TruncationWarning)
        return scenarios.run_scenario(cfg).metrics["decay_rate_per_ns"]


def test_criterion_03_weak_coupling_purcell(acceptance_log):
    g, kappa = 2 * math.pi * 1.0, 2 * math.pi * 50.0
    expected = 4 * g * g / kappa
    r0 = _run("weak_coupling_check").metrics["decay_rate_per_ns"]
    checks = [(abs(r0 / expected - 1) < 0.03, f"R(0) {r0:.5f} vs 4g^2/kappa {expected:.5f}")]
    for frac in (0.5, 1.0):
        delta = frac * kappa
        ratio = _weak_rate(delta) / r0
        lorentz = 1 / (1 + (2 * delta / kappa) ** 2)
        checks.append((abs(ratio / lorentz - 1) < 0.05, f"R({frac:g} kappa)/R(0) {ratio:.4f} vs {lorentz:.4f}"))
    _report(acceptance_log, 3, checks)


def test_criterion_04_lifetimes(acceptance_log):
    on, off = _run("fig2b_on"), _run("fig2b_off")
    tau_on, tau_off = on.metrics["lifetime_ns"], off.metrics["lifetime_ns"]
    beta = analysis.beta_factor(tau_on, tau_off)
    m = on.metrics
    channel = m["emitted_into_cavity"] / (m["emitted_into_cavity"] + m["emitted_into_leaky_modes"])
    _report(acceptance_log, 4, [
        (0.26 <= tau_on <= 0.30, f"tau_on {tau_on:.4f} ns in [0.26, 0.30]"),
        (0.88 <= beta <= 0.94, f"beta {beta:.4f} in [0.88, 0.94] (tau_off {tau_off:.3f} ns; "
                               f"cavity share of emitted photons {channel:.4f})"),
    ])


def test_criterion_05_purcell_beta_formulas(acceptance_log):
    fp = analysis.purcell_factor(0.27, 3.1, 0.85)
    beta = analysis.beta_factor(0.27, 3.1)
    _report(acceptance_log, 5, [
        (abs(fp - 2.87) <= 0.01, f"F_p {fp:.4f} = 2.87 +- 0.01"),
        (abs(beta - 0.913) <= 0.001, f"beta {beta:.4f} = 0.913 +- 0.001"),
    ])


def test_criterion_06_modulation_timing(acceptance_log):
    b, c = _run("fig4b"), _run("fig4c")
    tt = b.metrics["rate_transition_time_ns"]
    target = 2.197 * 0.14
    _report(acceptance_log, 6, [
        (abs(tt / target - 1) <= 0.15, f"fig4b 10-90% rate transition {tt * 1e3:.1f} ps vs {target * 1e3:.1f} ps +-15%"),
        (c.metrics["peak_intensity_per_ns"] < b.metrics["peak_intensity_per_ns"],
         f"peak fig4c {c.metrics['peak_intensity_per_ns']:.4f} < fig4b {b.metrics['peak_intensity_per_ns']:.4f}"),
    ])


def test_criterion_07_symmetrization(acceptance_log):
    d, ref = _run("fig4d").metrics, _run("fig2b_on").metrics
    _report(acceptance_log, 7, [
        (d["gaussian_residual_rms"] < 0.05, f"fig4d Gaussian residual {d['gaussian_residual_rms']:.4f} < 0.05"),
        (d["symmetry_metric"] > 0.9, f"fig4d symmetry {d['symmetry_metric']:.4f} > 0.9"),
        (ref["symmetry_metric"] < 0.6, f"fig2b_on symmetry {ref['symmetry_metric']:.4f} < 0.6"),
    ])


def test_criterion_08_strong_coupling(acceptance_log):
    res = _run("strong_coupling_check")
    kappa_ghz = device.kappa_from_q(res.resolved.config["sim"]["cavity_energy_mev"], 60000)
    freq, n_max = res.metrics["rabi_frequency_ghz"], res.metrics["rabi_maxima"]
    _report(acceptance_log, 8, [
        (abs(kappa_ghz - 3.94) < 0.01, f"kappa/2pi {kappa_ghz:.3f} GHz"),
        (n_max >= 2, f"{n_max} population maxima (>= 2 oscillations)"),
        (abs(freq / 10.8 - 1) < 0.10, f"Rabi frequency {freq:.3f} GHz vs 10.8 GHz +-10%"),
    ])


def test_criterion_09_device_chain(acceptance_log):
    rng = np.random.default_rng(9)
    bw = device.bandwidth_3db(250.0, 0.3)
    f = np.linspace(0.1, 5, 20)
    worst = 0.0
    for _ in range(50):
        r, c = rng.uniform(10, 500), rng.uniform(0.05, 2)
        res = device.extract_rc(f, device.s11(device.DiodeModel(r, c), f))
        worst = max(worst, abs(res["r_series"] / r - 1), abs(res["capacitance"] / c - 1))
    fwhm = 978.0 / 10500
    e = np.linspace(978.0 - 10 * fwhm, 978.0 + 10 * fwhm, 801)
    y = (fwhm / 2) ** 2 / ((e - 978.0) ** 2 + (fwhm / 2) ** 2) + 0.01 * rng.uniform(-1, 1, e.size)
    q = device.lorentzian_q(device.CavitySpectrum(e, y))["q"]
    qt = device.q_total(27000, 60000)
    _report(acceptance_log, 9, [
        (abs(bw / 2.12 - 1) <= 0.005, f"f_3dB {bw:.4f} GHz = 2.12 +-0.5%"),
        (worst < 1e-6, f"extract_rc worst relative error {worst:.1e} over 50 pairs"),
        (abs(q / 10500 - 1) < 0.01, f"Lorentzian Q {q:.0f} vs 10500 under 1% noise"),
        (abs(qt - 18621) <= 1, f"q_total {qt:.1f} = 18621 +- 1"),
    ])


def test_criterion_10_schedule_contract(acceptance_log):
    T, tau = 16.67, 0.14
    w = sched.RcSquareWave(omega_a=0.0, omega_b=-197.5, delta=3.0, period=T, tau_rc=tau)
    span = abs(w.omega_b - w.omega_a)
    cont = []
    for b in (w.delta, w.delta + T / 2, T):
        j6, j7 = (abs(w(b - e) - w(b + e)) for e in (1e-6, 1e-7))
        cont.append(j6 < 1e-4 * span and abs(j7 / j6 - 0.1) < 1e-2)
    t = np.random.default_rng(10).uniform(-50, 50, 100)
    per = float(np.max(np.abs(w(t) - w(t + T))))
    c = w.c
    ident = abs((1 - c) - c * math.exp(-T / (2 * tau)))
    s = sched.rc_schedule(w)
    rise = (sched.swing_crossing(s, 0.0, level=0.9, direction=1)
            - sched.swing_crossing(s, 0.0, level=0.1, direction=1))
    _report(acceptance_log, 10, [
        (all(cont), "continuity at delta, delta+T/2, T (eps = 1e-6, 1e-7 ns)"),
        (per < 1e-10 * span, f"periodicity max diff {per:.1e} rad/ns"),
        (ident <= np.finfo(float).eps, f"|1 - C - C exp(-T/2tau)| = {ident:.1e}"),
        (abs(rise / (math.log(9) * tau) - 1) < 0.01, f"rise time {rise * 1e3:.2f} ps vs ln(9) tau {math.log(9) * tau * 1e3:.2f} ps"),
    ])


def test_criterion_11_determinism(acceptance_log, tmp_path):
    checks = []
    for name in ("fig4b", "fig4d", "strong_coupling_check"):
        cfg = scenarios.preset(name)
        a, b = tmp_path / f"{name}_a", tmp_path / f"{name}_b"
        cli.simulate_to(cfg, str(a))
        cli.simulate_to(cfg, str(b))
        files = sorted(p.name for p in a.glob("*.csv"))
        same = all((a / f).read_bytes() == (b / f).read_bytes() for f in files)
        checks.append((same and len(files) >= 2, f"{name}: {len(files)} CSV files byte-identical"))
    _report(acceptance_log, 11, checks)
