"""Time-dependent exciton frequency.

Three ingredients:

* :class:`RcSquareWave`: steady-state response of a first-order RC low-pass
  to a 50 % duty-cycle square wave that switches towards level B at ``delta``
  and back towards level A at ``delta + period/2``.
* :class:`StarkModel`: quadratic quantum-confined Stark shift of the exciton
  as a function of diode bias.
* :class:`DetuningSchedule`: the exciton detuning consumed by the dynamics, measured
  from the cavity (rotating-frame) frequency as a function of time.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .constants import HBAR_MEV_NS, mev_to_rad_ns


def plateau_constant(period, tau_rc):
    """``C = 1 / (1 + exp(-T / 2 tau))``; the normalized B plateau reached in steady state."""
    return 1.0 / (1.0 + math.exp(-period / (2.0 * tau_rc)))


@dataclass(frozen=True)
class RcSquareWave:
    """RC-filtered square wave between two angular frequencies (rad/ns).

    Times are in ns.  ``delta`` is the switching time towards B; any value is
    accepted and reduced modulo ``period``.
    """

    omega_a: float
    omega_b: float
    delta: float
    period: float
    tau_rc: float

    def __post_init__(self):
        if not self.period > 0:
            raise ValueError("period must be > 0")
        if not self.tau_rc > 0:
            raise ValueError("tau_rc must be > 0")

    @property
    def c(self):
        return plateau_constant(self.period, self.tau_rc)

    def shape(self, t):
        """Normalized response f(t) in [1 - C, C] (0 = level A, 1 = level B)."""
        T, tau = self.period, self.tau_rc
        # phase since the last switch towards B
        phase = np.mod(np.asarray(t, dtype=float) - self.delta, T)
        c = self.c
        high = phase < 0.5 * T
        out = np.where(
            high,
            1.0 - c * np.exp(-np.where(high, phase, 0.0) / tau),
            c * np.exp(-np.where(high, 0.0, phase - 0.5 * T) / tau),
        )
        return out if out.ndim else float(out)

    def __call__(self, t):
        return self.omega_a + (self.omega_b - self.omega_a) * self.shape(t)

    def edges(self, t_start, t_end):
        """Switching times (both directions) inside the open interval ``(t_start, t_end)``."""
        T = self.period
        out = []
        for offset in (0.0, 0.5 * T):
            first = self.delta + offset
            k = math.ceil((t_start - first) / T)
            t = first + k * T
            while t < t_end:
                if t > t_start:
                    out.append(t)
                t += T
        return sorted(out)


def rc_square_wave_eval(w, t):
    return w(t)


@dataclass(frozen=True)
class StarkModel:
    """Quadratic Stark shift ``E = e0 + p F + beta_pol F^2``.

    Units: ``e0`` in meV, ``p`` in e*nm, ``beta_pol`` in e*nm/(kV/cm), biases
    in V, ``d_intrinsic`` in nm and the field ``F`` in kV/cm.  Since
    1 e*nm * 1 kV/cm = 0.1 meV, both terms are scaled by 0.1 to give meV.

    The polarizability quoted for this sample, ``-3.1e-3 e nm cm/kV``, is the
    default.  It reproduces the ~0.13 meV shift between -1210 mV and -1260 mV
    bias with the default p-i-n field map.
    """

    e0: float = 0.0
    p: float = -0.04
    beta_pol: float = -3.1e-3
    v_bi: float = 1.1
    d_intrinsic: float = 240.0

    def __post_init__(self):
        if not self.d_intrinsic > 0:
            raise ValueError("d_intrinsic must be > 0")

    def field(self, v):
        """Vertical field in kV/cm for bias ``v`` (V)."""
        # V / nm -> kV/cm: 1 V/nm = 1e7 V/cm = 1e4 kV/cm
        return (self.v_bi - np.asarray(v, dtype=float)) / self.d_intrinsic * 1e4


MEV_PER_E_NM_KV_CM = 0.1


def stark_energy(m, v):
    F = m.field(v)
    return m.e0 + MEV_PER_E_NM_KV_CM * (m.p * F + m.beta_pol * F**2)


def stark_slope(m, v):
    """Analytic ``dE/dV`` in meV/V."""
    F = m.field(v)
    dF_dv = -1e4 / m.d_intrinsic
    return MEV_PER_E_NM_KV_CM * (m.p + 2.0 * m.beta_pol * F) * dF_dv


@dataclass(frozen=True)
class DetuningSchedule:
    """Exciton detuning ``omega_qd(t) - omega_frame`` in rad/ns.

    ``kind`` is ``"constant"`` (payload: absolute omega_qd), ``"rc_square_wave"``
    (payload: :class:`RcSquareWave`) or ``"sampled"`` (payload: ``(times,
    omegas)`` arrays, linearly interpolated and clamped at the ends).
    """

    kind: str
    payload: object
    omega_frame: float = 0.0
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.kind == "constant":
            float(self.payload)
        elif self.kind == "rc_square_wave":
            if not isinstance(self.payload, RcSquareWave):
                raise TypeError("rc_square_wave schedule needs an RcSquareWave payload")
        elif self.kind == "sampled":
            times, omegas = (np.asarray(a, dtype=float) for a in self.payload)
            if times.ndim != 1 or times.shape != omegas.shape:
                raise ValueError("sampled schedule needs equal-length 1-D time and value arrays")
            if times.size < 2:
                raise ValueError("sampled schedule needs at least 2 points")
            if np.any(np.diff(times) <= 0):
                raise ValueError("sampled schedule times must be strictly increasing")
            # relative values keep precision when omega ~ 1e6 rad/ns
            self._cache["times"] = times
            self._cache["detuning"] = omegas - self.omega_frame
        else:
            raise ValueError(f"unknown schedule kind {self.kind!r}")

    def __call__(self, t):
        return detuning_of(self, t)

    def omega(self, t):
        return self.omega_frame + detuning_of(self, t)

    def breakpoints(self, t_start, t_end):
        """Times in ``(t_start, t_end)`` where the detuning has a kink."""
        if self.kind == "rc_square_wave":
            return self.payload.edges(t_start, t_end)
        if self.kind == "sampled":
            times = self._cache["times"]
            return [float(t) for t in times if t_start < t < t_end]
        return []


def constant_schedule(omega_qd, omega_frame=0.0):
    return DetuningSchedule("constant", float(omega_qd), omega_frame)


def rc_schedule(wave, omega_frame=0.0):
    return DetuningSchedule("rc_square_wave", wave, omega_frame)


def sampled_schedule(times, omegas, omega_frame=0.0):
    return DetuningSchedule("sampled", (np.asarray(times, float), np.asarray(omegas, float)), omega_frame)


def detuning_of(schedule, t):
    kind = schedule.kind
    if kind == "constant":
        d = schedule.payload - schedule.omega_frame
        return d if np.ndim(t) == 0 else np.full(np.shape(t), d)
    if kind == "rc_square_wave":
        w = schedule.payload
        # (omega_a - frame) + (omega_b - omega_a) f(t), without forming the absolute value
        return (w.omega_a - schedule.omega_frame) + (w.omega_b - w.omega_a) * w.shape(t)
    times, det = schedule._cache["times"], schedule._cache["detuning"]
    out = np.interp(t, times, det)
    return float(out) if np.ndim(t) == 0 else out


def schedule_from_energies(energy_a_mev, energy_b_mev, cavity_mev, delta, period, tau_rc):
    """RC square-wave schedule with plateau energies in meV, frame at the cavity."""
    wave = RcSquareWave(
        omega_a=mev_to_rad_ns(energy_a_mev),
        omega_b=mev_to_rad_ns(energy_b_mev),
        delta=delta,
        period=period,
        tau_rc=tau_rc,
    )
    return rc_schedule(wave, omega_frame=mev_to_rad_ns(cavity_mev))


def load_sampled_schedule(path, cavity_mev):
    """Read two-column ``time_ns, energy_meV`` text ('#' comments) into a schedule."""
    from .io import read_columns

    t, e = read_columns(path, 2)
    return sampled_schedule(t, mev_to_rad_ns(e), omega_frame=mev_to_rad_ns(cavity_mev))


def energy_mev(schedule, t):
    """Absolute exciton energy (meV) along the schedule."""
    return (schedule.omega_frame + np.asarray(detuning_of(schedule, t))) * HBAR_MEV_NS


def swing_crossing(schedule, t_from, level=0.5, direction=None, t_max=None, resolution=1e-4):
    """First time after ``t_from`` where an RC schedule passes ``level`` of its swing.

    ``direction`` is +1 (towards B), -1 (towards A) or ``None`` for either.
    Returns ``None`` for non-RC schedules or when no crossing is found before
    ``t_max`` (default: one period).
    """
    if schedule.kind != "rc_square_wave":
        return None
    w = schedule.payload
    t_max = t_from + w.period if t_max is None else t_max
    n = int(math.ceil((t_max - t_from) / resolution)) + 1
    t = np.linspace(t_from, t_max, n)
    s = w.shape(t) - level
    above = s >= 0
    for i in np.nonzero(above[:-1] != above[1:])[0]:
        d = 1 if above[i + 1] else -1
        if direction is None or d == direction:
            if s[i] == 0.0:
                return float(t[i])
            return float(brentq(lambda x: w.shape(x) - level, t[i], t[i + 1], xtol=1e-14))
    return None
