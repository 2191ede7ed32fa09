"""Figures of merit computed from trajectories and measured-style waveforms."""

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .fitting import nlls_fit


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class Waveform:
    """Intensity (photons/ns, or arbitrary units) on a uniform time grid in ns."""

    times: np.ndarray
    intensity: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        y = np.asarray(self.intensity, dtype=float)
        if t.ndim != 1 or t.shape != y.shape:
            raise ValueError("times and intensity must be 1-D arrays of equal length")
        if t.size < 2:
            raise ValueError("a waveform needs at least 2 samples")
        dt = np.diff(t)
        if np.any(dt <= 0):
            raise ValueError("times must be strictly increasing")
        if np.max(np.abs(dt - dt[0])) > 1e-6 * dt[0]:
            raise ValueError("times must be uniformly spaced")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "intensity", y)

    @property
    def dt(self):
        return float(self.times[1] - self.times[0])

    def integral(self):
        return float(np.trapezoid(self.intensity, self.times))

    def window(self, t_from, t_to):
        m = (self.times >= t_from - 1e-12) & (self.times <= t_to + 1e-12)
        return self.times[m], self.intensity[m]


def _check_lifetimes(*taus):
    for tau in taus:
        if not tau > 0:
            raise DomainError(f"lifetimes must be positive, got {tau!r}")


def purcell_factor(tau_on, tau_off, tau_bulk):
    """``tau_bulk (1/tau_on - 1/tau_off)``: cavity-mode emission rate relative to bulk."""
    _check_lifetimes(tau_on, tau_off, tau_bulk)
    return tau_bulk * (1.0 / tau_on - 1.0 / tau_off)


def beta_factor(tau_on, tau_off):
    """Fraction of emission into the cavity mode, ``1 - tau_on/tau_off``.

    Not clamped: a negative value means the cavity suppresses emission.
    """
    _check_lifetimes(tau_on, tau_off)
    return 1.0 - tau_on / tau_off


def emission_waveform(traj, normalize=False):
    y = np.array(traj.emission_rate, dtype=float)
    if normalize:
        peak = np.max(y)
        if peak > 0:
            y = y / peak
        else:
            y = np.zeros_like(y)
    return Waveform(traj.times, y)


def population_waveform(traj, level="exciton"):
    return Waveform(traj.times, getattr(traj, f"pop_{level}"))


def instantaneous_rate(traj, min_population=1e-6):
    """Cavity emission rate per exciton, ``kappa <a^dag a> / P_exciton`` (1/ns).

    Samples where the exciton population is below ``min_population`` are set to
    NaN.
    """
    pe = np.asarray(traj.pop_exciton)
    with np.errstate(divide="ignore", invalid="ignore"):
        rate = np.where(pe > min_population, traj.emission_rate / pe, np.nan)
    return Waveform(traj.times, rate)


def peak_time(w):
    """Time of the maximum, refined by a parabola through the three top samples."""
    y = w.intensity
    k = int(np.nanargmax(y))
    if 0 < k < y.size - 1:
        y0, y1, y2 = y[k - 1], y[k], y[k + 1]
        denom = y0 - 2 * y1 + y2
        if denom < 0:
            return float(w.times[k] + 0.5 * w.dt * (y0 - y2) / denom)
    return float(w.times[k])


def symmetry_metric(w):
    """Overlap of the waveform with its mirror image about the peak.

    ``int I(t) I(2 t_p - t) dt / int I(t)^2 dt``; the mirrored signal is
    linearly interpolated and zero outside the grid.  1 for a waveform even
    about its peak, close to 0 for a one-sided decay.
    """
    y = w.intensity
    norm = np.trapezoid(y * y, w.times)
    if not norm > 0:
        raise DomainError("symmetry metric is undefined for an all-zero waveform")
    tp = peak_time(w)
    mirrored = np.interp(2 * tp - w.times, w.times, y, left=0.0, right=0.0)
    return float(np.trapezoid(y * mirrored, w.times) / norm)


def _half_max_width(w):
    y = w.intensity
    k = int(np.argmax(y))
    half = 0.5 * y[k]
    left = k
    while left > 0 and y[left] > half:
        left -= 1
    right = k
    while right < y.size - 1 and y[right] > half:
        right += 1
    return max((right - left) * w.dt, 2 * w.dt)


def fit_gaussian(w):
    """Fit ``A exp(-(t - t0)^2 / (2 sigma^2))`` to the whole waveform."""
    y = w.intensity
    if not np.max(np.abs(y)) > 0:
        raise DomainError("cannot fit a Gaussian to an all-zero waveform")
    p0 = [float(np.max(y)), peak_time(w), _half_max_width(w) / 2.3548]
    return nlls_fit("gaussian", w.times, y, p0)


def _log_linear(t, y):
    slope, intercept = np.polyfit(t, np.log(y), 1)
    return float(np.exp(intercept)), float(-slope)


def _checked_window(w, window):
    t_from, t_to = window
    if t_from < w.times[0] - 1e-12 or t_to > w.times[-1] + 1e-12 or not t_to > t_from:
        raise DomainError(f"window {window} is not inside the waveform grid [{w.times[0]}, {w.times[-1]}]")
    t, y = w.window(t_from, t_to)
    if t.size < 5:
        raise DomainError("window holds fewer than 5 samples")
    return t, y


def fit_exponential(w, window=None):
    """Single exponential ``A exp(-(t - t_start)/tau)`` on ``window``."""
    t, y = _checked_window(w, window or (w.times[0], w.times[-1]))
    if np.any(y <= 0):
        raise DomainError("exponential fit needs strictly positive intensity")
    a, rate = _log_linear(t - t[0], y)
    res = nlls_fit("exponential_rate", t - t[0], y, [a, rate])
    rate = res.params["rate"]
    tau = 1.0 / rate if rate != 0 else float("inf")
    res.extra.update({"tau": tau, "t_start": float(t[0])})
    return res


def decay_rate(w, window):
    """Decay rate 1/tau (1/ns) of a single-exponential fit restricted to ``window``."""
    return fit_exponential(w, window).params["rate"]


def fit_biexponential(w, window=None, split=0.5):
    """``a1 exp(-(t-t_s)/tau1) + a2 exp(-(t-t_s)/tau2)``, fast component first.

    Starting values: a single exponential on the late part of the window
    (fraction ``1 - split``) gives the slow component, another on the early
    residual gives the fast one.
    """
    t, y = _checked_window(w, window or (w.times[0], w.times[-1]))
    x = t - t[0]
    late = x >= split * x[-1]
    a2, r2 = _log_linear(x[late], np.clip(y[late], 1e-300, None))
    rest = y - a2 * np.exp(-r2 * x)
    early = (~late) & (rest > 0)
    if early.sum() >= 2:
        a1, r1 = _log_linear(x[early], rest[early])
    else:
        a1, r1 = max(y[0] - a2, 1e-3 * y[0]), 5 * r2
    if not r1 > r2:
        r1 = 5 * max(r2, 1e-6)
    p0 = [a1, 1.0 / r1, a2, 1.0 / max(r2, 1e-6)]
    res = nlls_fit("biexponential", x, y, p0)
    p = res.params
    if p["tau1"] > p["tau2"]:
        res.params = {"a1": p["a2"], "tau1": p["tau2"], "a2": p["a1"], "tau2": p["tau1"]}
    res.extra["t_start"] = float(t[0])
    return res


def _crossing(t, y, level):
    above = np.nonzero(y >= level)[0]
    if above.size == 0:
        return None
    k = int(above[0])
    if k == 0:
        return float(t[0])
    return float(t[k - 1] + (level - y[k - 1]) * (t[k] - t[k - 1]) / (y[k] - y[k - 1]))


def transition_time(w, window, low=0.1, high=0.9):
    """10-90 % rise time of the upward transition inside ``window``.

    The baseline is the minimum in the window and the top is the maximum
    after it.  Returns ``(t_high - t_low, t_low, t_high)``.
    """
    t, y = w.window(*window)
    ok = np.isfinite(y)
    t, y = t[ok], y[ok]
    if t.size < 3:
        raise DomainError("not enough finite samples in the transition window")
    k = int(np.argmin(y))
    t, y = t[k:], y[k:]
    lo, hi = y[0], np.max(y)
    if not hi > lo:
        raise DomainError("no upward transition inside the window")
    t_lo = _crossing(t, y, lo + low * (hi - lo))
    t_hi = _crossing(t, y, lo + high * (hi - lo))
    return t_hi - t_lo, t_lo, t_hi


def oscillation_frequency(w, prominence=1e-3):
    """Mean frequency (GHz, i.e. 1/ns) from successive interior maxima.

    Returns ``(frequency, n_maxima)``; frequency is NaN with fewer than two maxima.
    """
    y = w.intensity
    idx, _ = find_peaks(y, prominence=prominence * np.max(np.abs(y)))
    if idx.size < 2:
        return float("nan"), int(idx.size)
    tp = []
    for k in idx:
        y0, y1, y2 = y[k - 1], y[k], y[k + 1]
        denom = y0 - 2 * y1 + y2
        tp.append(w.times[k] + (0.5 * w.dt * (y0 - y2) / denom if denom < 0 else 0.0))
    return float((len(tp) - 1) / (tp[-1] - tp[0])), int(idx.size)


def modulation_ratio(w, reference, floor=1e-12):
    """Pointwise ``w / reference`` where the reference exceeds ``floor`` (NaN elsewhere)."""
    if w.times.shape != reference.times.shape or np.any(w.times != reference.times):
        raise ValueError("waveforms must share the same time grid")
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(reference.intensity > floor, w.intensity / reference.intensity, np.nan)
    return Waveform(w.times, r)
