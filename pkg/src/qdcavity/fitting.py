"""Damped Gauss-Newton (Levenberg-Marquardt) least squares and the shipped models.

Models are looked up by name in :data:`MODELS`; a :class:`Model` instance can
be passed directly for one-off fits (the S11 inversion in :mod:`device` does
this).
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np


class RankDeficiencyError(ValueError):
    """The Jacobian lost rank: parameters are not identifiable from the data."""


@dataclass(frozen=True)
class Model:
    name: str
    param_names: Sequence[str]
    func: Callable
    jac: Optional[Callable] = None

    def __call__(self, x, p):
        return self.func(x, *p)


def _linear(x, slope, intercept):
    return slope * x + intercept


def _exponential(x, amplitude, tau):
    return amplitude * np.exp(-x / tau)


def _exponential_rate(x, amplitude, rate):
    return amplitude * np.exp(-rate * x)


def _biexponential(x, a1, tau1, a2, tau2):
    return a1 * np.exp(-x / tau1) + a2 * np.exp(-x / tau2)


def _gaussian(x, amplitude, center, sigma):
    return amplitude * np.exp(-((x - center) ** 2) / (2.0 * sigma**2))


def _lorentzian(x, amplitude, center, fwhm, offset):
    hw2 = (0.5 * fwhm) ** 2
    return amplitude * hw2 / ((x - center) ** 2 + hw2) + offset


def _damped_cosine(x, amplitude, rate, frequency, phase, offset):
    return amplitude * np.exp(-rate * x) * np.cos(2 * np.pi * frequency * x + phase) + offset


MODELS = {
    m.name: m
    for m in [
        Model("linear", ("slope", "intercept"), _linear),
        Model("exponential", ("amplitude", "tau"), _exponential),
        Model("exponential_rate", ("amplitude", "rate"), _exponential_rate),
        Model("biexponential", ("a1", "tau1", "a2", "tau2"), _biexponential),
        Model("gaussian", ("amplitude", "center", "sigma"), _gaussian),
        Model("lorentzian", ("amplitude", "center", "fwhm", "offset"), _lorentzian),
        Model("damped_cosine", ("amplitude", "rate", "frequency", "phase", "offset"), _damped_cosine),
    ]
}


def get_model(model):
    if isinstance(model, Model):
        return model
    try:
        return MODELS[model]
    except KeyError:
        raise ValueError(f"unknown model {model!r}; known: {sorted(MODELS)}") from None


@dataclass
class FitResult:
    """Outcome of :func:`nlls_fit`.

    ``residual_rms`` is the relative residual norm ``||y - f|| / ||y||``
    (plain RMS when the data are identically zero), so it does not depend on
    the overall scale of the data or on how much empty baseline is included.
    """

    model: str
    params: dict
    residual_rms: float
    converged: bool
    iterations: int
    covariance_diag: Optional[dict] = None
    cost_history: list = field(default_factory=list, repr=False)
    message: str = ""
    extra: dict = field(default_factory=dict)

    def __getitem__(self, name):
        if name in self.params:
            return self.params[name]
        return self.extra[name]

    def stderr(self, name):
        if self.covariance_diag is None:
            return float("nan")
        return float(np.sqrt(max(self.covariance_diag[name], 0.0)))

    def report(self):
        """Flat ``key = value`` lines."""
        lines = [f"model = {self.model}"]
        for k, v in self.params.items():
            lines.append(f"{k} = {v:.12g}")
            if self.covariance_diag is not None:
                lines.append(f"{k}_stderr = {self.stderr(k):.6g}")
        for k, v in self.extra.items():
            lines.append(f"{k} = {v:.12g}")
        lines += [
            f"residual_rms = {self.residual_rms:.6g}",
            f"converged = {str(self.converged).lower()}",
            f"iterations = {self.iterations}",
        ]
        if self.message:
            lines.append(f"message = {self.message}")
        return "\n".join(lines) + "\n"


def _jacobian(resid, p, r0):
    # central differences; step relative to parameter magnitude
    n = p.size
    J = np.empty((r0.size, n))
    for j in range(n):
        h = 1e-6 * max(abs(p[j]), 1e-8)
        dp = np.zeros(n)
        dp[j] = h
        J[:, j] = (resid(p + dp) - resid(p - dp)) / (2 * h)
    return J


def nlls_fit(
    model,
    x,
    y,
    initial,
    bounds=None,
    weights=None,
    max_iter=200,
    rtol=1e-10,
):
    """Fit ``model`` to ``(x, y)`` by Levenberg-Marquardt.

    Parameters
    ----------
    model : str or Model
        Name in :data:`MODELS` or a :class:`Model`.
    x, y : array_like
        Data.  ``y`` must be real; complex data should be stacked as
        ``[re, im]`` by the caller.
    initial : sequence of float or dict
        Starting parameters.
    bounds : (lower, upper), optional
        Box constraints; trial steps are clipped into the box.
    weights : array_like, optional
        Residuals are multiplied by these.

    The iteration stops when an accepted step lowers the sum of squares by a
    relative amount below ``rtol``, when the sum of squares vanishes, or when
    no downhill step exists at any damping (a minimum to rounding).  Hitting
    ``max_iter`` returns ``converged=False`` instead of raising.

    Raises
    ------
    RankDeficiencyError
        if the Jacobian at the current point is rank deficient.
    """
    m = get_model(model)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if isinstance(initial, dict):
        initial = [initial[k] for k in m.param_names]
    p = np.array(initial, dtype=float)
    n = len(m.param_names)
    if p.size != n:
        raise ValueError(f"model {m.name} takes {n} parameters, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise ValueError("initial parameters must be finite")
    if y.size < max(2 * n, 5):
        raise ValueError(f"need at least {max(2 * n, 5)} data points for {n} parameters, got {y.size}")
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    if bounds is not None:
        lo = np.asarray(bounds[0], dtype=float) * np.ones(n)
        hi = np.asarray(bounds[1], dtype=float) * np.ones(n)
        p = np.clip(p, lo, hi)
    else:
        lo = hi = None

    def resid(q):
        return w * (m(x, q) - y)

    r = resid(p)
    cost = float(r @ r)
    if not np.isfinite(cost):
        raise ValueError("model is not finite at the initial parameters")
    history = [cost]
    lam = 1e-3
    converged = False
    message = "maximum iterations reached"
    it = 0
    for it in range(1, max_iter + 1):
        if cost == 0.0:
            converged, message = True, "exact fit"
            break
        J = m.jac(x, p) * w[:, None] if m.jac is not None else _jacobian(resid, p, r)
        if not np.all(np.isfinite(J)):
            raise RankDeficiencyError("non-finite Jacobian")
        col = np.sqrt(np.sum(J**2, axis=0))
        if np.any(col == 0) or np.linalg.matrix_rank(J / col, tol=1e-12 * max(J.shape)) < n:
            raise RankDeficiencyError(f"Jacobian of {m.name} is rank deficient at {dict(zip(m.param_names, p))}")
        A = J.T @ J
        grad = J.T @ r
        D = np.diag(A).copy()
        accepted = False
        while lam < 1e16:
            try:
                step = np.linalg.solve(A + lam * np.diag(D), -grad)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            trial = p + step
            if lo is not None:
                trial = np.clip(trial, lo, hi)
            r_new = resid(trial)
            cost_new = float(r_new @ r_new)
            if np.isfinite(cost_new) and cost_new < cost:
                accepted = True
                break
            lam *= 10
        if not accepted:
            converged, message = True, "no downhill step at any damping"
            break
        rel = (cost - cost_new) / cost
        p, r, cost = trial, r_new, cost_new
        history.append(cost)
        lam = max(lam / 10, 1e-12)
        if rel < rtol:
            converged, message = True, "relative change below tolerance"
            break

    ynorm = float(np.sqrt(np.sum((w * y) ** 2)))
    rnorm = float(np.sqrt(cost))
    residual_rms = rnorm / ynorm if ynorm > 0 else rnorm / np.sqrt(y.size)
    cov = None
    dof = y.size - n
    if dof > 0:
        J = m.jac(x, p) * w[:, None] if m.jac is not None else _jacobian(resid, p, r)
        try:
            cdiag = np.diag(np.linalg.inv(J.T @ J)) * cost / dof
            cov = dict(zip(m.param_names, map(float, cdiag)))
        except np.linalg.LinAlgError:
            cov = None
    return FitResult(
        model=m.name,
        params=dict(zip(m.param_names, map(float, p))),
        residual_rms=float(residual_rms),
        converged=converged,
        iterations=it,
        covariance_diag=cov,
        cost_history=history,
        message=message,
    )
