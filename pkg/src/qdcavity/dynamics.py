"""Master-equation dynamics of the pumped three-level emitter in a cavity.

Rotating frame at the cavity frequency, so only the exciton detuning enters
the Hamiltonian::

    H = Delta_qd(t) |2><2| + i g (e^{i phi} a |2><1| - e^{-i phi} a^dag |1><2|)

with rates and energies in rad/ns (hbar = 1 in these units).  Dissipation:
cavity loss ``kappa D[a]``, leaky-mode decay ``gamma_qd D[|1><2|]``, fast
relaxation ``gamma_relax D[|2><3|]`` and a rectangular incoherent pump
``Phi(t) D[|3><1|]``.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import qops

TRACE_TOL = 1e-8
HERMITICITY_TOL = 1e-9
EIGENVALUE_TOL = 1e-9
TRUNCATION_TOL = 1e-6

DEFAULT_RTOL = 1e-8
DEFAULT_ATOL = 1e-12


class IntegrationError(RuntimeError):
    """The adaptive integrator could not meet its tolerances."""

    def __init__(self, message, time):
        super().__init__(f"{message} (at t = {time:.6g} ns)")
        self.time = time


class NumericalHealthError(RuntimeError):
    """A sampled density matrix violated trace, Hermiticity or positivity bounds."""

    def __init__(self, kind, time, value):
        super().__init__(f"{kind} violation at t = {time:.6g} ns: {value:.3e}")
        self.kind = kind
        self.time = time
        self.value = value


class TruncationWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class PumpProfile:
    """Rectangular incoherent pump of rate ``amplitude`` (1/ns) on ``|t - t0| <= width/2``."""

    t0: float = 0.1
    width: float = 0.070
    amplitude: float = math.log(2.0) / 0.070

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("pump width must be > 0")
        if not self.amplitude >= 0:
            raise ValueError("pump amplitude must be >= 0")

    @classmethod
    def from_probability(cls, t0, width, probability):
        """Pump whose jump fires at least once with the given probability."""
        if not 0 <= probability < 1:
            raise ValueError("excitation probability must be in [0, 1)")
        return cls(t0=t0, width=width, amplitude=-math.log1p(-probability) / width)

    @property
    def start(self):
        return self.t0 - 0.5 * self.width

    @property
    def stop(self):
        return self.t0 + 0.5 * self.width

    def active(self, t):
        return self.amplitude > 0 and abs(t - self.t0) <= 0.5 * self.width

    def rate(self, t):
        return self.amplitude if self.active(t) else 0.0


NO_PUMP = PumpProfile(amplitude=0.0)


def excitation_probability(pump):
    return -math.expm1(-pump.amplitude * pump.width)


@dataclass(frozen=True)
class SimParams:
    """Rates in rad/ns.  ``omega_cav`` is absolute and only sets the frame."""

    g: float
    kappa_cav: float
    gamma_qd: float
    gamma_relax: float = 100.0
    pump: PumpProfile = field(default_factory=PumpProfile)
    omega_cav: float = 0.0
    n_fock: int = 2
    coupling_phase: float = 0.0

    def __post_init__(self):
        for name in ("g", "kappa_cav", "gamma_qd", "gamma_relax"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")
        qops.HilbertSpace(self.n_fock)

    @property
    def delta_cav(self):
        # cavity frame
        return 0.0

    @property
    def space(self):
        return qops.HilbertSpace(self.n_fock)


def hamiltonian(params, delta_qd, space=None):
    space = space or params.space
    a = qops.annihilation(space)
    phase = np.exp(1j * params.coupling_phase)
    coupling = 1j * params.g * (
        phase * a @ qops.sigma(space, 2, 1) - np.conj(phase) * a.conj().T @ qops.sigma(space, 1, 2)
    )
    return delta_qd * qops.sigma(space, 2, 2) + coupling


def jump_operators(params, space=None):
    """``(rate, L)`` pairs, excluding the pump."""
    space = space or params.space
    return [
        (params.kappa_cav, qops.annihilation(space)),
        (params.gamma_qd, qops.sigma(space, 1, 2)),
        (params.gamma_relax, qops.sigma(space, 2, 3)),
    ]


class _Generator:
    """Pieces of the Lindbladian, arranged for a cheap right-hand side.

    ``drho = -i (K rho - rho K^dag) + sum_k c_k L_k rho L_k^dag`` with the
    non-Hermitian ``K = H - (i/2) sum_k c_k L_k^dag L_k``.
    """

    def __init__(self, params):
        space = params.space
        self.params = params
        self.space = space
        self.dim = space.total_dim
        self.k_static = hamiltonian(params, 0.0, space)
        self.jumps = [(c, L, L.conj().T) for c, L in jump_operators(params, space) if c > 0]
        for c, L, Ld in self.jumps:
            self.k_static = self.k_static - 0.5j * c * (Ld @ L)
        self.p_exciton = qops.sigma(space, 2, 2)
        self.p_ground = qops.sigma(space, 1, 1)
        self.l_pump = qops.sigma(space, 3, 1)
        self.photon_diag = np.real(np.diagonal(qops.number(space)))
        self.exciton_diag = np.real(np.diagonal(self.p_exciton))
        self.ground_diag = np.real(np.diagonal(self.p_ground))

    def rhs(self, rho, delta, pump_rate):
        K = self.k_static + delta * self.p_exciton
        if pump_rate:
            K = K - 0.5j * pump_rate * self.p_ground
        out = -1j * (K @ rho - rho @ K.conj().T)
        for c, L, Ld in self.jumps:
            out += c * (L @ rho @ Ld)
        if pump_rate:
            out += pump_rate * (self.l_pump @ rho @ self.l_pump.conj().T)
        return out


def liouvillian_rhs(rho, t, params, schedule):
    """``d rho / dt`` at time ``t`` (ns) for the full master equation."""
    gen = _Generator(params)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (gen.dim, gen.dim):
        raise qops.DimensionMismatchError(f"rho has shape {rho.shape}, expected {(gen.dim, gen.dim)}")
    return gen.rhs(rho, float(schedule(t)), params.pump.rate(t))


@dataclass
class Trajectory:
    """Sampled observables of one evolution.

    ``emitted_cavity``, ``emitted_leaky`` and ``pumped`` are running integrals
    of ``kappa <a^dag a>``, ``gamma_qd <sigma_22>`` and ``Phi(t) <sigma_11>``
    carried along in the ODE state, so photon bookkeeping does not depend on
    the sampling grid.
    """

    times: np.ndarray
    pop_ground: np.ndarray
    pop_exciton: np.ndarray
    pop_pump: np.ndarray
    photon_number: np.ndarray
    emission_rate: np.ndarray
    detuning: np.ndarray
    trace_error: np.ndarray
    hermiticity_error: np.ndarray
    top_fock_population: np.ndarray
    diagnostic_times: np.ndarray
    min_eigenvalue: np.ndarray
    emitted_cavity: np.ndarray
    emitted_leaky: np.ndarray
    pumped: np.ndarray
    final_state: np.ndarray
    kappa_cav: float
    n_steps: int = 0
    n_rhs: int = 0
    states: np.ndarray = None

    def diagnostics(self):
        return {
            "max_trace_error": float(np.max(self.trace_error)),
            "max_hermiticity_error": float(np.max(self.hermiticity_error)),
            "min_eigenvalue": float(np.min(self.min_eigenvalue)),
            "max_top_fock_population": float(np.max(self.top_fock_population)),
            "n_steps": int(self.n_steps),
            "n_rhs": int(self.n_rhs),
        }


def sample_grid(t_start, t_end, sample_dt):
    n = int(math.floor((t_end - t_start) / sample_dt + 1e-9))
    return t_start + sample_dt * np.arange(n + 1)


def _segments(params, schedule, t_start, t_end):
    cuts = set(schedule.breakpoints(t_start, t_end))
    pump = params.pump
    if pump.amplitude > 0:
        cuts.update(t for t in (pump.start, pump.stop) if t_start < t < t_end)
    edges = [t_start] + sorted(cuts) + [t_end]
    return list(zip(edges[:-1], edges[1:]))


def evolve(
    rho0,
    params,
    schedule,
    t_span,
    sample_dt,
    rtol=DEFAULT_RTOL,
    atol=DEFAULT_ATOL,
    diag_stride=10,
    store_states=False,
    check_health=True,
):
    """Integrate the master equation and sample observables on a uniform grid.

    Integration uses the Dormand-Prince 5(4) pair with adaptive steps and
    dense output.  The integrator is restarted at every schedule kink and at
    the pump switching times, and the pump state is held fixed inside each
    segment.

    Raises
    ------
    IntegrationError
        if the step size collapses before the end of a segment.
    NumericalHealthError
        if a sample violates the trace (1e-8), Hermiticity (1e-9) or
        positivity (-1e-9, checked every ``diag_stride`` samples) bounds.
    """
    t_start, t_end = map(float, t_span)
    if not t_end > t_start:
        raise ValueError("t_span must be increasing")
    if not sample_dt > 0:
        raise ValueError("sample_dt must be > 0")
    gen = _Generator(params)
    d = gen.dim
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (d, d):
        raise qops.DimensionMismatchError(f"rho0 has shape {rho0.shape}, expected {(d, d)}")
    if check_health and not qops.is_density_matrix(rho0):
        raise ValueError("rho0 is not a valid density matrix")

    kappa, gamma = params.kappa_cav, params.gamma_qd
    n_diag, e_diag, g_diag = gen.photon_diag, gen.exciton_diag, gen.ground_diag
    dd = d * d

    def make_fun(pump_rate):
        def fun(t, y):
            rho = y[:dd].reshape(d, d)
            out = np.empty_like(y)
            out[:dd] = gen.rhs(rho, float(schedule(t)), pump_rate).ravel()
            pops = np.real(np.diagonal(rho))
            out[dd] = kappa * (n_diag @ pops)
            out[dd + 1] = gamma * (e_diag @ pops)
            out[dd + 2] = pump_rate * (g_diag @ pops)
            return out

        return fun

    times = sample_grid(t_start, t_end, sample_dt)
    samples = np.empty((times.size, dd + 3), dtype=complex)
    y = np.concatenate([rho0.ravel(), np.zeros(3, dtype=complex)])
    n_steps = n_rhs = 0
    for a, b in _segments(params, schedule, t_start, t_end):
        pump_rate = params.pump.rate(0.5 * (a + b))
        sol = solve_ivp(make_fun(pump_rate), (a, b), y, method="RK45", rtol=rtol, atol=atol, dense_output=True)
        n_rhs += sol.nfev
        n_steps += max(sol.t.size - 1, 0)
        if sol.status != 0:
            raise IntegrationError(sol.message, float(sol.t[-1]))
        last = b == t_end
        mask = (times >= a) & ((times <= b) if last else (times < b))
        if mask.any():
            samples[mask] = sol.sol(times[mask]).T
        y = sol.y[:, -1]

    rhos = samples[:, :dd].reshape(-1, d, d)
    pops = np.real(np.diagonal(rhos, axis1=1, axis2=2))
    levels = pops.reshape(-1, qops.EMITTER_DIM, gen.space.cavity_dim).sum(axis=2)
    photons = pops @ n_diag
    top = pops.reshape(-1, qops.EMITTER_DIM, gen.space.cavity_dim)[:, :, -1].sum(axis=1)
    trace_err = np.abs(np.trace(rhos, axis1=1, axis2=2) - 1.0)
    herm_err = np.max(np.abs(rhos - np.conj(np.transpose(rhos, (0, 2, 1)))), axis=(1, 2))
    diag_idx = np.arange(0, times.size, max(int(diag_stride), 1))
    if diag_idx[-1] != times.size - 1:
        diag_idx = np.append(diag_idx, times.size - 1)
    herm_part = 0.5 * (rhos[diag_idx] + np.conj(np.transpose(rhos[diag_idx], (0, 2, 1))))
    min_eig = np.linalg.eigvalsh(herm_part)[:, 0]

    traj = Trajectory(
        times=times,
        pop_ground=levels[:, 0],
        pop_exciton=levels[:, 1],
        pop_pump=levels[:, 2],
        photon_number=photons,
        emission_rate=kappa * photons,
        detuning=np.asarray(schedule(times), dtype=float) * np.ones_like(times),
        trace_error=trace_err,
        hermiticity_error=herm_err,
        top_fock_population=top,
        diagnostic_times=times[diag_idx],
        min_eigenvalue=min_eig,
        emitted_cavity=np.real(samples[:, dd]),
        emitted_leaky=np.real(samples[:, dd + 1]),
        pumped=np.real(samples[:, dd + 2]),
        final_state=rhos[-1].copy(),
        kappa_cav=kappa,
        n_steps=n_steps,
        n_rhs=n_rhs,
        states=rhos.copy() if store_states else None,
    )
    if check_health:
        check_trajectory_health(traj)
    return traj


def check_trajectory_health(traj):
    """Raise :class:`NumericalHealthError` on the first violated bound; warn on truncation."""
    checks = [
        ("trace", traj.times, traj.trace_error, traj.trace_error >= TRACE_TOL),
        ("hermiticity", traj.times, traj.hermiticity_error, traj.hermiticity_error >= HERMITICITY_TOL),
        ("positivity", traj.diagnostic_times, traj.min_eigenvalue, traj.min_eigenvalue < -EIGENVALUE_TOL),
    ]
    for kind, t, values, bad in checks:
        if np.any(bad):
            i = int(np.argmax(bad))
            raise NumericalHealthError(kind, float(t[i]), float(values[i]))
    if np.max(traj.top_fock_population) >= TRUNCATION_TOL:
        i = int(np.argmax(traj.top_fock_population))
        warnings.warn(
            f"top Fock level population {traj.top_fock_population[i]:.2e} at t = {traj.times[i]:.4g} ns; "
            "increase n_fock",
            TruncationWarning,
            stacklevel=3,
        )

