"""Driven-qubit dynamics along linear theta ramps.

The master equation

    d rho/dt = i [rho, H(t)] + D[L1] rho / T1 + D[sigma_z] rho / (2 T_phi)

is integrated with fixed-step classical RK4.  The density matrix is carried as
its four real Hermitian components (rho_ee, rho_gg, Re rho_eg, Im rho_eg); the
closed system is the same code path with the dissipators switched off.

Every arithmetic step is an elementwise float64 operation on arrays indexed by
batch row, with all time-dependent scalars shared, so the result for one row
does not depend on which other rows are integrated alongside it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import DegeneratePoint, StepTooLarge
from .manifold import Kind, ManifoldSpec, bloch_norm, hamiltonian, theta_range
from .qcore import KET_G, check_density, eig2, projector
from .spectral import EPS_GAP

START_STATES = ("instantaneous", "bare")
STEP_LIMIT = 0.1  # max ||H|| dt before refusing to integrate
STEP_TARGET = 0.01  # ||H|| dt used by the default step rule
MIN_STEPS = 2000


@dataclass(frozen=True)
class RampProtocol:
    """theta(t) = theta_start + (theta_end - theta_start) t / tau at fixed phi.

    ``start_state`` selects the state the ramp begins from: "instantaneous" is
    the ground eigenstate of H(theta_start); "bare" is the qubit's |g>, i.e. what
    a projective readout into the ground state prepares.
    """

    theta_start: float
    theta_end: float
    tau: float
    phi_fixed: float = 0.0
    start_state: str = "instantaneous"

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.theta_end == self.theta_start:
            raise ValueError("theta_end must differ from theta_start")
        if self.start_state not in START_STATES:
            raise ValueError(f"start_state must be one of {START_STATES}")

    @classmethod
    def full_sweep(cls, kind, tau, start_state="instantaneous"):
        """Ramp over the whole theta range of a manifold kind (pi or 2pi)."""
        return cls(0.0, theta_range(kind), tau, 0.0, start_state)

    @property
    def span(self) -> float:
        return self.theta_end - self.theta_start

    @property
    def velocity(self) -> float:
        return self.span / self.tau

    def theta_at(self, t):
        return self.theta_start + self.span * np.asarray(t) / self.tau


@dataclass(frozen=True)
class NoiseSpec:
    t1: float
    t2_star: float
    # the literal lowering operator sigma_x - i sigma_y = 2|g><e| makes the decay rate 4/T1
    paper_literal_sigma_minus: bool = False

    def __post_init__(self):
        if not self.t1 > 0:
            raise ValueError("t1 must be positive")
        if not 0 < self.t2_star <= 2 * self.t1:
            raise ValueError("t2_star must lie in (0, 2 t1]")


def dephasing_rate(noise: NoiseSpec) -> float:
    """Pure dephasing rate 1/T_phi = 1/T2* - 1/(2 T1), in 1/us."""
    return max(0.0, 1.0 / noise.t2_star - 1.0 / (2.0 * noise.t1))


def _rates(noise: Optional[NoiseSpec]):
    if noise is None:
        return 0.0, 0.0
    relax = 1.0 / noise.t1
    if noise.paper_literal_sigma_minus:
        relax *= 4.0
    return relax, 0.5 * relax + dephasing_rate(noise)


class TrajectorySample(NamedTuple):
    t: float
    theta: float
    rho: np.ndarray
    sigma_y_expect: float


@dataclass(frozen=True)
class Trajectory:
    """Samples of one integration, stored column-wise.

    ``rho_ee``, ``rho_gg``, ``rho_eg`` are 1-D arrays over samples; full density
    matrices are assembled on demand.
    """

    t: np.ndarray
    theta: np.ndarray
    rho_ee: np.ndarray
    rho_gg: np.ndarray
    rho_eg: np.ndarray
    protocol: RampProtocol
    spec: ManifoldSpec
    noise: Optional[NoiseSpec] = None

    def __len__(self):
        return len(self.t)

    @property
    def sigma_y(self) -> np.ndarray:
        # Tr(rho sigma_y) = i (rho_eg - rho_ge) = -2 Im rho_eg
        return -2.0 * self.rho_eg.imag

    @property
    def sigma_z(self) -> np.ndarray:
        return self.rho_ee - self.rho_gg

    @property
    def trace(self) -> np.ndarray:
        return self.rho_ee + self.rho_gg

    @property
    def rho(self) -> np.ndarray:
        out = np.empty((len(self.t), 2, 2), dtype=complex)
        out[:, 0, 0] = self.rho_ee
        out[:, 1, 1] = self.rho_gg
        out[:, 0, 1] = self.rho_eg
        out[:, 1, 0] = self.rho_eg.conj()
        return out

    @property
    def final_rho(self) -> np.ndarray:
        return self.rho[-1]

    def __getitem__(self, k) -> TrajectorySample:
        rho = np.array(
            [[self.rho_ee[k], self.rho_eg[k]], [np.conj(self.rho_eg[k]), self.rho_gg[k]]],
            dtype=complex,
        )
        return TrajectorySample(float(self.t[k]), float(self.theta[k]), rho, float(self.sigma_y[k]))

    @property
    def samples(self):
        return [self[k] for k in range(len(self))]


@dataclass
class BatchRun:
    """Output of :func:`integrate_batch`; component arrays are (n_samples, n_rows)."""

    t: np.ndarray
    theta: np.ndarray
    rho_ee: np.ndarray
    rho_gg: np.ndarray
    rho_eg_re: np.ndarray
    rho_eg_im: np.ndarray
    dt: float
    meta: dict = field(default_factory=dict)

    def row(self, i, protocol, spec, noise=None) -> Trajectory:
        return Trajectory(
            self.t,
            self.theta,
            np.ascontiguousarray(self.rho_ee[:, i]),
            np.ascontiguousarray(self.rho_gg[:, i]),
            self.rho_eg_re[:, i] + 1j * self.rho_eg_im[:, i],
            protocol,
            spec,
            noise,
        )


def max_hamiltonian_norm(specs, protocol: RampProtocol, n: int = 4097) -> float:
    """Largest spectral norm |bloch|/2 met along the ramp, over all specs."""
    theta = np.linspace(protocol.theta_start, protocol.theta_end, n)
    return max(float(np.max(bloch_norm(s, theta))) for s in specs) / 2.0


def default_dt(specs, protocol: RampProtocol) -> float:
    if isinstance(specs, ManifoldSpec):
        specs = [specs]
    hmax = max_hamiltonian_norm(specs, protocol)
    dt = protocol.tau / MIN_STEPS
    if hmax > 0:
        dt = min(dt, STEP_TARGET / hmax)
    return dt


def step_count(dt: float, tau: float, multiple_of: int = 1) -> int:
    """Number of equal steps covering tau with step at most dt."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if dt > tau * (1 + 1e-12):
        raise ValueError(f"dt={dt!r} exceeds tau={tau!r}")
    n = max(1, math.ceil(tau / dt - 1e-9))
    return multiple_of * math.ceil(n / multiple_of)


def prepare_ground(spec: ManifoldSpec, protocol: RampProtocol) -> np.ndarray:
    e_g, e_e, psi_g, _ = eig2(hamiltonian(spec, protocol.theta_start, protocol.phi_fixed))
    if e_e - e_g <= EPS_GAP:
        raise DegeneratePoint(f"no gap at theta_start={protocol.theta_start!r}")
    return projector(psi_g)


def prepare_initial(spec: ManifoldSpec, protocol: RampProtocol) -> np.ndarray:
    if protocol.start_state == "bare":
        return projector(KET_G)
    return prepare_ground(spec, protocol)


def integrate_batch(specs, protocol: RampProtocol, rho0s, noise=None, n_steps=None, dt=None) -> BatchRun:
    """RK4 for many specs of one kind along a shared time grid.

    ``rho0s`` is a sequence of 2x2 initial density matrices, one per spec.
    Either ``n_steps`` or ``dt`` may fix the grid; otherwise the default rule
    applies.  The grid always ends exactly at t = tau.
    """
    specs = list(specs)
    kinds = {s.kind for s in specs}
    if len(kinds) != 1:
        raise ValueError("all specs in a batch must share a manifold kind")
    kind = kinds.pop()
    if n_steps is None:
        n_steps = step_count(dt if dt is not None else default_dt(specs, protocol), protocol.tau)
    n_steps = int(n_steps)
    step = protocol.tau / n_steps
    hmax = max_hamiltonian_norm(specs, protocol)
    if hmax * step > STEP_LIMIT:
        raise StepTooLarge(f"||H|| dt = {hmax * step:.3g} exceeds {STEP_LIMIT}")

    d1 = np.array([s.delta1 for s in specs])
    d2 = np.array([s.delta2 for s in specs])
    o1 = np.array([s.omega1 for s in specs])
    relax, decoh = _rates(noise)
    cphi, sphi = math.cos(protocol.phi_fixed), math.sin(protocol.phi_fixed)
    sphere = kind is Kind.SPHERE
    th0, span = protocol.theta_start, protocol.span

    def rhs(frac, p, r, qr, qi):
        theta = th0 + span * frac
        c, s = math.cos(theta), math.sin(theta)
        delta = d1 * c + d2
        omega = o1 * s
        radial, axial = (omega, delta) if sphere else (delta, omega)
        # H_ee = axial/2, H_eg = (x - i y)/2
        two_h = axial
        wr = 0.5 * cphi * radial
        wi = -0.5 * sphi * radial
        pop = r - p
        flow = 2.0 * (wi * qr - wr * qi)
        dp = flow - relax * p
        dr = -flow + relax * p
        dqr = two_h * qi + wi * pop - decoh * qr
        dqi = -(two_h * qr + wr * pop) - decoh * qi
        return dp, dr, dqr, dqi

    rho0s = [check_density(r) for r in rho0s]
    if len(rho0s) != len(specs):
        raise ValueError("need one initial state per spec")
    n_rows = len(specs)
    shape = (n_steps + 1, n_rows)
    out = [np.empty(shape) for _ in range(4)]
    state = [
        np.array([r[0, 0].real for r in rho0s]),
        np.array([r[1, 1].real for r in rho0s]),
        np.array([r[0, 1].real for r in rho0s]),
        np.array([r[0, 1].imag for r in rho0s]),
    ]
    for buf, comp in zip(out, state):
        buf[0] = comp

    half = 0.5 * step
    sixth = step / 6.0
    for k in range(n_steps):
        f0 = k / n_steps
        fm = (k + 0.5) / n_steps
        f1 = (k + 1) / n_steps
        k1 = rhs(f0, *state)
        k2 = rhs(fm, *(x + half * d for x, d in zip(state, k1)))
        k3 = rhs(fm, *(x + half * d for x, d in zip(state, k2)))
        k4 = rhs(f1, *(x + step * d for x, d in zip(state, k3)))
        state = [
            x + sixth * (a + 2.0 * b + 2.0 * c + d)
            for x, a, b, c, d in zip(state, k1, k2, k3, k4)
        ]
        for buf, comp in zip(out, state):
            buf[k + 1] = comp

    frac = np.arange(n_steps + 1) / n_steps
    t = protocol.tau * frac
    theta = th0 + span * frac
    return BatchRun(t, theta, *out, dt=step)


def _evolve(spec, protocol, rho0, noise, dt):
    run = integrate_batch([spec], protocol, [rho0], noise=noise, dt=dt)
    return run.row(0, protocol, spec, noise)


def evolve_closed(spec: ManifoldSpec, protocol: RampProtocol, rho0, dt=None) -> Trajectory:
    return _evolve(spec, protocol, rho0, None, dt)


def evolve_lindblad(spec: ManifoldSpec, protocol: RampProtocol, rho0, noise: NoiseSpec, dt=None) -> Trajectory:
    return _evolve(spec, protocol, rho0, noise, dt)


def sigma_y_profile(traj: Trajectory) -> np.ndarray:
    """(theta, <sigma_y>) pairs, one row per sample."""
    return np.column_stack([traj.theta, traj.sigma_y])
