"""Berry curvature from the non-adiabatic response to a theta ramp.

Ramping theta at velocity v while phi is held at 0, the first-order response
of <dH/dphi> is v * B(theta).  At phi = 0, dH/dphi = (radial/2) sigma_y where
radial is the signed cylindrical radius of the Bloch vector (omega1 sin(theta)
on the sphere, delta1 cos(theta) + delta2 on the torus), so

    B_dyn(theta) = radial(theta) * <sigma_y> / (2 v).

Integrating B_dyn over the ramp gives the dynamical Chern number, which is not
rounded: away from the adiabatic limit it is genuinely non-integer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import IncompleteSweep
from .evolution import (
    NoiseSpec,
    RampProtocol,
    Trajectory,
    default_dt,
    integrate_batch,
    prepare_initial,
    step_count,
)
from .manifold import Kind, ManifoldSpec, radial_axial, theta_range
from .spectral import chern_closed_form_sphere


@dataclass(frozen=True)
class CurvatureProfile:
    theta: np.ndarray
    b_dyn: np.ndarray
    sigma_y: np.ndarray
    spec: ManifoldSpec
    protocol: RampProtocol
    trajectory: Optional[Trajectory] = None

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.theta, self.b_dyn])


def generalized_force(rho, dh_dphi) -> float:
    """F_phi = -Tr(rho dH/dphi)."""
    return float(-np.trace(np.asarray(rho) @ np.asarray(dh_dphi)).real)


def response_prefactor(spec: ManifoldSpec, theta):
    """Coefficient of sigma_y in 2 dH/dphi at phi = 0."""
    radial, _ = radial_axial(spec, theta)
    return radial


def profile_from_trajectory(traj: Trajectory) -> CurvatureProfile:
    protocol = traj.protocol
    sy = traj.sigma_y
    b = response_prefactor(traj.spec, traj.theta) * sy / (2.0 * protocol.velocity)
    return CurvatureProfile(traj.theta, b, sy, traj.spec, protocol, traj)


def _check_phi(protocol):
    if protocol.phi_fixed != 0.0:
        raise ValueError("dynamical curvature extraction needs phi_fixed = 0")


def curvature_profiles(
    specs: Sequence[ManifoldSpec],
    protocol: RampProtocol,
    noise: Optional[NoiseSpec] = None,
    dt: Optional[float] = None,
    n_steps: Optional[int] = None,
):
    """Profiles for several specs of one kind, integrated on one shared grid."""
    _check_phi(protocol)
    specs = list(specs)
    rho0s = [prepare_initial(s, protocol) for s in specs]
    run = integrate_batch(specs, protocol, rho0s, noise=noise, n_steps=n_steps, dt=dt)
    return [profile_from_trajectory(run.row(i, protocol, s, noise)) for i, s in enumerate(specs)]


def dynamical_curvature_profile(
    spec: ManifoldSpec,
    protocol: RampProtocol,
    noise: Optional[NoiseSpec] = None,
    dt: Optional[float] = None,
) -> CurvatureProfile:
    return curvature_profiles([spec], protocol, noise, dt=dt)[0]


def dynamical_chern(profile: CurvatureProfile) -> float:
    """Trapezoid integral of B_dyn over the full theta range."""
    theta, b = profile.theta, profile.b_dyn
    full = theta_range(profile.spec.kind)
    covered = abs(theta[-1] - theta[0])
    step = abs(theta[1] - theta[0]) if len(theta) > 1 else full
    if abs(covered - full) > step:
        raise IncompleteSweep(f"profile spans {covered:.6g} rad, need {full:.6g}")
    if theta[-1] < theta[0]:
        theta, b = theta[::-1], b[::-1]
    return float(np.trapezoid(b, theta))


def convergence_study(
    spec: ManifoldSpec,
    taus: Sequence[float],
    dt_rule: Optional[Callable[[ManifoldSpec, RampProtocol], float]] = None,
    start_state: str = "instantaneous",
):
    """|dynamical Chern - exact sphere Chern| for each ramp time."""
    if spec.kind is not Kind.SPHERE:
        raise ValueError("convergence study is defined for the sphere")
    exact = chern_closed_form_sphere(spec.delta1, spec.delta2)
    rule = dt_rule or default_dt
    rows = []
    for tau in taus:
        protocol = RampProtocol.full_sweep(Kind.SPHERE, tau, start_state)
        n = step_count(rule(spec, protocol), tau)
        profile = curvature_profiles([spec], protocol, n_steps=n)[0]
        rows.append((float(tau), abs(dynamical_chern(profile) - exact)))
    return rows
