"""Sphere and torus Hamiltonian families over the control angles (theta, phi).

Both families share the control schedule

    delta(theta) = delta1 cos(theta) + delta2
    omega(theta) = omega1 sin(theta)

and differ in where the two fields enter the Bloch vector: the sphere puts the
drive in the equatorial plane and the detuning on z; the torus swaps them.
All frequencies are angular, in rad/us.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import GeometricSingularity
from .qcore import pauli_compose

TWO_PI = 2.0 * math.pi
EPS_GEO = 1e-9


class Kind(str, enum.Enum):
    SPHERE = "sphere"
    TORUS = "torus"


@dataclass(frozen=True)
class ManifoldSpec:
    kind: Kind
    delta1: float
    delta2: float
    omega1: float

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        for name in ("delta1", "delta2", "omega1"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.delta1 <= 0:
            raise ValueError("delta1 must be positive")
        if self.omega1 <= 0:
            raise ValueError("omega1 must be positive")

    @classmethod
    def from_mhz(cls, kind, delta1_over_2pi_mhz, delta2_over_delta1, omega1_over_2pi_mhz):
        """Build from lab-style values f/2pi in MHz; stored as rad/us."""
        delta1 = TWO_PI * delta1_over_2pi_mhz
        return cls(kind, delta1, delta2_over_delta1 * delta1, TWO_PI * omega1_over_2pi_mhz)

    def with_delta2(self, delta2):
        return ManifoldSpec(self.kind, self.delta1, delta2, self.omega1)

    @property
    def theta_range(self) -> float:
        return theta_range(self.kind)


class SurfacePoint(NamedTuple):
    theta: float
    phi: float


def theta_range(kind) -> float:
    return math.pi if Kind(kind) is Kind.SPHERE else TWO_PI


def control_fields(spec: ManifoldSpec, theta):
    """(detuning, Rabi frequency) at control angle theta.  Works on arrays."""
    return spec.delta1 * np.cos(theta) + spec.delta2, spec.omega1 * np.sin(theta)


def radial_axial(spec: ManifoldSpec, theta):
    """Split the Bloch vector into signed cylindrical radius and z component.

    Both families are surfaces of revolution about z, so
    ``bloch = (rho cos(phi), rho sin(phi), z)``.
    """
    delta, omega = control_fields(spec, theta)
    if spec.kind is Kind.SPHERE:
        return omega, delta
    return delta, omega


def radial_axial_dtheta(spec: ManifoldSpec, theta):
    d_delta = -spec.delta1 * np.sin(theta)
    d_omega = spec.omega1 * np.cos(theta)
    if spec.kind is Kind.SPHERE:
        return d_omega, d_delta
    return d_delta, d_omega


def bloch_vector(spec: ManifoldSpec, theta, phi) -> np.ndarray:
    rho, z = radial_axial(spec, theta)
    return np.stack(np.broadcast_arrays(rho * np.cos(phi), rho * np.sin(phi), z), axis=-1)


def bloch_norm(spec: ManifoldSpec, theta):
    rho, z = radial_axial(spec, theta)
    return np.hypot(rho, z)


def hamiltonian(spec: ManifoldSpec, theta: float, phi: float) -> np.ndarray:
    return pauli_compose(bloch_vector(spec, theta, phi))


def hamiltonian_gradients(spec: ManifoldSpec, theta: float, phi: float):
    """Analytic (dH/dtheta, dH/dphi)."""
    rho, _ = radial_axial(spec, theta)
    d_rho, d_z = radial_axial_dtheta(spec, theta)
    c, s = math.cos(phi), math.sin(phi)
    dh_dtheta = pauli_compose((d_rho * c, d_rho * s, d_z))
    dh_dphi = pauli_compose((-rho * s, rho * c, 0.0))
    return dh_dtheta, dh_dphi


def gaussian_curvature(spec: ManifoldSpec, theta, phi=0.0, eps=EPS_GEO):
    """Gaussian curvature of the embedded surface, in 1/(rad/us)^2.

    The closed forms are those of the round cases (delta1 == omega1).
    """
    if spec.kind is Kind.SPHERE:
        return np.broadcast_to(1.0 / spec.omega1**2, np.shape(theta))[()]
    ring = spec.delta2 + spec.delta1 * np.cos(theta)
    if np.any(np.abs(ring) <= eps):
        raise GeometricSingularity(
            f"torus pinch: delta2 + delta1 cos(theta) = {np.min(np.abs(ring)):.3g}"
        )
    return np.cos(theta) / (spec.delta1 * ring)


def area_element_density(spec: ManifoldSpec, theta, phi=0.0):
    """Signed area density in (rad/us)^2; negative on the inner sheet of a spindle torus."""
    if spec.kind is Kind.SPHERE:
        return spec.omega1**2 * np.sin(theta)
    return spec.delta1 * (spec.delta2 + spec.delta1 * np.cos(theta))


def curvature_times_area(spec: ManifoldSpec, theta):
    """K * area density with the cancellation done by hand (never divides)."""
    if spec.kind is Kind.SPHERE:
        return np.sin(theta)
    return np.cos(theta)


def theta_quadrature(kind, n: int):
    """Nodes and weights over the full theta range of a manifold kind.

    The torus integrand is 2pi-periodic in theta, so the periodic trapezoid rule
    (spectrally accurate) is used.  Over the sphere's [0, pi] the integrand is
    not periodic and the trapezoid rule is only O(h^2), so Gauss-Legendre is used.
    """
    if n < 2:
        raise ValueError("need at least two quadrature nodes")
    if Kind(kind) is Kind.TORUS:
        return periodic_quadrature(n)
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * math.pi
    return half * (x + 1.0), half * w


def periodic_quadrature(n: int):
    nodes = TWO_PI * np.arange(n) / n
    return nodes, np.full(n, TWO_PI / n)


def euler_characteristic(spec: ManifoldSpec, n_theta: int = 256, n_phi: int = 256) -> float:
    if n_theta < 8 or n_phi < 8:
        raise ValueError("n_theta and n_phi must be >= 8")
    th, wt = theta_quadrature(spec.kind, n_theta)
    _, wp = periodic_quadrature(n_phi)
    integrand = np.broadcast_to(curvature_times_area(spec, th)[:, None], (n_theta, n_phi))
    return float(wt @ integrand @ wp / TWO_PI)


def minimum_gap(spec: ManifoldSpec, n_theta: int = 256) -> float:
    """Smallest |bloch vector| over the manifold (phi-independent).

    Zero means the surface touches the degeneracy.  Degeneracies need
    sin(theta) = 0, so those angles are always sampled exactly.
    """
    if n_theta < 64:
        raise ValueError("n_theta must be >= 64")
    top = spec.theta_range
    special = np.arange(0.0, top + 0.5 * math.pi, math.pi)
    special = special[special <= top]
    grid = np.union1d(np.linspace(0.0, top, n_theta), special)
    norms = bloch_norm(spec, grid)
    k = int(np.argmin(norms))
    best = float(norms[k])
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    if best > 0.0 and hi > lo:
        res = minimize_scalar(
            lambda t: float(bloch_norm(spec, t)) ** 2,
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        best = min(best, math.sqrt(max(res.fun, 0.0)))
    return best
