"""Geometry of the instantaneous eigenstate bundle.

Curvature sign convention: with A = i<psi|d psi> and B = d_theta A_phi -
d_phi A_theta, the ground band of the delta2 = 0 sphere has Chern number +1.
The excited band is always the exact negation of the ground band.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePoint, GaugeDiscontinuity, UndefinedChern
from .manifold import (
    TWO_PI,
    Kind,
    ManifoldSpec,
    bloch_norm,
    hamiltonian,
    hamiltonian_gradients,
    minimum_gap,
    periodic_quadrature,
    radial_axial,
    radial_axial_dtheta,
    theta_quadrature,
)
from .qcore import anchor_index, eig2, gauge_fix

EPS_GAP = 1e-9
DEFAULT_H = 1e-5
ANCHOR_MIN_MODULUS = 1e-6
# below this |delta| the closed-form eigenvectors are 0/0 and eig2 takes over
CLOSED_FORM_DELTA_FLOOR = 1e-12


class Band(str, enum.Enum):
    GROUND = "ground"
    EXCITED = "excited"

    @property
    def sign(self) -> int:
        return 1 if self is Band.GROUND else -1


@dataclass(frozen=True)
class QGTensor:
    q_tt: complex
    q_tp: complex
    q_pt: complex
    q_pp: complex

    @property
    def curvature(self) -> float:
        return -2.0 * self.q_tp.imag

    @property
    def metric(self) -> np.ndarray:
        return np.array([[self.q_tt.real, self.q_tp.real], [self.q_pt.real, self.q_pp.real]])


def _require_gap(norm, what="point"):
    if np.any(np.asarray(norm) <= EPS_GAP):
        raise DegeneratePoint(f"level splitting vanishes at {what}")


def eigenstates_closed_form(delta: float, omega: float, phi: float):
    """Eigenstates of the torus-form Hamiltonian (1/2)[[omega, delta e^-i phi], [delta e^i phi, -omega]].

    Returns ``(psi_e, psi_g)``.  The e-amplitude is delta/2 over the norm, as in
    the textbook closed form; the g-amplitude uses the identity
    (E - omega/2)(E + omega/2) = delta^2/4 where a direct subtraction would cancel.
    """
    norm = math.hypot(delta, omega)
    if norm <= EPS_GAP:
        raise DegeneratePoint(f"delta={delta!r}, omega={omega!r}")
    if abs(delta) < CLOSED_FORM_DELTA_FLOOR:
        h = 0.5 * np.array(
            [[omega, delta * np.exp(-1j * phi)], [delta * np.exp(1j * phi), -omega]]
        )
        _, _, psi_g, psi_e = eig2(h)
        return psi_e, psi_g

    phase = complex(math.cos(phi), math.sin(phi))
    out = []
    for energy in (0.5 * norm, -0.5 * norm):
        half_omega = 0.5 * omega
        if (energy > 0) == (half_omega > 0):
            lower = 0.25 * delta * delta / (energy + half_omega)
        else:
            lower = energy - half_omega
        scale = math.sqrt(0.25 * delta * delta + lower * lower)
        out.append(np.array([0.5 * delta / scale, phase * lower / scale], dtype=complex))
    return out[0], out[1]


def berry_curvature_matrix_element(spec: ManifoldSpec, theta: float, phi: float, band=Band.GROUND) -> float:
    """Curvature from the off-diagonal matrix elements of dH over the squared gap."""
    band = Band(band)
    e_g, e_e, psi_g, psi_e = eig2(hamiltonian(spec, theta, phi))
    gap = e_e - e_g
    _require_gap(gap)
    dh_t, dh_p = hamiltonian_gradients(spec, theta, phi)
    if band is Band.GROUND:
        n, m = psi_g, psi_e
    else:
        n, m = psi_e, psi_g
    x = np.vdot(n, dh_t @ m) * np.vdot(m, dh_p @ n)
    y = np.vdot(n, dh_p @ m) * np.vdot(m, dh_t @ n)
    return float(-(x - y).imag / gap**2)


def berry_curvature_closed_form(spec: ManifoldSpec, theta, phi=0.0, band=Band.GROUND):
    band = Band(band)
    theta = np.asarray(theta, dtype=float)
    norm = bloch_norm(spec, theta)
    _require_gap(norm)
    d1, d2, o1 = spec.delta1, spec.delta2, spec.omega1
    c, s = np.cos(theta), np.sin(theta)
    if spec.kind is Kind.SPHERE:
        b = o1**2 * s * (d2 * c + d1) / (2.0 * norm**3)
    else:
        b = -o1 * (2.0 * (d1**2 + d2**2) * c + d2 * d1 * (np.cos(2.0 * theta) + 3.0)) / (4.0 * norm**3)
    return (band.sign * b)[()]


def berry_curvature_bloch(spec: ManifoldSpec, theta, phi=0.0, band=Band.GROUND):
    """Half the solid-angle density swept by the normalized Bloch vector."""
    band = Band(band)
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    rho, z = radial_axial(spec, theta)
    d_rho, d_z = radial_axial_dtheta(spec, theta)
    c, s = np.cos(phi), np.sin(phi)
    v = np.stack([rho * c, rho * s, z], axis=-1)
    dv_t = np.stack([d_rho * c, d_rho * s, d_z], axis=-1)
    dv_p = np.stack([-rho * s, rho * c, np.zeros_like(rho)], axis=-1)
    norm = np.linalg.norm(v, axis=-1)
    _require_gap(norm)
    unit = v / norm[..., None]

    def d_unit(dv):
        return (dv - unit * np.sum(unit * dv, axis=-1, keepdims=True)) / norm[..., None]

    triple = np.sum(unit * np.cross(d_unit(dv_t), d_unit(dv_p)), axis=-1)
    return (band.sign * 0.5 * triple)[()]


def _band_state(spec, theta, phi, band, anchor):
    e_g, e_e, psi_g, psi_e = eig2(hamiltonian(spec, theta, phi))
    if e_e - e_g <= 10 * EPS_GAP:
        raise DegeneratePoint(f"gap {e_e - e_g:.3g} on stencil at theta={theta!r}")
    psi = psi_g if band is Band.GROUND else psi_e
    if abs(psi[anchor]) < ANCHOR_MIN_MODULUS:
        raise GaugeDiscontinuity(f"anchor amplitude {abs(psi[anchor]):.3g} at theta={theta!r}, phi={phi!r}")
    return gauge_fix(psi, anchor)


def _stencil(spec, theta, phi, band, h, anchor):
    """Center state and central-difference derivatives, all in one smooth gauge.

    The gauge anchor is chosen at the center and held fixed across the stencil,
    so a tie between amplitude moduli cannot flip the gauge mid-difference.
    """
    band = Band(band)
    if anchor is None:
        _, _, psi_g, psi_e = eig2(hamiltonian(spec, theta, phi))
        anchor = anchor_index(psi_g if band is Band.GROUND else psi_e)
    psi = _band_state(spec, theta, phi, band, anchor)
    d_t = (_band_state(spec, theta + h, phi, band, anchor) - _band_state(spec, theta - h, phi, band, anchor)) / (2 * h)
    d_p = (_band_state(spec, theta, phi + h, band, anchor) - _band_state(spec, theta, phi - h, band, anchor)) / (2 * h)
    return psi, d_t, d_p


def qgt_numeric(spec: ManifoldSpec, theta: float, phi: float, band=Band.GROUND, h: float = DEFAULT_H, anchor=None) -> QGTensor:
    psi, d_t, d_p = _stencil(spec, theta, phi, band, h, anchor)
    derivs = (d_t, d_p)

    def q(mu, nu):
        a, b = derivs[mu], derivs[nu]
        return complex(np.vdot(a, b) - np.vdot(a, psi) * np.vdot(psi, b))

    return QGTensor(q(0, 0), q(0, 1), q(1, 0), q(1, 1))


def berry_connection_numeric(spec: ManifoldSpec, theta: float, phi: float, band=Band.GROUND, h: float = DEFAULT_H, anchor=None):
    """(A_theta, A_phi) = i<psi|d psi> in the module gauge (gauge dependent!)."""
    psi, d_t, d_p = _stencil(spec, theta, phi, band, h, anchor)
    return float((1j * np.vdot(psi, d_t)).real), float((1j * np.vdot(psi, d_p)).real)


def chern_closed_form_sphere(delta1: float, delta2: float) -> float:
    if abs(abs(delta1) - abs(delta2)) <= EPS_GAP:
        raise UndefinedChern(f"Chern number undefined at |delta1| = |delta2| = {abs(delta1)!r}")
    return 0.5 * (math.copysign(1.0, delta1 - delta2) + math.copysign(1.0, delta1 + delta2))


def chern_conventional(spec: ManifoldSpec, band=Band.GROUND, n_theta: int = 256, n_phi: int = 256) -> float:
    """(1/2pi) * surface integral of the closed-form curvature."""
    if spec.kind is Kind.SPHERE and abs(abs(spec.delta1) - abs(spec.delta2)) <= EPS_GAP:
        raise UndefinedChern("sphere passes through the degeneracy (|delta1| = |delta2|)")
    if minimum_gap(spec, max(n_theta, 64)) <= EPS_GAP:
        raise DegeneratePoint("manifold touches the degeneracy")
    th, wt = theta_quadrature(spec.kind, n_theta)
    _, wp = periodic_quadrature(n_phi)
    b = berry_curvature_closed_form(spec, th, 0.0, band)
    integrand = np.broadcast_to(b[:, None], (n_theta, n_phi))
    return float(wt @ integrand @ wp / TWO_PI)
