"""Independent cross-checks for the production geometry and dynamics.

The oracle operations here get eigenvectors from LAPACK (numpy.linalg.eigh)
and measure curvature as gauge-invariant Wilson-loop phases, so they share no
code with the closed-form or matrix-element curvature routes.  Only
:func:`run_all_oracles` touches production code, to compare against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import evolution, manifold, qcore, spectral
from .errors import DegeneratePoint
from .manifold import TWO_PI, Kind, ManifoldSpec, hamiltonian

ORACLE_MIN_GAP = 1e-8
SEED = 20240617


@dataclass(frozen=True)
class OracleReport:
    name: str
    max_abs_error: float
    samples: int
    passed: bool
    tolerance: float

    @classmethod
    def from_errors(cls, name, errors, tolerance):
        errors = np.abs(np.asarray(errors, dtype=float))
        worst = float(errors.max()) if errors.size else 0.0
        return cls(name, worst, int(errors.size), bool(worst <= tolerance), float(tolerance))


def _band_vector(spec, theta, phi, band):
    vals, vecs = np.linalg.eigh(hamiltonian(spec, theta, phi))
    if vals[1] - vals[0] <= ORACLE_MIN_GAP:
        raise DegeneratePoint(f"gap {vals[1] - vals[0]:.3g} at theta={theta!r}")
    return vecs[:, 0 if spectral.Band(band) is spectral.Band.GROUND else 1]


def _loop_phase(corners):
    """Berry phase around a closed loop of states: -arg prod <psi_k|psi_k+1>."""
    prod = 1.0 + 0.0j
    for a, b in zip(corners, corners[1:] + corners[:1]):
        prod *= np.vdot(a, b)
    return -float(np.angle(prod))


def oracle_curvature_fd(spec: ManifoldSpec, theta: float, phi: float, band="ground", h: float = 1e-3) -> float:
    """Plaquette estimate of B(theta, phi): Berry phase of an h x h cell over its area."""
    _band_vector(spec, theta, phi, band)  # the curvature is undefined at a degenerate center
    lo_t, hi_t = theta - 0.5 * h, theta + 0.5 * h
    lo_p, hi_p = phi - 0.5 * h, phi + 0.5 * h
    corners = [
        _band_vector(spec, lo_t, lo_p, band),
        _band_vector(spec, hi_t, lo_p, band),
        _band_vector(spec, hi_t, hi_p, band),
        _band_vector(spec, lo_t, hi_p, band),
    ]
    return _loop_phase(corners) / h**2


def oracle_chern_plaquette(spec: ManifoldSpec, band="ground", n: int = 64) -> float:
    """Lattice first Chern number: total plaquette flux over 2pi on an n x n mesh."""
    top = manifold.theta_range(spec.kind)
    periodic_theta = spec.kind is Kind.TORUS
    n_rows = n if periodic_theta else n + 1
    thetas = top * np.arange(n_rows) / n
    phis = TWO_PI * np.arange(n) / n
    states = [[_band_vector(spec, t, p, band) for p in phis] for t in thetas]
    total = 0.0
    for i in range(n):
        i1 = (i + 1) % n_rows
        for j in range(n):
            j1 = (j + 1) % n
            total += _loop_phase([states[i][j], states[i1][j], states[i1][j1], states[i][j1]])
    return total / TWO_PI


def random_points(rng, count, min_gap=0.3, kinds=(Kind.SPHERE, Kind.TORUS)):
    """Deterministic sample of (spec, theta, phi) with |bloch| >= min_gap."""
    out = []
    while len(out) < count:
        kind = kinds[int(rng.integers(len(kinds)))]
        spec = ManifoldSpec(kind, rng.uniform(0.5, 2.0), rng.uniform(-3.0, 3.0), rng.uniform(0.5, 2.0))
        theta = rng.uniform(0.0, spec.theta_range)
        phi = rng.uniform(0.0, TWO_PI)
        if float(manifold.bloch_norm(spec, theta)) >= min_gap:
            out.append((spec, theta, phi))
    return out


def random_gapped_specs(rng, count, kind, ratio_range=(-4.27, 4.27), margin=0.2):
    """Specs whose |delta2/delta1| stays `margin` away from 1 (the touching value)."""
    out = []
    while len(out) < count:
        d1 = rng.uniform(0.5, 2.0)
        ratio = rng.uniform(*ratio_range)
        if abs(abs(ratio) - 1.0) < margin:
            continue
        out.append(ManifoldSpec(kind, d1, ratio * d1, rng.uniform(0.5, 2.0)))
    return out


def three_route_errors(points):
    errs = []
    for spec, theta, phi in points:
        for band in spectral.Band:
            a = spectral.berry_curvature_matrix_element(spec, theta, phi, band)
            b = spectral.berry_curvature_closed_form(spec, theta, phi, band)
            c = spectral.berry_curvature_bloch(spec, theta, phi, band)
            errs.extend((a - b, b - c))
    return errs


def _connection_curl(spec, theta, phi, band, k=1e-4):
    """d_theta A_phi - d_phi A_theta by nested central differences, one gauge anchor."""
    _, _, psi_g, psi_e = qcore.eig2(hamiltonian(spec, theta, phi))
    anchor = qcore.anchor_index(psi_g if spectral.Band(band) is spectral.Band.GROUND else psi_e)

    def conn(t, p):
        return spectral.berry_connection_numeric(spec, t, p, band, anchor=anchor)

    d_t_aphi = (conn(theta + k, phi)[1] - conn(theta - k, phi)[1]) / (2 * k)
    d_p_atheta = (conn(theta, phi + k)[0] - conn(theta, phi - k)[0]) / (2 * k)
    return d_t_aphi - d_p_atheta


def run_all_oracles(budget: int = 10):
    """Every cross-route equivalence of the package, sized by ``budget``."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    rng = np.random.default_rng(SEED)
    n = 50 * budget
    reports = []

    points = random_points(rng, n)
    reports.append(OracleReport.from_errors("curvature three-route equivalence", three_route_errors(points), 1e-8))

    for kind in Kind:
        errs = []
        for spec, theta, phi in [p for p in points if p[0].kind is kind]:
            errs.append(oracle_curvature_fd(spec, theta, phi) - spectral.berry_curvature_closed_form(spec, theta, phi))
        reports.append(OracleReport.from_errors(f"{kind.value} plaquette vs closed form", errs, 1e-3))

    errs = [oracle_curvature_fd(s, t, p, "ground") + oracle_curvature_fd(s, t, p, "excited") for s, t, p in points[: n // 5 + 1]]
    reports.append(OracleReport.from_errors("plaquette band antisymmetry", errs, 2e-3))

    errs = []
    for spec, theta, phi in points[: n // 2 + 1]:
        for band in spectral.Band:
            q = spectral.qgt_numeric(spec, theta, phi, band)
            errs.append(q.curvature - spectral.berry_curvature_closed_form(spec, theta, phi, band))
            errs.append(abs(q.q_tp - np.conj(q.q_pt)))
    reports.append(OracleReport.from_errors("qgt imaginary part vs closed form", errs, 1e-4))

    errs = [
        _connection_curl(s, t, p, "ground") - spectral.berry_curvature_closed_form(s, t, p)
        for s, t, p in points[: n // 5 + 1]
    ]
    reports.append(OracleReport.from_errors("connection curl vs closed form", errs, 1e-3))

    specs = [ManifoldSpec(Kind.SPHERE, 1.0, 0.0, 1.0), ManifoldSpec(Kind.SPHERE, 1.0, 2.0, 1.0)]
    specs += random_gapped_specs(rng, budget, Kind.SPHERE) + random_gapped_specs(rng, budget, Kind.TORUS)
    errs, sums = [], []
    for spec in specs:
        c_quad = spectral.chern_conventional(spec, "ground")
        errs.append(c_quad - round(oracle_chern_plaquette(spec, "ground", 48)))
        sums.append(c_quad + spectral.chern_conventional(spec, "excited"))
        if spec.kind is Kind.SPHERE:
            errs.append(c_quad - spectral.chern_closed_form_sphere(spec.delta1, spec.delta2))
    reports.append(OracleReport.from_errors("chern quadrature vs lattice", errs, 1e-6))
    reports.append(OracleReport.from_errors("chern band sum rule", sums, 2e-6))

    errs = []
    for kind, expected in ((Kind.SPHERE, 2.0), (Kind.TORUS, 0.0)):
        for spec in random_gapped_specs(rng, budget, kind, margin=0.0):
            errs.append(manifold.euler_characteristic(spec, 256, 256) - expected)
            theta = rng.uniform(0.0, spec.theta_range, 16)
            ring = spec.delta2 + spec.delta1 * np.cos(theta)
            theta = theta[np.abs(ring) > 1e-3]
            prod = manifold.gaussian_curvature(spec, theta) * manifold.area_element_density(spec, theta)
            errs.extend(prod - manifold.curvature_times_area(spec, theta))
    reports.append(OracleReport.from_errors("gauss-bonnet euler characteristic", errs, 1e-6))

    errs = []
    for _ in range(20 * budget):
        v = rng.normal(size=3)
        h = qcore.pauli_compose(v) + rng.normal() * qcore.IDENTITY
        e_g, e_e, psi_g, psi_e = qcore.eig2(h)
        recon = e_g * qcore.projector(psi_g) + e_e * qcore.projector(psi_e)
        errs.append(np.abs(recon - h).max() / max(1.0, np.abs(h).max()))
    reports.append(OracleReport.from_errors("eig2 spectral reconstruction", errs, 1e-10))

    reports.append(lindblad_decay_report())
    return reports


def lindblad_decay_report(t1=60.0, t2_star=40.0, tau=20.0):
    """Amplitude and phase damping at H ~ 0 against the analytic exponentials."""
    spec = ManifoldSpec(Kind.TORUS, 1e-12, 0.0, 1e-12)
    protocol = evolution.RampProtocol(0.0, TWO_PI, tau)
    noise = evolution.NoiseSpec(t1, t2_star)
    errs = []
    excited = qcore.projector(qcore.KET_E)
    traj = evolution.evolve_lindblad(spec, protocol, excited, noise, dt=tau / 2000)
    errs.extend(traj.rho_ee - np.exp(-traj.t / t1))
    plus = qcore.projector(np.array([1, 1]) / math.sqrt(2))
    traj = evolution.evolve_lindblad(spec, protocol, plus, noise, dt=tau / 2000)
    errs.extend(np.abs(traj.rho_eg) - 0.5 * np.exp(-traj.t / t2_star))
    return OracleReport.from_errors("lindblad analytic decay", errs, 1e-6)
