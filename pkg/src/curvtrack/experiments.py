"""Parameter sweeps over delta2/delta1: Chern-vs-offset tables and (delta2, theta) maps.

Rows (one per delta2 value) are independent.  They are integrated on a time
grid fixed once for the whole sweep and may be split across threads; since the
integrator is elementwise per row, the output does not depend on the split.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

import numpy as np

from .errors import DegeneratePoint, PhysicsError
from .evolution import (
    NoiseSpec,
    RampProtocol,
    default_dt,
    integrate_batch,
    prepare_initial,
    step_count,
)
from .manifold import Kind, ManifoldSpec, control_fields, euler_characteristic, minimum_gap
from .response import dynamical_chern, profile_from_trajectory
from .spectral import EPS_GAP, Band, chern_closed_form_sphere, eigenstates_closed_form

DEGENERATE_SENTINEL = 0.5


class MapKind(str, enum.Enum):
    CURVATURE = "curvature"
    OVERLAP_GROUND = "overlap_ground"
    OVERLAP_EXCITED = "overlap_excited"
    FIDELITY_CLOSED = "fidelity_closed"
    FIDELITY_NOISY = "fidelity_noisy"


@dataclass(frozen=True)
class SweepGrid:
    delta2_over_delta1: np.ndarray
    theta_over_pi: np.ndarray
    base_spec: ManifoldSpec
    protocol_template: Optional[RampProtocol] = None

    def __post_init__(self):
        for name in ("delta2_over_delta1", "theta_over_pi"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 1 or arr.size == 0:
                raise ValueError(f"{name} must be a non-empty 1-D list")
            if np.any(np.diff(arr) <= 0):
                raise ValueError(f"{name} must be strictly increasing")
            object.__setattr__(self, name, arr)

    @property
    def shape(self):
        return (len(self.delta2_over_delta1), len(self.theta_over_pi))

    def specs(self):
        base = self.base_spec
        return [base.with_delta2(r * base.delta1) for r in self.delta2_over_delta1]


@dataclass(frozen=True)
class MapResult:
    grid: SweepGrid
    values: np.ndarray
    kind: MapKind
    flags: np.ndarray
    aux: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} != grid shape {self.grid.shape}")
        if not np.isfinite(self.values).all():
            raise ValueError("map values must be finite")


class ChernRow(NamedTuple):
    delta2_over_delta1: float
    chern_dyn: float
    chern_conv: float
    euler: float
    flag: str


def delta2_axis(lo: float, hi: float, n: int) -> np.ndarray:
    return np.linspace(lo, hi, int(n))


def theta_axis(protocol: RampProtocol, n_theta: int) -> np.ndarray:
    if protocol.span <= 0:
        raise ValueError("maps need an increasing theta ramp")
    return np.linspace(protocol.theta_start, protocol.theta_end, int(n_theta))


def _chunks(n: int, threads: int):
    threads = max(1, min(int(threads), n))
    bounds = np.linspace(0, n, threads + 1).round().astype(int)
    return [range(bounds[k], bounds[k + 1]) for k in range(threads) if bounds[k] < bounds[k + 1]]


def _run_rows(specs, protocol, noise, n_steps, threads, per_row):
    """Integrate every preparable row and hand each trajectory to ``per_row``.

    Returns ``(results, failures, max_trace_error)``; ``results[i]`` is None
    for rows whose initial state could not be prepared.
    """
    rho0s, failures = {}, {}
    for i, s in enumerate(specs):
        try:
            rho0s[i] = prepare_initial(s, protocol)
        except PhysicsError as exc:
            failures[i] = exc
    good = sorted(rho0s)
    results: List = [None] * len(specs)
    trace_err = [0.0]

    def work(rows):
        idx = [good[k] for k in rows]
        run = integrate_batch([specs[i] for i in idx], protocol, [rho0s[i] for i in idx], noise=noise, n_steps=n_steps)
        local = float(np.max(np.abs(run.rho_ee + run.rho_gg - 1.0)))
        out = [(i, per_row(run.row(j, protocol, specs[i], noise))) for j, i in enumerate(idx)]
        return out, local

    if good:
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            for out, local in pool.map(work, _chunks(len(good), threads)):
                for i, value in out:
                    results[i] = value
                trace_err[0] = max(trace_err[0], local)
    return results, failures, trace_err[0]


def _sweep_steps(specs, protocol, dt, multiple_of=1):
    rule_dt = dt if dt is not None else default_dt(specs, protocol)
    return step_count(rule_dt, protocol.tau, multiple_of)


def chern_vs_offset(
    base_spec: ManifoldSpec,
    delta2_range,
    protocol: RampProtocol,
    noise: Optional[NoiseSpec] = None,
    threads: int = 1,
    dt: Optional[float] = None,
    n_quad: int = 256,
) -> List[ChernRow]:
    lo, hi, n = delta2_range
    if n < 3:
        raise ValueError("need at least 3 sweep points")
    return chern_table(base_spec, delta2_axis(lo, hi, n), protocol, noise, threads, dt, n_quad)


def chern_table(
    base_spec: ManifoldSpec,
    ratios,
    protocol: RampProtocol,
    noise: Optional[NoiseSpec] = None,
    threads: int = 1,
    dt: Optional[float] = None,
    n_quad: int = 256,
) -> List[ChernRow]:
    """One ChernRow per delta2/delta1 ratio, all sharing one integration grid."""
    ratios = np.asarray(ratios, dtype=float)
    specs = [base_spec.with_delta2(r * base_spec.delta1) for r in ratios]
    n_steps = _sweep_steps(specs, protocol, dt)
    chern_dyn, failures, _ = _run_rows(
        specs, protocol, noise, n_steps, threads, lambda traj: dynamical_chern(profile_from_trajectory(traj))
    )
    rows = []
    for i, (r, s) in enumerate(zip(ratios, specs)):
        flags = []
        if i in failures:
            flags.append("degenerate_start")
        dyn = chern_dyn[i] if chern_dyn[i] is not None else math.nan
        try:
            if s.kind is Kind.SPHERE:
                conv = chern_closed_form_sphere(s.delta1, s.delta2)
            elif minimum_gap(s) <= EPS_GAP:
                raise DegeneratePoint("torus touches the degeneracy")
            else:
                conv = 0.0
        except DegeneratePoint:
            conv = math.nan
            flags.append("undefined_chern")
        euler = euler_characteristic(s, n_quad, n_quad)
        rows.append(ChernRow(float(r), dyn, conv, euler, "|".join(flags) or "ok"))
    return rows


def _require_torus(spec):
    if spec.kind is not Kind.TORUS:
        raise ValueError("maps are defined for the torus family")


def curvature_map(
    base_spec: ManifoldSpec,
    delta2_range,
    protocol: RampProtocol,
    n_theta: int = 201,
    noise: Optional[NoiseSpec] = None,
    threads: int = 1,
    dt: Optional[float] = None,
) -> MapResult:
    _require_torus(base_spec)
    thetas = theta_axis(protocol, n_theta)
    grid = SweepGrid(delta2_axis(*delta2_range), thetas / math.pi, base_spec, protocol)
    specs = grid.specs()
    # output nodes then coincide with integrator samples
    n_steps = _sweep_steps(specs, protocol, dt, multiple_of=n_theta - 1)

    def per_row(traj):
        prof = profile_from_trajectory(traj)
        return np.interp(thetas, prof.theta, prof.b_dyn)

    rows, failures, trace_err = _run_rows(specs, protocol, noise, n_steps, threads, per_row)
    values = np.zeros(grid.shape)
    flags = np.zeros(grid.shape, dtype=bool)
    for i, row in enumerate(rows):
        if row is None:
            flags[i] = True
        else:
            values[i] = row
    diag = {"max_trace_error": trace_err, "n_steps": n_steps, "failed_rows": sorted(failures)}
    return MapResult(grid, values, MapKind.CURVATURE, flags, diagnostics=diag)


def _eigen_overlap(spec, theta, band):
    """|<g|psi_band>|^2 on the torus at phi = 0; None at a degeneracy."""
    delta, omega = control_fields(spec, theta)
    try:
        psi_e, psi_g = eigenstates_closed_form(float(delta), float(omega), 0.0)
    except DegeneratePoint:
        return None
    psi = psi_g if band is Band.GROUND else psi_e
    return psi


def overlap_map(base_spec: ManifoldSpec, delta2_range, n_theta: int = 201, band=Band.GROUND) -> MapResult:
    _require_torus(base_spec)
    band = Band(band)
    thetas = np.linspace(0.0, base_spec.theta_range, int(n_theta))
    grid = SweepGrid(delta2_axis(*delta2_range), thetas / math.pi, base_spec)
    values = np.empty(grid.shape)
    flags = np.zeros(grid.shape, dtype=bool)
    for i, spec in enumerate(grid.specs()):
        for j, theta in enumerate(thetas):
            psi = _eigen_overlap(spec, theta, band)
            if psi is None:
                values[i, j] = DEGENERATE_SENTINEL
                flags[i, j] = True
            else:
                values[i, j] = abs(psi[1]) ** 2
    kind = MapKind.OVERLAP_GROUND if band is Band.GROUND else MapKind.OVERLAP_EXCITED
    return MapResult(grid, values, kind, flags)


def fidelity_map(
    base_spec: ManifoldSpec,
    delta2_range,
    protocol: RampProtocol,
    noise: Optional[NoiseSpec] = None,
    n_theta: int = 201,
    threads: int = 1,
    dt: Optional[float] = None,
) -> MapResult:
    """Overlap of the evolved state with the instantaneous ground eigenstate.

    ``aux["bare_g"]`` holds the population of the bare |g> for comparison.
    """
    _require_torus(base_spec)
    thetas = theta_axis(protocol, n_theta)
    grid = SweepGrid(delta2_axis(*delta2_range), thetas / math.pi, base_spec, protocol)
    specs = grid.specs()
    n_steps = _sweep_steps(specs, protocol, dt, multiple_of=n_theta - 1)

    def per_row(traj):
        ee = np.interp(thetas, traj.theta, traj.rho_ee)
        gg = np.interp(thetas, traj.theta, traj.rho_gg)
        eg = np.interp(thetas, traj.theta, traj.rho_eg.real) + 1j * np.interp(thetas, traj.theta, traj.rho_eg.imag)
        fid = np.empty(len(thetas))
        flag = np.zeros(len(thetas), dtype=bool)
        for j, theta in enumerate(thetas):
            psi = _eigen_overlap(traj.spec, theta, Band.GROUND)
            if psi is None:
                fid[j], flag[j] = DEGENERATE_SENTINEL, True
                continue
            a, b = psi
            val = (abs(a) ** 2 * ee[j] + abs(b) ** 2 * gg[j] + 2.0 * (a.conjugate() * b * eg[j]).real)
            fid[j] = min(1.0, max(0.0, val))
        return fid, flag, gg

    rows, failures, trace_err = _run_rows(specs, protocol, noise, n_steps, threads, per_row)
    values = np.full(grid.shape, DEGENERATE_SENTINEL)
    flags = np.ones(grid.shape, dtype=bool)
    bare = np.full(grid.shape, DEGENERATE_SENTINEL)
    for i, row in enumerate(rows):
        if row is not None:
            values[i], flags[i], bare[i] = row
    kind = MapKind.FIDELITY_NOISY if noise is not None else MapKind.FIDELITY_CLOSED
    diag = {"max_trace_error": trace_err, "n_steps": n_steps, "failed_rows": sorted(failures)}
    return MapResult(grid, values, kind, flags, aux={"bare_g": bare}, diagnostics=diag)


def gradient_magnitude(result: MapResult) -> np.ndarray:
    x, y = result.grid.delta2_over_delta1, result.grid.theta_over_pi
    if len(x) < 2 or len(y) < 2:
        return np.zeros(result.values.shape)
    gx, gy = np.gradient(result.values, x, y)
    return np.hypot(gx, gy)


def locate_singularities(result: MapResult, threshold: float = 5.0, radius: float = 0.05):
    """Peaks of |grad(values)| in (delta2/delta1, theta/pi) coordinates.

    A peak is a cell at least as large as its 8 neighbours and above
    ``threshold``; peaks closer than ``radius`` (axis units) to a stronger one
    are merged into it.
    """
    if result.kind not in (MapKind.OVERLAP_GROUND, MapKind.OVERLAP_EXCITED):
        raise ValueError("singularities are located on overlap maps")
    g = gradient_magnitude(result)
    if not np.isfinite(threshold):
        return []
    padded = np.pad(g, 1, mode="constant", constant_values=-np.inf)
    n0, n1 = g.shape
    neighbours = np.max(
        [padded[1 + di : 1 + di + n0, 1 + dj : 1 + dj + n1] for di in (-1, 0, 1) for dj in (-1, 0, 1) if di or dj],
        axis=0,
    )
    peaks = np.argwhere((g >= neighbours) & (g > threshold))
    order = sorted(peaks.tolist(), key=lambda ij: (-g[ij[0], ij[1]], ij[0], ij[1]))
    x, y = result.grid.delta2_over_delta1, result.grid.theta_over_pi
    kept = []
    for i, j in order:
        pt = (float(x[i]), float(y[j]))
        if all(math.hypot(pt[0] - q[0], pt[1] - q[1]) > radius for q in kept):
            kept.append(pt)
    return sorted(kept)
