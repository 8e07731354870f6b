"""Exact 2x2 linear algebra for a single qubit.

Basis order everywhere is (|e>, |g>), i.e. |e> = (1, 0) and |g> = (0, 1), so
<sigma_z> = +1 in the excited state.  Pure states are length-2 complex arrays,
density matrices and observables are 2x2 complex arrays.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidState

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

KET_E = np.array([1, 0], dtype=complex)
KET_G = np.array([0, 1], dtype=complex)

PURE_NORM_TOL = 1e-9
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-9
# amplitudes whose moduli agree to this level count as a tie for the gauge anchor
GAUGE_TIE_TOL = 1e-12

for _m in (SIGMA_X, SIGMA_Y, SIGMA_Z, IDENTITY, KET_E, KET_G):
    _m.setflags(write=False)


def pauli_compose(v) -> np.ndarray:
    """H = (x sigma_x + y sigma_y + z sigma_z) / 2 for a Bloch vector v = (x, y, z)."""
    x, y, z = (float(c) for c in v)
    if not np.isfinite([x, y, z]).all():
        raise ValueError(f"non-finite Bloch vector {v!r}")
    return 0.5 * np.array([[z, complex(x, -y)], [complex(x, y), -z]], dtype=complex)


def bloch_components(h) -> np.ndarray:
    """Inverse of pauli_compose for a traceless Hermitian matrix."""
    h = np.asarray(h, dtype=complex)
    return np.array([2 * h[1, 0].real, 2 * h[1, 0].imag, (h[0, 0] - h[1, 1]).real])


def is_hermitian(h, tol=HERMITIAN_TOL) -> bool:
    h = np.asarray(h)
    scale = max(1.0, float(np.abs(h).max()))
    return bool(np.abs(h - h.conj().T).max() <= tol * scale)


def check_pure(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (2,):
        raise InvalidState(f"pure state must have shape (2,), got {psi.shape}")
    if not np.isfinite(psi).all():
        raise InvalidState("pure state has non-finite amplitudes")
    norm = float(np.vdot(psi, psi).real)
    if abs(norm - 1.0) > PURE_NORM_TOL:
        raise InvalidState(f"pure state norm {norm!r} differs from 1")
    return psi


def check_density(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise InvalidState(f"density matrix must have shape (2, 2), got {rho.shape}")
    if not np.isfinite(rho).all():
        raise InvalidState("density matrix has non-finite entries")
    if np.abs(rho - rho.conj().T).max() > HERMITIAN_TOL:
        raise InvalidState("density matrix is not Hermitian")
    tr = rho[0, 0].real + rho[1, 1].real
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvalidState(f"density matrix trace {tr!r} differs from 1")
    # smallest eigenvalue of a 2x2 Hermitian matrix in closed form
    mid = 0.5 * tr
    half = np.hypot(0.5 * (rho[0, 0].real - rho[1, 1].real), abs(rho[1, 0]))
    if mid - half < -POSITIVITY_TOL:
        raise InvalidState(f"density matrix has negative eigenvalue {mid - half!r}")
    return rho


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def expectation(state, obs) -> float:
    """<obs> in a pure state (shape (2,)) or density matrix (shape (2, 2))."""
    obs = np.asarray(obs, dtype=complex)
    state = np.asarray(state)
    if state.ndim == 1:
        psi = check_pure(state)
        val = np.vdot(psi, obs @ psi)
    else:
        rho = check_density(state)
        val = np.trace(rho @ obs)
    return float(val.real)


def anchor_index(psi) -> int:
    """Index of the amplitude that the gauge convention makes real positive."""
    a_e, a_g = abs(psi[0]), abs(psi[1])
    return 0 if a_e >= a_g - GAUGE_TIE_TOL else 1


def gauge_fix(psi, anchor=None) -> np.ndarray:
    """Rotate the global phase so amplitude `anchor` is real and positive.

    With ``anchor=None`` the largest-modulus amplitude is used, ties going to |e>.
    """
    psi = np.asarray(psi, dtype=complex)
    if anchor is None:
        anchor = anchor_index(psi)
    a = psi[anchor]
    mod = abs(a)
    if mod == 0.0:
        return psi.copy()
    out = psi * (a.conjugate() / mod)
    out[anchor] = mod  # exactly real, no rounding residue
    return out


def eig2(h):
    """Closed-form eigendecomposition of a 2x2 Hermitian matrix.

    Returns ``(E_g, E_e, psi_g, psi_e)`` with ``E_g <= E_e`` and both
    eigenvectors gauge-fixed by :func:`gauge_fix`.  At an exact degeneracy the
    computational basis is returned (``E_g == E_e`` marks the case).
    """
    h = np.asarray(h, dtype=complex)
    mean = 0.5 * (h[0, 0].real + h[1, 1].real)
    z = 0.5 * (h[0, 0].real - h[1, 1].real)
    w = h[1, 0]
    r = float(np.hypot(z, abs(w)))
    if r == 0.0:
        return mean, mean, KET_G.copy(), KET_E.copy()

    # pick the column with the larger leading entry to avoid cancellation
    if z >= 0:
        v_e = np.array([r + z, w])
        v_g = np.array([w.conjugate(), -(r + z)])
    else:
        v_e = np.array([w.conjugate(), r - z])
        v_g = np.array([z - r, w])
    # hypot keeps the norm finite for subnormal entries
    v_e = v_e / math.hypot(abs(v_e[0]), abs(v_e[1]))
    v_g = v_g / math.hypot(abs(v_g[0]), abs(v_g[1]))
    return mean - r, mean + r, gauge_fix(v_g), gauge_fix(v_e)


def fidelity(rho, target) -> float:
    """<target|rho|target>, clamped to [0, 1]."""
    rho = check_density(rho)
    psi = check_pure(target)
    f = float(np.vdot(psi, rho @ psi).real)
    if f < -POSITIVITY_TOL or f > 1 + POSITIVITY_TOL:
        raise InvalidState(f"fidelity {f!r} outside [0, 1]")
    return min(1.0, max(0.0, f))
