"""Target states: extreme spin-squeezed (ESS) eigenstates and contrast search.

The optimal squeezed state at fixed interferometric contrast is the ground
state of the operator chi Sz^2 - Omega Sx, a real-symmetric tridiagonal
matrix in the Dicke basis.  The coupling ratio omega = Omega/chi acts as
the knob trading contrast <Sx> against squeezing; omega = 0 degenerates to
the bare Dicke state |S, 0> and omega -> inf to the x-polarized coherent
state.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .errors import DomainError, NumericalError, TargetNotFoundError
from .spin_core import SpinState, SpinSystem, _ladder_arrays, dicke_state, expectation

EIG_RESIDUAL_TOL = 1e-10
CONTRAST_MATCH_TOL = 1e-8  # times S
OMEGA_SEARCH_MAX = 1e6


@dataclass(frozen=True)
class EssTarget:
    """Minimal eigenpair of chi Sz^2 - Omega Sx with its contrast."""

    state: SpinState
    eigenvalue: float
    omega_ratio: float
    contrast: float


def _squeezing_matrix(system: SpinSystem, omega_ratio: float):
    m = system.m_values()
    diag = system.chi * m * m
    zp, _ = _ladder_arrays(system.total_spin, m)
    off = -0.5 * omega_ratio * system.chi * zp[:-1]
    return diag, off


def ess_ground_state(system: SpinSystem, omega_ratio: float) -> EssTarget:
    """Ground state of chi Sz^2 - Omega Sx at fixed omega = Omega/chi.

    The returned amplitudes are real, even under m -> -m, and positive
    (Perron-Frobenius structure of the tridiagonal matrix with negative
    off-diagonals), with the sign fixed by a_0 > 0.
    """
    if omega_ratio < 0:
        raise DomainError(f"omega_ratio must be >= 0, got {omega_ratio}")
    if omega_ratio == 0.0:
        return EssTarget(state=dicke_state(system, 0), eigenvalue=0.0,
                         omega_ratio=0.0, contrast=0.0)
    diag, off = _squeezing_matrix(system, omega_ratio)
    try:
        lam, vec = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0))
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericalError(f"tridiagonal eigensolver failed: {exc}") from exc
    lam = float(lam[0])
    v = vec[:, 0]
    # enforce the even-symmetry and a_0 > 0 conventions exactly
    v = 0.5 * (v + v[::-1])
    center = system.n_atoms // 2
    if v[center] < 0:
        v = -v
    v = v / np.linalg.norm(v)
    residual = _residual(diag, off, v, lam)
    if residual >= EIG_RESIDUAL_TOL:
        # one refinement pass: Rayleigh quotient update
        lam = float(v @ _matvec(diag, off, v))
        residual = _residual(diag, off, v, lam)
        if residual >= EIG_RESIDUAL_TOL:
            raise NumericalError(
                f"eigen-residual {residual:.3e} exceeds {EIG_RESIDUAL_TOL:g}")
    state = SpinState(system, v.astype(complex))
    return EssTarget(state=state, eigenvalue=lam, omega_ratio=float(omega_ratio),
                     contrast=expectation(state, "sx"))


def _matvec(diag, off, v):
    out = diag * v
    out[:-1] += off * v[1:]
    out[1:] += off * v[:-1]
    return out


def _residual(diag, off, v, lam):
    return float(np.linalg.norm(_matvec(diag, off, v) - lam * v))


def ess_for_contrast(system: SpinSystem, target_contrast: float) -> EssTarget:
    """Find the squeezed eigenstate whose mean spin <Sx> hits target_contrast.

    <Sx> of the ground state grows monotonically with omega, so the root is
    bracketed by doubling omega and then polished by Brent's method.  Raises
    TargetNotFoundError if no bracket exists below omega = 1e6.
    """
    s = system.total_spin
    if not (0 < target_contrast < s):
        raise DomainError(
            f"target contrast must lie in (0, S) = (0, {s}), got {target_contrast}"
        )

    def objective(omega):
        return ess_ground_state(system, omega).contrast - target_contrast

    hi = 1.0
    while objective(hi) < 0:
        hi *= 2.0
        if hi > OMEGA_SEARCH_MAX:
            raise TargetNotFoundError(
                f"no omega <= {OMEGA_SEARCH_MAX:g} reaches contrast {target_contrast}"
            )
    omega = brentq(objective, 0.0, hi, xtol=1e-13, rtol=8.9e-16, maxiter=200)
    result = ess_ground_state(system, omega)
    if abs(result.contrast - target_contrast) >= CONTRAST_MATCH_TOL * s:
        raise TargetNotFoundError(
            f"contrast match failed: |{result.contrast} - {target_contrast}| "
            f">= {CONTRAST_MATCH_TOL * s:g}"
        )
    return result
