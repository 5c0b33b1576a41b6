"""Metrology figures of merit: QFI, Wineland parameter, metrological gain."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContrastUndefinedError, DomainError
from .spin_core import SpinState, _check_norm_for_expectation, expectation

# Below this fraction of S the mean spin is treated as zero contrast and
# the squeezing parameter is undefined (it would diverge).
CONTRAST_EPS = 1e-9


@dataclass(frozen=True)
class QfiTriple:
    """Quantum Fisher information along the three collective-spin axes."""

    f_x: float
    f_y: float
    f_z: float


def qfi(state: SpinState, axis: str) -> float:
    """Pure-state QFI, 4 (<S_axis^2> - <S_axis>^2), for axis in {x, y, z}."""
    if axis not in ("x", "y", "z"):
        raise DomainError(f"axis must be one of x, y, z, got {axis!r}")
    _check_norm_for_expectation(state)
    mean = expectation(state, f"s{axis}")
    second = expectation(state, f"s{axis}2")
    return 4.0 * max(second - mean * mean, 0.0)


def qfi_triple(state: SpinState) -> QfiTriple:
    return QfiTriple(qfi(state, "x"), qfi(state, "y"), qfi(state, "z"))


def dicke_qfi_analytic(n_atoms: int, m: float, axis: str) -> float:
    """Closed-form QFI of the Dicke state |N/2, m>.

    F_z vanishes (axial symmetry); F_x = F_y = N^2/2 - 2 m^2 + N, which
    interpolates between N at m = +-S (the coherent state, standard quantum
    limit) and N^2/2 + N at m = 0.
    """
    if abs(m) > n_atoms / 2:
        raise DomainError(f"|m| = {abs(m)} exceeds S = {n_atoms / 2}")
    if axis == "z":
        return 0.0
    if axis in ("x", "y"):
        return n_atoms ** 2 / 2.0 - 2.0 * m * m + n_atoms
    raise DomainError(f"axis must be one of x, y, z, got {axis!r}")


def superposition_qfi_analytic(n_atoms: int, m: float, branch: int,
                               zeta: float, phi: float, axis: str) -> float:
    """Closed-form QFI of cos(zeta/2)|S,m> + e^(i phi) sin(zeta/2)|S,m+branch>.

    F_z = sin^2(zeta) independent of N and m.  Along x and y, with b = branch,

        F = N^2/2 + N - 2 m^2 - 2 (2 m b + 1) sin^2(zeta/2)
            - sin^2(zeta) {cos, sin}^2(phi) (N^2/4 + N/2 - m^2 - m b).

    The population term interpolates the two bare Dicke values (zeta = 0
    gives the |S,m> QFI, zeta = pi the |S,m+b> one), which fixes its sign;
    the last term is 4 <S_{x,y}>^2 through the single coupling element
    linking the two components.
    """
    s = n_atoms / 2.0
    if branch not in (1, -1):
        raise DomainError(f"branch must be +1 or -1, got {branch}")
    if abs(m) > s or abs(m + branch) > s:
        raise DomainError(
            f"superposition |S,{m}> and |S,{m + branch}> leaves the S = {s} ladder"
        )
    if axis == "z":
        return float(np.sin(zeta) ** 2)
    if axis not in ("x", "y"):
        raise DomainError(f"axis must be one of x, y, z, got {axis!r}")
    proj = np.cos(phi) if axis == "x" else np.sin(phi)
    base = (n_atoms ** 2 / 2.0 + n_atoms - 2.0 * m * m
            - 2.0 * (2.0 * m * branch + 1.0) * np.sin(zeta / 2.0) ** 2)
    cross = np.sin(zeta) ** 2 * proj ** 2 * (
        n_atoms ** 2 / 4.0 + n_atoms / 2.0 - m * m - branch * m)
    return float(base - cross)


def wineland_xi2(state: SpinState) -> float:
    """Wineland squeezing parameter xi^2 = Var(Sz) N / <Sx>^2.

    Equals 1 for an x-polarized coherent state; values below 1 certify
    metrological gain in Ramsey interferometry with z as the squeezing
    direction and x as the mean-spin orientation.
    """
    _check_norm_for_expectation(state)
    s = state.system.total_spin
    sx = expectation(state, "sx")
    if abs(sx) <= CONTRAST_EPS * s:
        raise ContrastUndefinedError(
            f"|<Sx>| = {abs(sx):.3e} gives zero interferometric contrast; "
            "xi^2 is undefined"
        )
    var_sz = expectation(state, "sz2") - expectation(state, "sz") ** 2
    return float(var_sz * state.system.n_atoms / sx ** 2)


def gain_db(xi2: float) -> float:
    """Metrological gain -10 log10(xi^2) in dB relative to the coherent state."""
    if not xi2 > 0:
        raise DomainError(f"xi^2 must be positive, got {xi2}")
    return float(-10.0 * np.log10(xi2))
