"""Collective-spin states and operators in the Dicke basis.

All states live in the (N+1)-dimensional symmetric subspace of N spin-1/2
particles, spanned by the Dicke states |S, m> with S = N/2 and
m = -S, ..., S.  Amplitude vectors are stored in ascending-m order, so
index i corresponds to m = i - S.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import ContractError, DomainError

NORM_TOL_CONSTRUCT = 1e-9
NORM_TOL_EXPECT = 1e-6


@dataclass(frozen=True)
class SpinSystem:
    """N two-level atoms with total spin S = N/2 and shearing strength chi.

    chi sets the unit of energy (and 1/chi the unit of time); all other
    couplings in the package are quoted relative to it.
    """

    n_atoms: int
    chi: float = 1.0

    def __post_init__(self):
        if self.n_atoms < 2 or self.n_atoms % 2 != 0:
            raise DomainError(f"n_atoms must be even and >= 2, got {self.n_atoms}")
        if not self.chi > 0:
            raise DomainError(f"chi must be positive, got {self.chi}")

    @property
    def total_spin(self) -> float:
        return self.n_atoms / 2

    @property
    def dim(self) -> int:
        return self.n_atoms + 1

    def m_values(self) -> np.ndarray:
        """Magnetic quantum numbers in storage order (ascending)."""
        s = self.total_spin
        return np.arange(self.dim) - s


@dataclass(frozen=True, eq=False)
class SpinState:
    """Normalized amplitude vector over the Dicke ladder of a SpinSystem."""

    system: SpinSystem
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.system.dim,):
            raise DomainError(
                f"amplitude vector must have length {self.system.dim}, "
                f"got shape {amps.shape}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL_CONSTRUCT:
            raise ContractError(f"state not normalized: |norm - 1| = {abs(norm - 1):.3e}")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def ladder_coeffs(s: float, m: float) -> tuple[float, float]:
    """Transition elements (zeta_plus, zeta_minus) of the raising/lowering pair.

    zeta_plus = sqrt((S - m)(S + m + 1)) couples |S,m> -> |S,m+1>;
    zeta_minus = sqrt((S + m)(S - m + 1)) couples |S,m> -> |S,m-1>.
    They share matrix elements: zeta_plus(S, m) == zeta_minus(S, m+1).
    """
    _check_half_integer_pair(s, m)
    zp = np.sqrt((s - m) * (s + m + 1.0))
    zm = np.sqrt((s + m) * (s - m + 1.0))
    return float(zp), float(zm)


def _check_half_integer_pair(s, m):
    if s < 0 or round(2 * s) != 2 * s:
        raise DomainError(f"S must be a non-negative half-integer, got {s}")
    if abs(m) > s or round(s - m) != s - m:
        raise DomainError(f"m = {m} is not on the ladder of S = {s}")


def _ladder_arrays(s: float, m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized zeta_plus / zeta_minus over an m grid (no validation)."""
    zp = np.sqrt(np.maximum((s - m) * (s + m + 1.0), 0.0))
    zm = np.sqrt(np.maximum((s + m) * (s - m + 1.0), 0.0))
    return zp, zm


def dicke_state(system: SpinSystem, m: float) -> SpinState:
    """The basis state |S, m>."""
    s = system.total_spin
    _check_half_integer_pair(s, m)
    amps = np.zeros(system.dim, dtype=complex)
    amps[int(round(m + s))] = 1.0
    return SpinState(system, amps)


def coherent_state(system: SpinSystem, theta: float, phi: float) -> SpinState:
    """Coherent spin state pointing along (theta, phi); theta = 0 is |S, S>.

    a_m = C(N, S+m)^(1/2) cos(theta/2)^(S+m) sin(theta/2)^(S-m) e^(-i(S-m)phi),
    evaluated in log space so large N does not overflow the binomials.
    """
    s = system.total_spin
    n = system.n_atoms
    m = system.m_values()
    c, si = np.cos(theta / 2.0), np.sin(theta / 2.0)
    log_binom = 0.5 * (gammaln(n + 1) - gammaln(s + m + 1) - gammaln(s - m + 1))
    with np.errstate(divide="ignore", invalid="ignore"):
        log_mag = log_binom + (s + m) * np.log(np.abs(c)) + (s - m) * np.log(np.abs(si))
    # 0^0 = 1 at the poles; exp(-inf) already gives the right 0 elsewhere
    log_mag = np.where((s + m == 0) & (c == 0), log_binom, log_mag)
    log_mag = np.where((s - m == 0) & (si == 0), log_binom, log_mag)
    mag = np.exp(log_mag)
    signs = np.sign(c) ** (s + m) * np.sign(si) ** (s - m)
    amps = mag * signs * np.exp(-1j * (s - m) * phi)
    amps /= np.linalg.norm(amps)
    return SpinState(system, amps)


def _check_norm_for_expectation(state: SpinState):
    if abs(state.norm() - 1.0) > NORM_TOL_EXPECT:
        raise ContractError("state norm deviates by more than 1e-6")


def _apply_sz(state: SpinState) -> np.ndarray:
    return state.system.m_values() * state.amplitudes


def _apply_sx(state: SpinState) -> np.ndarray:
    s = state.system.total_spin
    m = state.system.m_values()
    zp, zm = _ladder_arrays(s, m)
    a = state.amplitudes
    out = np.zeros_like(a)
    # <m|Sx|m+1> = zeta_plus(m)/2 and <m|Sx|m-1> = zeta_minus(m)/2
    out[:-1] += 0.5 * zp[:-1] * a[1:]
    out[1:] += 0.5 * zm[1:] * a[:-1]
    return out


def _apply_sy(state: SpinState) -> np.ndarray:
    s = state.system.total_spin
    m = state.system.m_values()
    zp, zm = _ladder_arrays(s, m)
    a = state.amplitudes
    out = np.zeros_like(a)
    # <m+1|Sy|m> = zeta_plus(m)/(2i), so row m picks up
    # +zeta_plus(m-1)/(2i) a_{m-1} and -zeta_plus(m)/(2i) a_{m+1}
    out[:-1] -= zp[:-1] * a[1:] / 2j
    out[1:] += zm[1:] * a[:-1] / 2j
    return out


_APPLY = {"sx": _apply_sx, "sy": _apply_sy, "sz": _apply_sz}


def expectation(state: SpinState, observable: str) -> float:
    """Expectation value of Sx, Sy, Sz or their squares (sx2, sy2, sz2)."""
    _check_norm_for_expectation(state)
    key = observable.lower()
    squared = key.endswith("2")
    base = key[:-1] if squared else key
    if base not in _APPLY:
        raise DomainError(f"unknown observable {observable!r}")
    applied = _APPLY[base](state)
    if squared:
        # <O^2> = <O psi | O psi> for Hermitian O
        return float(np.vdot(applied, applied).real)
    return float(np.vdot(state.amplitudes, applied).real)


def fidelity(a: SpinState, b: SpinState) -> float:
    """|<a|b>|^2, invariant under global phases of either state."""
    if a.system.n_atoms != b.system.n_atoms:
        raise DomainError(
            f"dimension mismatch: N = {a.system.n_atoms} vs {b.system.n_atoms}"
        )
    return float(np.abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)
