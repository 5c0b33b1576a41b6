"""Spherical Wigner quasiprobability of collective-spin states.

The state is expanded over orthonormal multipole (tensor) operators T_kq
with Condon-Shortley phases, and the Wigner field on the generalized Bloch
sphere is synthesized as W(theta, phi) = sum_kq rho_kq Y_kq(theta, phi),
rescaled to unit integral over the sphere.  The north pole (theta = 0) is
the |S, S> direction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import lgamma

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import DomainError
from .spin_core import SpinState


def _is_half_integer(x) -> bool:
    return round(2 * x) == 2 * x


def clebsch_gordan(j1: float, m1: float, j2: float, m2: float,
                   J: float, M: float) -> float:
    """Condon-Shortley coefficient <j1 m1; j2 m2 | J M> via the Racah sum.

    Selection-rule violations (M != m1 + m2, triangle failures) return 0;
    structurally invalid quantum numbers (non-half-integer, |m| > j) raise.
    Factorials are handled in log space with a compensated sum over the
    alternating series so coefficients stay accurate to ~1e-13 for j <~ 20.
    """
    for j, m in ((j1, m1), (j2, m2), (J, M)):
        if j < 0 or not _is_half_integer(j) or not _is_half_integer(m):
            raise DomainError(f"invalid angular momentum pair (j={j}, m={m})")
        if abs(m) > j or round(j - m) != j - m:
            raise DomainError(f"m = {m} is not in the ladder of j = {j}")
    if M != m1 + m2:
        return 0.0
    if J < abs(j1 - j2) or J > j1 + j2 or round(j1 + j2 - J) != j1 + j2 - J:
        return 0.0

    def lf(x):  # log-factorial of a (half-)integer-valued count
        return lgamma(round(x) + 1.0)

    log_pref = 0.5 * (
        np.log(2 * J + 1)
        + lf(j1 + j2 - J) + lf(j1 - j2 + J) + lf(-j1 + j2 + J)
        - lf(j1 + j2 + J + 1)
        + lf(J + M) + lf(J - M)
        + lf(j1 - m1) + lf(j1 + m1) + lf(j2 - m2) + lf(j2 + m2)
    )

    k_min = int(round(max(0.0, j2 - J - m1, j1 - J + m2)))
    k_max = int(round(min(j1 + j2 - J, j1 - m1, j2 + m2)))
    if k_max < k_min:
        return 0.0

    # compensated (Kahan) summation of the alternating terms, each scaled
    # by the largest term magnitude to avoid overflow
    logs = np.empty(k_max - k_min + 1)
    for i, k in enumerate(range(k_min, k_max + 1)):
        logs[i] = -(lf(k) + lf(j1 + j2 - J - k) + lf(j1 - m1 - k)
                    + lf(j2 + m2 - k) + lf(J - j2 + m1 + k) + lf(J - j1 - m2 + k))
    log_max = logs.max()
    total = 0.0
    comp = 0.0
    for i, k in enumerate(range(k_min, k_max + 1)):
        term = (-1.0) ** k * np.exp(logs[i] - log_max)
        yv = term - comp
        tv = total + yv
        comp = (tv - total) - yv
        total = tv
    return float(np.exp(log_pref + log_max) * total)


@dataclass(frozen=True, eq=False)
class MultipoleDecomposition:
    """Components rho_kq = <psi|T_kq^dag|psi> for k = 0..2S, q = -k..k."""

    total_spin: float
    components: np.ndarray = field(repr=False)  # (2S+1, 4S+1), q offset by 2S

    @property
    def k_max(self) -> int:
        return int(2 * self.total_spin)

    def rho(self, k: int, q: int) -> complex:
        if not (0 <= k <= self.k_max and abs(q) <= k):
            raise DomainError(f"(k={k}, q={q}) outside the multipole table")
        return complex(self.components[k, q + self.k_max])


def multipole_components(state: SpinState) -> MultipoleDecomposition:
    """Multipole expansion of a pure state.

    Matrix elements of the tensor operators are
    <S,m'|T_kq|S,m> = sqrt((2k+1)/(2S+1)) <S m; k q | S m'>, nonzero only
    for m' = m + q, so each component is a shifted overlap of amplitudes.
    """
    s = state.system.total_spin
    dim = state.system.dim
    kmax = int(2 * s)
    a = state.amplitudes
    mvals = state.system.m_values()
    comps = np.zeros((kmax + 1, 2 * kmax + 1), dtype=complex)
    for k in range(kmax + 1):
        scale = np.sqrt((2 * k + 1) / (2 * s + 1))
        for q in range(-k, k + 1):
            acc = 0.0 + 0.0j
            for i in range(dim):
                ip = i + q
                if 0 <= ip < dim:
                    cg = clebsch_gordan(s, mvals[i], k, q, s, mvals[ip])
                    if cg != 0.0:
                        acc += np.conj(a[i]) * a[ip] * cg
            comps[k, q + kmax] = scale * acc
    return MultipoleDecomposition(total_spin=s, components=comps)


def _norm_assoc_legendre(kmax: int, x: np.ndarray) -> np.ndarray:
    """Orthonormal associated Legendre functions Pbar[k, q] at cos(theta) = x.

    Normalized so that Y_kq = Pbar_k^q(cos theta) e^(i q phi) has unit
    sphere integral of |Y|^2; computed by the stable three-term recursion
    (no explicit factorials, valid to high degree).
    """
    sin_t = np.sqrt(np.maximum(1.0 - x * x, 0.0))
    out = np.zeros((kmax + 1, kmax + 1, x.size))
    out[0, 0] = np.sqrt(1.0 / (4.0 * np.pi))
    for q in range(1, kmax + 1):
        out[q, q] = -np.sqrt((2 * q + 1.0) / (2.0 * q)) * sin_t * out[q - 1, q - 1]
    for q in range(0, kmax):
        out[q + 1, q] = np.sqrt(2 * q + 3.0) * x * out[q, q]
    for q in range(0, kmax + 1):
        for k in range(q + 2, kmax + 1):
            a_kq = np.sqrt((4.0 * k * k - 1.0) / (k * k - q * q))
            b_kq = np.sqrt(((k - 1.0) ** 2 - q * q) / (4.0 * (k - 1.0) ** 2 - 1.0))
            out[k, q] = a_kq * (x * out[k - 1, q] - b_kq * out[k - 2, q])
    return out  # indexed [k, q] for q >= 0


@dataclass(frozen=True, eq=False)
class SphereField:
    """Real scalar field sampled on a Gauss-Legendre x uniform-phi grid."""

    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray = field(repr=False)  # Gauss-Legendre weights over cos(theta)
    values: np.ndarray = field(repr=False)   # (n_theta, n_phi)

    def sphere_integral(self) -> float:
        dphi = 2.0 * np.pi / self.phi.size
        return float(np.sum(self.weights[:, None] * self.values) * dphi)


def wigner_grid(state: SpinState, n_theta: int, n_phi: int) -> SphereField:
    """Wigner field of `state`, normalized to unit integral over the sphere.

    The grid must resolve the band limit 2S exactly: n_theta >= 2S+1
    Gauss-Legendre nodes in cos(theta) and n_phi >= 4S+1 uniform angles.
    """
    s = state.system.total_spin
    kmax = int(2 * s)
    if n_theta < 2 * s + 1:
        raise DomainError(f"n_theta must be >= 2S+1 = {int(2 * s + 1)}, got {n_theta}")
    if n_phi < 4 * s + 1:
        raise DomainError(f"n_phi must be >= 4S+1 = {int(4 * s + 1)}, got {n_phi}")

    decomp = multipole_components(state)
    x, w = leggauss(n_theta)
    theta = np.arccos(x)[::-1]          # ascending theta (north pole first)
    x_sorted = np.cos(theta)
    weights = w[::-1]
    pbar = _norm_assoc_legendre(kmax, x_sorted)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi

    # A_q(theta) = sum_k rho_kq Pbar_k^q; negative q folds in via Hermiticity
    values = np.zeros((n_theta, n_phi))
    for q in range(0, kmax + 1):
        rho_q = decomp.components[:, q + kmax]  # over k
        a_q = np.tensordot(rho_q, pbar[:, q], axes=(0, 0))  # (n_theta,) complex
        if q == 0:
            values += np.real(a_q)[:, None]
        else:
            values += 2.0 * np.real(a_q[:, None] * np.exp(1j * q * phi)[None, :])

    fieldv = SphereField(theta=theta, phi=phi, weights=weights, values=values)
    total = fieldv.sphere_integral()
    return SphereField(theta=theta, phi=phi, weights=weights,
                       values=values / total)
