"""Per-N drive-parameter design for squeezed-state production.

The plateau-end time t2 and switch-off duration t_off that steer the
passage into a squeezed superposition depend on the atom number: the
values quoted for ten atoms (t2 = 0.5 chi/alpha, t_off = 0.583 chi/alpha)
are the optimum of the target overlap for that size only, and reusing them
at N ~ 100 costs several tenths of a dB of gain.  This module finds the
optimal (t2, t_off) for a given system by maximizing the overlap of the
produced state with the squeezed target, allowing free shearing evolution
to align the one-axis-twisting phase.

The search is cheap because every candidate shares the same history up to
the chirp stop at t = 0: the passage is integrated once up to t = 0 and
only the short tail [0, t2 + t_off] is re-integrated per candidate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .errors import DomainError
from .metrics import gain_db, wineland_xi2
from .propagator import _propagate_window, propagate
from .schedules import (
    ChirpSchedule,
    CouplingSchedule,
    Schedule,
    crossing_period,
    ess_protocol,
)
from .spin_core import SpinState, SpinSystem, dicke_state
from .targets import EssTarget

OAT_SCAN_POINTS = 2048


def best_oat_overlap(state: SpinState, target: SpinState,
                     n_grid: int = OAT_SCAN_POINTS) -> tuple[float, float]:
    """Maximum overlap with `target` over one shearing period of free evolution.

    Returns (overlap, duration); the grid optimum is polished by a bounded
    scalar search.  One period 2 pi / chi covers all relative phases of the
    dominant m^2 differences.
    """
    chi = state.system.chi
    m2 = state.system.m_values() ** 2
    period = 2.0 * np.pi / chi
    grid = np.linspace(0.0, period, n_grid, endpoint=False)
    phases = np.exp(-1j * chi * np.outer(grid, m2))
    overlaps = np.abs((phases * state.amplitudes[None, :])
                      @ np.conj(target.amplitudes)) ** 2
    i = int(np.argmax(overlaps))

    def neg(d):
        amp = state.amplitudes * np.exp(-1j * chi * m2 * d)
        return -np.abs(np.vdot(target.amplitudes, amp)) ** 2

    lo = grid[i] - period / n_grid
    hi = grid[i] + period / n_grid
    res = minimize_scalar(neg, bounds=(max(lo, 0.0), hi), method="bounded",
                          options={"xatol": 1e-12})
    d = float(res.x) if -res.fun >= overlaps[i] else float(grid[i])
    return max(-res.fun, float(overlaps[i])), d


@dataclass(frozen=True)
class EssDrive:
    """Optimized drive for one atom number, with the state it produces."""

    system: SpinSystem
    alpha: float
    omega_max: float
    t2: float
    t_off: float
    schedule: Schedule
    target: EssTarget
    produced: SpinState          # state at the end of the optimized schedule
    aligned: SpinState           # produced state after overlap-maximizing shear
    overlap: float
    oat_time: float

    @property
    def gain_db(self) -> float:
        return gain_db(wineland_xi2(self.aligned))

    @property
    def ideal_gain_db(self) -> float:
        return gain_db(wineland_xi2(self.target.state))


def _tail_schedule(system: SpinSystem, alpha: float, omega_max: float,
                   t2: float, t_off: float) -> Schedule:
    base = ess_protocol(system, alpha, omega_max)
    tau = crossing_period(system, alpha)
    coupling = CouplingSchedule(omega_max=omega_max, t1=base.coupling.t1,
                                t2=t2, t_on=base.coupling.t_on, t_off=t_off)
    return Schedule(chirp=ChirpSchedule(alpha=alpha, cutoff_time=0.0),
                    coupling=coupling,
                    t_start=base.t_start, t_end=t2 + t_off + tau)


def optimize_ess_drive(system: SpinSystem, alpha: float, omega_max: float,
                       target: EssTarget, *, rtol=None, atol=None) -> EssDrive:
    """Find (t2, t_off) maximizing the shear-aligned overlap with `target`.

    Seeded from the ten-atom optimum (0.5, 0.583) chi/alpha and refined by
    Nelder-Mead on the cached-prefix tail integration.
    """
    if not (alpha > 0 and omega_max > 0):
        raise DomainError("alpha and omega_max must be positive")
    kw = {}
    if rtol is not None:
        kw["rtol"] = rtol
    if atol is not None:
        kw["atol"] = atol
    chi = system.chi
    base = ess_protocol(system, alpha, omega_max)
    init = dicke_state(system, int(system.total_spin))
    prefix = propagate(system, base, init,
                       np.linspace(base.t_start, 0.0, 201), **kw)
    y0 = prefix.amplitudes[-1]

    chirp0 = ChirpSchedule(alpha=alpha, cutoff_time=0.0)
    m2 = system.m_values() ** 2
    period = 2.0 * np.pi / chi
    grid = np.linspace(0.0, period, OAT_SCAN_POINTS, endpoint=False)
    oat_phases = np.exp(-1j * chi * np.outer(grid, m2))
    tgt_conj = np.conj(target.state.amplitudes)

    def tail_state(t2, t_off):
        coupling = CouplingSchedule(omega_max=omega_max, t1=base.coupling.t1,
                                    t2=t2, t_on=base.coupling.t_on, t_off=t_off)
        return _propagate_window(system, chirp0, coupling, y0, 0.0,
                                 np.array([t2 + t_off]), **kw)[0]

    def infidelity(x):
        t2, t_off = x
        if t2 < 0.0 or t_off < 0.05 * chi / alpha:
            return 1.0
        amps = tail_state(t2, t_off)
        overlaps = np.abs((oat_phases * amps[None, :]) @ tgt_conj) ** 2
        return 1.0 - float(overlaps.max())

    x0 = np.array([0.5 * chi / alpha, 0.583 * chi / alpha])
    res = minimize(infidelity, x0, method="Nelder-Mead",
                   options={"xatol": 1e-3 * chi / alpha, "fatol": 1e-10,
                            "maxiter": 300})
    t2, t_off = float(res.x[0]), float(res.x[1])

    schedule = _tail_schedule(system, alpha, omega_max, t2, t_off)
    produced = SpinState(system, tail_state(t2, t_off))
    overlap, d = best_oat_overlap(produced, target.state)
    aligned = SpinState(system, produced.amplitudes
                        * np.exp(-1j * chi * m2 * d))
    return EssDrive(system=system, alpha=alpha, omega_max=omega_max,
                    t2=t2, t_off=t_off, schedule=schedule, target=target,
                    produced=produced, aligned=aligned,
                    overlap=overlap, oat_time=d)
