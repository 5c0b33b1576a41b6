import numpy as np
import pytest

from dicke_rap import (
    ChirpSchedule,
    CouplingSchedule,
    DomainError,
    IntegrationError,
    Schedule,
    SpinState,
    SpinSystem,
    dicke_protocol,
    dicke_state,
    fidelity,
    free_evolve_oat,
    instantaneous_spectrum,
    ladder_coeffs,
    propagate,
)

from oracles import expm_oracle_final, ladder_hamiltonian


def make_schedule(omega_max=0.88, alpha=0.1, n=10, t2=0.0, t_off=20.0,
                  cutoff=0.0):
    t1 = -n / alpha
    t_on = 2.0 / alpha
    tau = 2.0 / alpha
    return Schedule(ChirpSchedule(alpha, cutoff),
                    CouplingSchedule(omega_max, t1, t2, t_on, t_off),
                    t1 - t_on - tau, t2 + t_off + tau)


def test_diagonal_hamiltonian_keeps_populations():
    sys10 = SpinSystem(10)
    sched = make_schedule(omega_max=0.0)
    init = dicke_state(sys10, 3)
    tr = propagate(sys10, sched, init,
                   np.linspace(sched.t_start, sched.t_end, 41))
    assert np.abs(tr.populations - tr.populations[0]).max() < 1e-9
    assert np.abs(tr.norms - 1.0).max() < 1e-9


def test_trace_accessors():
    sys2 = SpinSystem(2)
    sched = make_schedule(n=2, alpha=0.5, omega_max=0.5)
    ts = np.linspace(sched.t_start, sched.t_end, 7)
    tr = propagate(sys2, sched, dicke_state(sys2, 1), ts)
    assert tr.populations.shape == (7, 3)
    assert len(tr.states) == 7
    assert fidelity(tr.final_state, tr.state(6)) == pytest.approx(1.0)
    assert tr.beta[0] == pytest.approx(0.5 * sched.t_start)


def test_sample_validation():
    sys2 = SpinSystem(2)
    sched = make_schedule(n=2, alpha=0.5)
    init = dicke_state(sys2, 1)
    with pytest.raises(DomainError):
        propagate(sys2, sched, init, np.array([sched.t_start - 1.0]))
    with pytest.raises(DomainError):
        propagate(sys2, sched, init, np.array([sched.t_end + 1.0]))
    with pytest.raises(DomainError):
        propagate(sys2, sched, init, np.array([0.0, -1.0]))
    with pytest.raises(DomainError):
        propagate(sys2, sched, init, np.array([]))
    with pytest.raises(DomainError):
        propagate(SpinSystem(4), sched, init,
                  np.array([sched.t_start, sched.t_end]))


def test_norm_drift_guard_raises_with_time():
    sys10 = SpinSystem(10)
    sched = make_schedule()
    init = dicke_state(sys10, 5)
    with pytest.raises(IntegrationError) as err:
        propagate(sys10, sched, init,
                  np.linspace(sched.t_start, sched.t_end, 11),
                  rtol=1e-5, atol=1e-8, norm_tol=1e-13)
    assert err.value.t_fail is not None


def test_matches_matrix_exponential_oracle_single_case():
    sys2 = SpinSystem(2)
    sched = make_schedule(n=2, alpha=0.5, omega_max=0.7)
    init = dicke_state(sys2, 1)
    tr = propagate(sys2, sched, init, np.array([sched.t_end]))
    ref = expm_oracle_final(sys2, sched, init.amplitudes, dt=1e-4)
    assert np.linalg.norm(tr.amplitudes[0] - ref) < 1e-6


def test_convergence_fig2_protocol():
    # halving the tolerance must not move the final fidelity by more than 1e-8
    sys10 = SpinSystem(10)
    sched = dicke_protocol(sys10, 0.1, 0.88, 0)
    init = dicke_state(sys10, 5)
    samples = np.array([sched.t_end])
    target = dicke_state(sys10, 0)
    f1 = fidelity(propagate(sys10, sched, init, samples,
                            rtol=1e-12, atol=1e-14).final_state, target)
    f2 = fidelity(propagate(sys10, sched, init, samples,
                            rtol=5e-13, atol=5e-15).final_state, target)
    assert abs(f1 - f2) < 1e-8


def test_adiabatic_limit_stronger_coupling_does_better():
    sys10 = SpinSystem(10)
    init = dicke_state(sys10, 5)
    target = dicke_state(sys10, 0)
    fids = {}
    for om in (0.4, 0.88):
        sched = dicke_protocol(sys10, 0.1, om, 0)
        tr = propagate(sys10, sched, init, np.array([sched.t_end]))
        fids[om] = fidelity(tr.final_state, target)
    assert fids[0.88] >= fids[0.4]


def test_free_evolve_examples():
    sys10 = SpinSystem(10)
    st = dicke_state(sys10, 2)
    same = free_evolve_oat(st, 0.0)
    assert fidelity(st, same) == pytest.approx(1.0)
    np.testing.assert_array_equal(same.amplitudes, st.amplitudes)

    amps = np.zeros(11, complex)
    amps[5] = amps[6] = 1 / np.sqrt(2)
    sup = SpinState(sys10, amps)
    looped = free_evolve_oat(sup, 2 * np.pi)
    assert fidelity(sup, looped) == pytest.approx(1.0, abs=1e-12)

    moved = free_evolve_oat(sup, 0.37)
    np.testing.assert_allclose(moved.populations, sup.populations, atol=1e-15)

    with pytest.raises(DomainError):
        free_evolve_oat(st, -1.0)


def test_free_evolve_composition():
    sys4 = SpinSystem(4)
    rng = np.random.default_rng(3)
    a = rng.normal(size=5) + 1j * rng.normal(size=5)
    st = SpinState(sys4, a / np.linalg.norm(a))
    once = free_evolve_oat(st, 0.7 + 1.1)
    twice = free_evolve_oat(free_evolve_oat(st, 0.7), 1.1)
    np.testing.assert_allclose(twice.amplitudes, once.amplitudes, atol=1e-12)


def test_instantaneous_spectrum_diagonal_case():
    sys10 = SpinSystem(10)
    sched = make_schedule(omega_max=0.0)
    eigs, diab = instantaneous_spectrum(sys10, sched, -50.0)
    np.testing.assert_allclose(eigs, np.sort(diab), atol=1e-12)
    m = sys10.m_values()
    np.testing.assert_allclose(diab, m * m + (-5.0) * m, atol=1e-12)


def test_instantaneous_spectrum_minimal_gap_two_level_estimate():
    # at the last avoided crossing the two lowest levels split by
    # ~ Omega zeta+(0); the two-level reduction needs the coupling to stay
    # below the 2 chi spacing to the next diabatic level, so probe weak Omega
    sys10 = SpinSystem(10)
    zp, _ = ladder_coeffs(5, 0)
    ts = np.linspace(-14.0, -6.0, 801)
    rel_errs = []
    for om in (0.2, 0.1):
        sched = dicke_protocol(sys10, 0.1, om, 0)
        gaps = [np.diff(instantaneous_spectrum(sys10, sched, t)[0][:2])[0]
                for t in ts]
        est = om * zp
        rel_errs.append(abs(min(gaps) - est) / est)
        assert min(gaps) == pytest.approx(est, rel=0.1)
    assert rel_errs[1] < rel_errs[0]  # estimate sharpens as Omega shrinks


def test_instantaneous_spectrum_matches_dense_oracle():
    sys4 = SpinSystem(4)
    sched = make_schedule(n=4, alpha=0.2, omega_max=0.6)
    for t in np.linspace(sched.t_start, sched.t_end, 7):
        eigs, diab = instantaneous_spectrum(sys4, sched, t)
        from dicke_rap.schedules import beta_at, omega_at
        h = ladder_hamiltonian(sys4, beta_at(sched.chirp, t),
                               omega_at(sched.coupling, t))
        ref = np.linalg.eigvalsh(h)
        np.testing.assert_allclose(eigs, ref, atol=1e-10)
        np.testing.assert_allclose(np.sort(diab), np.linalg.eigvalsh(
            ladder_hamiltonian(sys4, beta_at(sched.chirp, t), 0.0)), atol=1e-12)


def test_gauge_free_prefix_state_matches_literal_equation():
    # the recorded state must carry the literal dynamical phase of
    # E_m = chi m^2 + beta m, including during the field-free lead-in
    sys2 = SpinSystem(2)
    alpha = 0.5
    sched = make_schedule(n=2, alpha=alpha, omega_max=0.5)
    init = dicke_state(sys2, 1)
    t_probe = sched.coupling.t1 - sched.coupling.t_on  # still field-free
    tr = propagate(sys2, sched, init, np.array([t_probe]))
    # exact diagonal evolution: phase -int(E_m dt) with E_m = m^2 + beta m
    t0 = sched.t_start
    integral = (t_probe - t0) * 1.0 + alpha * (t_probe ** 2 - t0 ** 2) / 2.0
    expected = np.exp(-1j * integral)
    got = tr.amplitudes[0][2]
    assert abs(got - expected) < 1e-9
