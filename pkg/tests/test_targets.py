import numpy as np
import pytest

from dicke_rap import (
    DomainError,
    SpinState,
    SpinSystem,
    coherent_state,
    dicke_state,
    ess_for_contrast,
    ess_ground_state,
    expectation,
    fidelity,
    gain_db,
    wineland_xi2,
)

from oracles import ladder_hamiltonian


def test_zero_coupling_is_central_dicke_state():
    sys10 = SpinSystem(10)
    tgt = ess_ground_state(sys10, 0.0)
    assert tgt.eigenvalue == 0.0
    assert tgt.contrast == 0.0
    np.testing.assert_array_equal(tgt.state.amplitudes,
                                  dicke_state(sys10, 0).amplitudes)


def test_two_atom_analytic_eigenvalue():
    # even sector reduces to [[chi, -Omega], [-Omega, 0]]
    sys2 = SpinSystem(2)
    tgt = ess_ground_state(sys2, 1.0)
    assert tgt.eigenvalue == pytest.approx((1 - np.sqrt(5)) / 2, rel=1e-12)


def test_large_coupling_approaches_coherent_state():
    sys10 = SpinSystem(10)
    tgt = ess_ground_state(sys10, 1e3)
    css = coherent_state(sys10, np.pi / 2, 0.0)
    assert fidelity(tgt.state, css) > 0.999


def test_ground_state_matches_dense_oracle():
    for n, omega in [(2, 0.5), (10, 1.3), (40, 7.0)]:
        sys_ = SpinSystem(n)
        tgt = ess_ground_state(sys_, omega)
        h = ladder_hamiltonian(sys_, 0.0, -omega)
        w, v = np.linalg.eigh(h)
        assert tgt.eigenvalue == pytest.approx(w[0], rel=1e-12, abs=1e-12)
        assert abs(np.vdot(v[:, 0], tgt.state.amplitudes)) == pytest.approx(
            1.0, abs=1e-10)


def test_eigen_residual_bound():
    for n in (2, 10, 100):
        sys_ = SpinSystem(n)
        for omega in (1e-3, 0.1, 1.0, 10.0, 100.0):
            tgt = ess_ground_state(sys_, omega)
            h = ladder_hamiltonian(sys_, 0.0, -omega)
            resid = np.linalg.norm(h @ tgt.state.amplitudes
                                   - tgt.eigenvalue * tgt.state.amplitudes)
            assert resid < 1e-10


def test_amplitudes_positive_and_even():
    for n in (2, 10, 40):
        sys_ = SpinSystem(n)
        for omega in (0.05, 0.5, 5.0):
            amps = ess_ground_state(sys_, omega).state.amplitudes
            assert np.all(amps.real > 0)
            assert np.all(amps.imag == 0)
            np.testing.assert_array_equal(amps, amps[::-1])


def test_contrast_monotone_in_omega():
    for n in (2, 10, 100):
        sys_ = SpinSystem(n)
        omegas = np.geomspace(1e-3, 100.0, 25)
        contrasts = [ess_ground_state(sys_, w).contrast for w in omegas]
        assert np.all(np.diff(contrasts) > 0)


def test_negative_omega_rejected():
    with pytest.raises(DomainError):
        ess_ground_state(SpinSystem(10), -0.5)


def test_for_contrast_examples():
    sys10 = SpinSystem(10)
    tgt = ess_for_contrast(sys10, 2.5)
    assert abs(tgt.contrast - 2.5) < 1e-8 * 5
    assert wineland_xi2(tgt.state) < 1.0
    assert tgt.contrast == pytest.approx(expectation(tgt.state, "sx"), abs=1e-12)


def test_for_contrast_high_contrast_limit():
    # contrast -> S is the coherent-state endpoint: omega diverges while the
    # fidelity to the x-polarized CSS and xi^2 both approach 1 from below
    sys10 = SpinSystem(10)
    css = coherent_state(sys10, np.pi / 2, 0.0)
    lo = ess_for_contrast(sys10, 0.95 * 5)
    hi = ess_for_contrast(sys10, 0.995 * 5)
    assert hi.omega_ratio > lo.omega_ratio
    assert fidelity(hi.state, css) > fidelity(lo.state, css)
    assert fidelity(hi.state, css) > 0.98
    assert wineland_xi2(lo.state) < wineland_xi2(hi.state) < 1.0


def test_for_contrast_regression_n100():
    tgt = ess_for_contrast(SpinSystem(100), 25.0)
    assert gain_db(wineland_xi2(tgt.state)) == pytest.approx(
        16.52078398028793, rel=1e-8)


def test_for_contrast_domain():
    sys10 = SpinSystem(10)
    with pytest.raises(DomainError):
        ess_for_contrast(sys10, 0.0)
    with pytest.raises(DomainError):
        ess_for_contrast(sys10, 5.0)
    with pytest.raises(DomainError):
        ess_for_contrast(sys10, -1.0)


def test_minimal_variance_among_equal_contrast_states():
    # mix the squeezed state with random directions, matching the contrast by
    # bisection on the mixing weight; no sampled state may beat Var(Sz)
    sys10 = SpinSystem(10)
    tgt = ess_for_contrast(sys10, 2.5)
    base = tgt.state.amplitudes
    var0 = expectation(tgt.state, "sz2") - expectation(tgt.state, "sz") ** 2
    rng = np.random.default_rng(99)

    def contrast_of(amp):
        return expectation(SpinState(sys10, amp / np.linalg.norm(amp)), "sx")

    wins = 0
    for _ in range(100):
        d = rng.normal(size=11) + 1j * rng.normal(size=11)
        d /= np.linalg.norm(d)
        lo, hi = 0.0, 1.0
        if contrast_of(base + hi * 0.0) < 2.5 - 1e-9:
            continue
        # find s where the mixed state has contrast 2.5 (s=0 gives 2.5 exactly)
        target_s = None
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            amp = (1 - mid) * base + mid * d
            if contrast_of(amp) >= 2.5:
                lo = mid
            else:
                hi = mid
        target_s = lo
        amp = (1 - target_s) * base + target_s * d
        st = SpinState(sys10, amp / np.linalg.norm(amp))
        if abs(expectation(st, "sx") - 2.5) > 1e-6:
            continue
        var = expectation(st, "sz2") - expectation(st, "sz") ** 2
        if var < var0 - 1e-12:
            wins += 1
    assert wins == 0
