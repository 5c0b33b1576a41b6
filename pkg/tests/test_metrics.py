import numpy as np
import pytest

from dicke_rap import (
    ContrastUndefinedError,
    DomainError,
    SpinState,
    SpinSystem,
    coherent_state,
    dicke_qfi_analytic,
    dicke_state,
    expectation,
    ess_for_contrast,
    free_evolve_oat,
    gain_db,
    qfi,
    qfi_triple,
    superposition_qfi_analytic,
    wineland_xi2,
)


def superposition_state(n, m, branch, zeta, phi):
    sys_ = SpinSystem(n)
    s = int(sys_.total_spin)
    amps = np.zeros(n + 1, complex)
    amps[s + m] = np.cos(zeta / 2)
    amps[s + m + branch] = np.exp(1j * phi) * np.sin(zeta / 2)
    return SpinState(sys_, amps)


def test_qfi_examples():
    sys10 = SpinSystem(10)
    assert qfi(dicke_state(sys10, 5), "x") == pytest.approx(10.0, rel=1e-12)
    assert qfi(dicke_state(sys10, 0), "z") == pytest.approx(0.0, abs=1e-12)
    assert qfi(dicke_state(sys10, 0), "x") == pytest.approx(60.0, rel=1e-12)
    with pytest.raises(DomainError):
        qfi(dicke_state(sys10, 0), "w")


def test_dicke_qfi_analytic_examples():
    assert dicke_qfi_analytic(10, 0, "x") == 60.0
    assert dicke_qfi_analytic(10, 5, "y") == 10.0
    assert dicke_qfi_analytic(4, 1, "x") == pytest.approx(
        qfi(dicke_state(SpinSystem(4), 1), "x"), rel=1e-12)
    assert dicke_qfi_analytic(10, 3, "z") == 0.0
    with pytest.raises(DomainError):
        dicke_qfi_analytic(10, 6, "x")


@pytest.mark.parametrize("n", [2, 4, 10])
def test_dicke_qfi_x_equals_y(n):
    sys_ = SpinSystem(n)
    for m in range(-n // 2, n // 2 + 1):
        st = dicke_state(sys_, m)
        fx, fy = qfi(st, "x"), qfi(st, "y")
        assert fx == pytest.approx(fy, rel=1e-10)
        assert fx == pytest.approx(dicke_qfi_analytic(n, m, "x"), rel=1e-10)


def test_superposition_qfi_examples():
    # zeta = 0 collapses to the bare Dicke value
    assert superposition_qfi_analytic(10, 0, 1, 0.0, 0.0, "x") == pytest.approx(60.0)
    # F_z = sin^2(zeta) regardless of the other arguments
    for n, m in [(10, 0), (10, 3), (4, -1)]:
        assert superposition_qfi_analytic(n, m, 1, np.pi / 2, 0.77, "z") == \
            pytest.approx(1.0, abs=1e-14)
    # constructed-state oracle
    val = superposition_qfi_analytic(10, 1, 1, np.pi / 3, np.pi / 5, "y")
    st = superposition_state(10, 1, 1, np.pi / 3, np.pi / 5)
    assert val == pytest.approx(qfi(st, "y"), abs=1e-10)


def test_superposition_qfi_random_agreement():
    rng = np.random.default_rng(19)
    for _ in range(100):
        n = 2 * rng.integers(1, 11)
        branch = int(rng.choice([-1, 1]))
        s = n // 2
        lo = -s if branch == 1 else -s + 1
        hi = s - 1 if branch == 1 else s
        m = int(rng.integers(lo, hi + 1))
        zeta = rng.uniform(0, np.pi)
        phi = rng.uniform(0, 2 * np.pi)
        st = superposition_state(n, m, branch, zeta, phi)
        for axis in ("x", "y", "z"):
            assert superposition_qfi_analytic(n, m, branch, zeta, phi, axis) == \
                pytest.approx(qfi(st, axis), abs=1e-10)


def test_superposition_qfi_domain_errors():
    with pytest.raises(DomainError):
        superposition_qfi_analytic(10, 5, 1, 0.3, 0.0, "x")
    with pytest.raises(DomainError):
        superposition_qfi_analytic(10, -5, -1, 0.3, 0.0, "x")
    with pytest.raises(DomainError):
        superposition_qfi_analytic(10, 0, 2, 0.3, 0.0, "x")


def test_qfi_invariant_under_generator_rotation():
    # F_z is unchanged by evolution generated by Sz^2-free z rotations; the
    # diagonal shearing phases also leave F_z alone
    sys10 = SpinSystem(10)
    st = coherent_state(sys10, 1.1, 0.3)
    fz0 = qfi(st, "z")
    assert qfi(free_evolve_oat(st, 1.7), "z") == pytest.approx(fz0, rel=1e-10)
    phased = SpinState(sys10, st.amplitudes * np.exp(1j * 0.9))
    assert qfi(phased, "z") == pytest.approx(fz0, rel=1e-10)


def test_wineland_examples():
    sys10 = SpinSystem(10)
    css = coherent_state(sys10, np.pi / 2, 0.0)
    assert wineland_xi2(css) == pytest.approx(1.0, rel=1e-10)
    with pytest.raises(ContrastUndefinedError):
        wineland_xi2(dicke_state(sys10, 0))


def test_wineland_matches_target_family():
    # regression pin: the minimal-xi2 state at contrast S/2 for ten atoms
    sys10 = SpinSystem(10)
    tgt = ess_for_contrast(sys10, 2.5)
    xi2 = wineland_xi2(tgt.state)
    var_sz = expectation(tgt.state, "sz2") - expectation(tgt.state, "sz") ** 2
    assert xi2 == pytest.approx(var_sz * 10 / 2.5 ** 2, rel=1e-12)
    assert xi2 == pytest.approx(0.18542539584028056, rel=1e-8)
    assert xi2 < 1.0


def test_gain_examples():
    assert gain_db(1.0) == 0.0
    assert gain_db(0.5) == pytest.approx(3.0102999566398120, rel=1e-12)
    assert gain_db(0.1) == pytest.approx(10.0, rel=1e-12)
    with pytest.raises(DomainError):
        gain_db(0.0)
    with pytest.raises(DomainError):
        gain_db(-1.0)


def test_cramer_rao_consistency():
    # xi^2/N >= 1/F_y follows from the Heisenberg uncertainty relation for
    # (Sy, Sz) with mean spin along x; equality holds for the coherent state
    sys10 = SpinSystem(10)
    states = [coherent_state(sys10, np.pi / 2, 0.0),
              ess_for_contrast(sys10, 2.5).state,
              ess_for_contrast(sys10, 4.0).state,
              coherent_state(sys10, 1.2, 0.1)]
    for st in states:
        xi2 = wineland_xi2(st)
        fy = qfi(st, "y")
        assert xi2 / 10 >= 1.0 / fy - 1e-12


def test_qfi_triple_bounds():
    sys_ = SpinSystem(8)
    rng = np.random.default_rng(23)
    for _ in range(20):
        a = rng.normal(size=9) + 1j * rng.normal(size=9)
        st = SpinState(sys_, a / np.linalg.norm(a))
        trip = qfi_triple(st)
        for v in (trip.f_x, trip.f_y, trip.f_z):
            assert 0.0 <= v <= 8 ** 2 + 1e-9
