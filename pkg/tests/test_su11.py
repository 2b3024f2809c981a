from fractions import Fraction

import numpy as np
import pytest

from _oracles import coherent_state, exact_basis_moment, expect, generators
from iontdvp.errors import DomainError, TruncationError
from iontdvp.su11 import (
    BargmannWeight,
    basis_moment,
    build_truncated_rep,
    casimir_eigenvalue,
    coherent_expectation_K,
    displacement_numeric,
    ladder_elements,
    omega_moment,
    q_moment,
    s_moment,
    xi_factor,
)

K_GRID = (0.25, 0.75, 1.0, 1.5, 2.0)


def test_weight_validation():
    with pytest.raises(DomainError):
        BargmannWeight(0.0)
    with pytest.raises(DomainError):
        BargmannWeight(0.25, -1)
    with pytest.raises(DomainError):
        BargmannWeight(0.25, 1.5)
    assert BargmannWeight(Fraction(3, 4), 2).kappa == Fraction(11, 4)


def test_ladder_elements_examples():
    r, l, d = ladder_elements(BargmannWeight(0.25, 0))
    assert r == pytest.approx(np.sqrt(0.5)) and l == 0 and d == 0.25
    r, l, d = ladder_elements(BargmannWeight(1.0, 0))
    assert r == pytest.approx(np.sqrt(2.0)) and d == 1.0
    w = BargmannWeight(0.75, 2)
    r, l, d = ladder_elements(w)
    assert (r, l, d) == pytest.approx((np.sqrt(10.5), np.sqrt(5.0), 2.75))
    rep = build_truncated_rep(w, 6)
    assert rep.Kplus[3, 2].real == pytest.approx(r, abs=1e-15)
    assert rep.Kminus[1, 2].real == pytest.approx(l, abs=1e-15)


def test_ladder_matches_boson_realisation():
    # k = 1/4 and 3/4 matrices from (a^dagger)^2 / 2 on even / odd oscillator states
    for k in (0.25, 0.75):
        K0, Kp, _ = generators(k, 8)
        rep = build_truncated_rep(BargmannWeight(k), 8)
        assert np.allclose(rep.K0, K0, atol=1e-14)
        assert np.allclose(rep.Kplus, Kp, atol=1e-13)


def test_truncated_rep_structure():
    rep = build_truncated_rep(BargmannWeight(0.25), 2)
    assert np.allclose(np.diag(rep.K0), [0.25, 1.25])
    rep = build_truncated_rep(BargmannWeight(1.5), 30)
    assert np.array_equal(rep.Kminus, rep.Kplus.conj().T)
    with pytest.raises(DomainError):
        build_truncated_rep(BargmannWeight(1.0), 1)


@pytest.mark.parametrize("k", K_GRID)
def test_commutators_and_casimir(k):
    n = 50
    rep = build_truncated_rep(BargmannWeight(k), n)
    K0, Kp, Km = rep.K0, rep.Kplus, rep.Kminus
    b = n - 2
    assert np.max(np.abs((K0 @ Kp - Kp @ K0 - Kp)[:b, :b])) < 1e-10
    assert np.max(np.abs((K0 @ Km - Km @ K0 + Km)[:b, :b])) < 1e-10
    assert np.max(np.abs((Km @ Kp - Kp @ Km - 2 * K0)[:b, :b])) < 1e-10
    C = rep.casimir()
    c = n - 2  # the last row is touched by the truncation
    assert np.max(np.abs(C[:c, :c] - casimir_eigenvalue(BargmannWeight(k)) * np.eye(c))) < 1e-10


def test_casimir_values():
    assert casimir_eigenvalue(BargmannWeight(0.25)) == -3 / 16
    assert casimir_eigenvalue(BargmannWeight(1.0)) == 0
    l = 3
    assert casimir_eigenvalue(BargmannWeight((l + 1) / 2)) == pytest.approx((l * l - 1) / 4)


def test_displacement_examples():
    w = BargmannWeight(0.25, 0)
    v = displacement_numeric(0.0, BargmannWeight(0.75, 3), 20)
    assert np.allclose(v, np.eye(20)[3])
    v = displacement_numeric(0.5, w, 200)
    assert abs(v[0]) == pytest.approx(0.75**0.25, abs=1e-12)
    rep = build_truncated_rep(w, 200)
    assert np.vdot(v, rep.K0 @ v).real == pytest.approx(5 / 12, abs=1e-12)


@pytest.mark.parametrize("k,m", [(0.25, 0), (0.75, 2), (1.0, 1), (1.5, 4)])
def test_displacement_matches_single_exponential(k, m, rng):
    for _ in range(3):
        z = 0.7 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        w = BargmannWeight(k, m)
        v = displacement_numeric(z, w, 300)
        ref, _ = coherent_state(z, k, m, 300)
        # identical up to a global phase
        ph = np.vdot(ref, v)
        assert abs(abs(ph) - 1.0) < 1e-10
        assert np.linalg.norm(v - ph * ref) < 1e-9
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)


def test_displacement_errors():
    with pytest.raises(DomainError):
        displacement_numeric(1.0, BargmannWeight(0.25), 50)
    with pytest.raises(TruncationError):
        displacement_numeric(0.95, BargmannWeight(0.25), 50)


def test_coherent_expectation_examples():
    k0, kp, km = coherent_expectation_K(0.0, BargmannWeight(0.75, 2))
    assert (k0, kp, km) == (2.75, 0, 0)
    assert coherent_expectation_K(0.5, BargmannWeight(0.25))[0] == pytest.approx(5 / 12)
    assert coherent_expectation_K(0.6j, BargmannWeight(1.0, 2))[0] == pytest.approx(6.375)
    psi, (K0, Kp, _) = coherent_state(0.6j, 1.0, 2, 300)
    assert expect(psi, K0).real == pytest.approx(6.375, rel=1e-10)


def test_omega_moment_examples():
    assert omega_moment(1, 1, 0.0, BargmannWeight(0.7)) == pytest.approx(0.7)
    assert omega_moment(1, 2, 0.0, BargmannWeight(0.25)) == pytest.approx(3 / 16)
    r = 0.4
    w = BargmannWeight(1.5, 2)
    assert omega_moment(-1, 1, r, w) == pytest.approx(3.5 * (1 - r) / (1 + r))
    with pytest.raises(DomainError):
        omega_moment(0, 1, 0.1, w)


def test_omega_moment_minus_sign_vs_oracle(rng):
    for k, m in [(0.25, 1), (1.0, 3)]:
        z = 0.5 * np.exp(1j * rng.uniform(0, 2 * np.pi))
        psi, (K0, Kp, Km) = coherent_state(z, k, m, 300)
        E = K0 - 0.5 * (Kp + Km)
        v = psi
        for n in (1, 2, 3):
            v = E @ v
            ref = np.vdot(psi, v).real
            assert omega_moment(-1, n, z, BargmannWeight(k, m)) == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("k", [Fraction(1, 4), Fraction(3, 4), Fraction(1), Fraction(3, 2), Fraction(2)])
def test_q_moments_exact(k):
    for m in range(6):
        w = BargmannWeight(k, m)
        for j in (1, 2, 3):
            ref = 2**j * exact_basis_moment(k, m, j)
            assert q_moment(j, w, exact=True) == ref
            assert basis_moment(w, j, exact=True) * 2**j == ref


def test_q_moment_examples():
    assert q_moment(1, BargmannWeight(0.3)) == pytest.approx(0.6)
    assert q_moment(2, BargmannWeight(0.25)) == pytest.approx(0.75)
    # direct walk count: 945/8 (the m-linear terms of the usual printed Q_3 would give 993/8)
    assert q_moment(3, BargmannWeight(Fraction(3, 4), 1), exact=True) == Fraction(945, 8)
    with pytest.raises(DomainError):
        q_moment(4, BargmannWeight(1.0))


def test_s_moment_examples():
    w = BargmannWeight(0.25)
    assert s_moment(2, 0.0, w) == pytest.approx(q_moment(2, w))
    assert xi_factor(0.5) == pytest.approx(3.0)
    assert s_moment(1, 0.5, w) == pytest.approx(1.5)
    assert s_moment(2, 0.5, w) == pytest.approx(6.75)
    psi, (K0, Kp, Km) = coherent_state(0.5, 0.25, 0, 200)
    X = 2 * K0 + Kp + Km
    assert np.vdot(psi, X @ X @ psi).real == pytest.approx(6.75, rel=1e-10)
