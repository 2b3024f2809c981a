import numpy as np
import pytest

from _oracles import ProductOracle, ladder_generators
from iontdvp.disk import CoherentProductState
from iontdvp.errors import DomainError
from iontdvp.husimi import (
    COEFFICIENT_NAMES,
    assemble,
    evaluate,
    evaluate_grid,
    expectation_h4,
    expectation_h6,
    find_equilibria,
    gradient,
    real_hessian,
)
from iontdvp.su11 import BargmannWeight, q_moment, s_moment
from iontdvp.trap import TrapConfig, drive, spring_constants, with_mathieu


def random_disk(rng, rmax=0.6):
    return rmax * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())


def random_setup(rng, c_oct=0.0, c_hex=0.0):
    cfg = TrapConfig.dimensionless(
        B0=rng.uniform(0, 1.5), U0=rng.uniform(-0.2, 0.2), V0=rng.uniform(-0.3, 0.3),
        omega_a_ref=rng.uniform(0.2, 1.5), omega_r_ref=rng.uniform(0.2, 1.5),
        l=int(rng.integers(0, 3)), m_a=int(rng.integers(0, 3)), m_r=int(rng.integers(0, 3)),
        axial_sector=float(rng.choice([0.25, 0.75])), c_oct=c_oct, c_hex=c_hex,
    )
    s = CoherentProductState.from_coordinates(
        random_disk(rng), random_disk(rng), k_a=cfg.axial_sector, l=cfg.l, m_a=cfg.m_a, m_r=cfg.m_r
    )
    return cfg, s


def oracle_for(cfg, n=300):
    return ProductOracle(cfg.axial_sector, cfg.l, cfg.omega_a_ref, cfg.omega_r_ref, cfg.hbar, cfg.M, n)


def test_h4_corrected_cross_term_matches_oracle(rng):
    for _ in range(10):
        cfg, s = random_setup(rng)
        o = oracle_for(cfg)
        pa, pr = o.states(s.axial.z, s.radial.z, cfg.m_a, cfg.m_r)
        ref = o.multipole(4, pa, pr)
        assert expectation_h4(s, cfg) == pytest.approx(ref, rel=1e-8)


def test_h4_product_factorisation(rng):
    cfg, _ = random_setup(rng)
    o = oracle_for(cfg, n=40)
    pa, pr = o.states(0.2 - 0.1j, 0.15j, cfg.m_a, cfg.m_r)
    # <z^2 rho^2> for the product state is the product of the one-mode moments
    full = np.kron(o.z2, np.eye(o.n)) @ np.kron(np.eye(o.n), o.rho2)
    psi = np.kron(pa, pr)
    assert np.vdot(psi, full @ psi).real == pytest.approx(o.power(pa, o.z2, 1) * o.power(pr, o.rho2, 1), rel=1e-10)


def test_h4_origin_lambda_one_k_half():
    # generic k = 1/2 on both factors, lambda = 1: 8 Q2 - 24 Q1^2 + 3 Q2 with Q1 = 1, Q2 = 2
    K0, Kp, Km = ladder_generators(0.5, 40)
    X = 2 * K0 + Kp + Km
    e0 = np.eye(40)[0]
    q1, q2 = (e0 @ X @ e0).real, (e0 @ X @ X @ e0).real
    assert (q1, q2) == pytest.approx((1.0, 2.0))
    assert 8 * q2 - 24 * q1 * q1 + 3 * q2 == pytest.approx(-2.0)
    w = BargmannWeight(0.5)
    assert 8 * q_moment(2, w) - 24 * q_moment(1, w) ** 2 + 3 * q_moment(2, w) == pytest.approx(-2.0)


def test_h6_matches_oracle(rng):
    for _ in range(10):
        cfg, s = random_setup(rng)
        o = oracle_for(cfg)
        pa, pr = o.states(s.axial.z, s.radial.z, cfg.m_a, cfg.m_r)
        assert expectation_h6(s, cfg) == pytest.approx(o.multipole(6, pa, pr), rel=1e-7)


def test_h6_pure_axial_term(rng):
    cfg, s = random_setup(rng)
    o = oracle_for(cfg)
    pa, _ = o.states(s.axial.z, s.radial.z, cfg.m_a, cfg.m_r)
    la = cfg.hbar / (cfg.M * cfg.omega_a_ref)
    assert 16 * la**3 * s_moment(3, s.axial.z, s.axial.weight) == pytest.approx(16 * o.power(pa, o.z2, 3), rel=1e-8)


@pytest.mark.parametrize("c_oct,c_hex,rel", [(0.0, 0.0, 1e-8), (0.05, 0.0, 1e-7), (0.02, 0.01, 1e-7)])
def test_master_equivalence(rng, c_oct, c_hex, rel):
    for _ in range(6):
        cfg, s = random_setup(rng, c_oct, c_hex)
        t = rng.uniform(0, 2 * np.pi)
        o = oracle_for(cfg)
        pa, pr = o.states(s.axial.z, s.radial.z, cfg.m_a, cfg.m_r)
        sc = spring_constants(cfg, t)
        A = drive(cfg, t)
        ref = o.energy(pa, pr, sc.K_a, sc.K_r, const=-0.5 * cfg.omega_c * cfg.hbar * cfg.l,
                       oct_scale=cfg.Q * A * c_oct, hex_scale=cfg.Q * A * c_hex)
        assert evaluate(assemble(cfg, t), s) == pytest.approx(ref, rel=rel)


def test_kinetic_coefficient_factor_one(rng):
    # <p^2/2M> alone fixes the eta coefficient: hbar w (k + m), not twice that
    cfg, s = random_setup(rng)
    o = oracle_for(cfg)
    pa, _ = o.states(s.axial.z, s.radial.z, cfg.m_a, cfg.m_r)
    h = assemble(cfg.replace(U0=0.0, V0=0.0), 0.0)
    eta_a = abs(1 - s.axial.z) ** 2 / (1 - abs(s.axial.z) ** 2)
    assert h.A_a * eta_a == pytest.approx(o.power(pa, o.pz2, 1) / 2, rel=1e-9)


def test_radial_realisation_spectrum():
    l, w = 2, 0.7
    o = ProductOracle(0.25, l, 1.0, w, n=60)
    H = o.kin_r + 0.5 * w * w * o.rho2
    ev = np.sort(np.linalg.eigvalsh(H))[:5]
    assert ev == pytest.approx(w * (2 * np.arange(5) + l + 1), rel=1e-10)


def test_quadrupole_reduction_and_static_profile():
    cfg = TrapConfig.dimensionless(B0=0.5, U0=0.1, V0=0.0)
    h = assemble(cfg, 0.3)
    assert all(getattr(h, n) == 0 for n in ("C20", "C11", "C02", "D30", "D21", "D12", "D03"))
    assert all(a == 0 for _, a in h.time_profile.values())
    assert assemble(cfg, 5.0).vector() == pytest.approx(h.vector())
    assert h.A_a > 0 and h.A_r > 0


def test_matched_frequency_identity():
    cfg = TrapConfig.dimensionless(B0=1.0, U0=-0.1)
    sc = spring_constants(cfg)
    cfg = cfg.replace(omega_a_ref=np.sqrt(sc.K_a), omega_r_ref=np.sqrt(sc.K_r))
    h = assemble(cfg)
    assert h.A_a == pytest.approx(h.B_a) and h.A_r == pytest.approx(h.B_r)


def test_affine_time_profile(rng):
    cfg = with_mathieu(TrapConfig.dimensionless(c_oct=0.03, c_hex=0.01, B0=0.4), 0.02, 0.3)
    h0 = assemble(cfg, 0.0)
    for t in rng.uniform(0, 10, 5):
        ht = assemble(cfg, t)
        prof = np.array([h0.time_profile[n] for n in COEFFICIENT_NAMES])
        assert ht.vector() == pytest.approx(prof[:, 0] + np.cos(t) * prof[:, 1], rel=1e-13, abs=1e-15)


def test_evaluate_origin_and_grid(rng):
    cfg = TrapConfig.dimensionless(B0=0.4, U0=-0.05, c_oct=0.01, c_hex=0.002, l=1)
    h = assemble(cfg)
    s0 = CoherentProductState.from_coordinates(0, 0, l=1)
    v = h.vector()
    assert evaluate(h, s0) == pytest.approx(v.sum())
    za = np.array([random_disk(rng) for _ in range(5)])
    zr = np.array([random_disk(rng) for _ in range(5)])
    grid = evaluate_grid(h, za, zr)
    assert grid == pytest.approx([evaluate(h, (a, r)) for a, r in zip(za, zr)], rel=1e-14)


def _fd_gradient(h, s, step=1e-6):
    out = []
    for mode in (0, 1):
        def f(dz):
            z = s.z.copy()
            z[mode] += dz
            return evaluate(h, tuple(z))
        dx = (f(step) - f(-step)) / (2 * step)
        dy = (f(1j * step) - f(-1j * step)) / (2 * step)
        out.append(0.5 * (dx + 1j * dy))
    return out


def test_gradient_origin_and_matched():
    cfg = TrapConfig.dimensionless(B0=1.0, U0=-0.1, omega_a_ref=0.3)
    h = assemble(cfg)
    g = gradient(h, CoherentProductState.from_coordinates(0, 0))
    assert g[0] == pytest.approx(h.B_a - h.A_a)
    sc = spring_constants(cfg)
    h = assemble(cfg.replace(omega_a_ref=np.sqrt(sc.K_a), omega_r_ref=np.sqrt(sc.K_r)))
    assert np.allclose(gradient(h, CoherentProductState.from_coordinates(0, 0)), 0, atol=1e-15)


def test_gradient_vs_finite_differences(rng):
    for _ in range(30):
        cfg, s = random_setup(rng, c_oct=rng.uniform(-0.05, 0.05), c_hex=rng.uniform(-0.01, 0.01))
        h = assemble(cfg, rng.uniform(0, 6))
        g = np.array(gradient(h, s))
        fd = np.array(_fd_gradient(h, s))
        assert np.abs(g - fd).max() <= 1e-6 * max(np.abs(fd).max(), h.energy_scale)


def _matched(**kw):
    cfg = TrapConfig.dimensionless(B0=1.0, U0=-0.1, drive_mode="static", **kw)
    sc = spring_constants(cfg)
    return cfg.replace(omega_a_ref=np.sqrt(sc.K_a), omega_r_ref=np.sqrt(sc.K_r))


def test_equilibria_matched_origin():
    eq = find_equilibria(_matched())
    assert len(eq) == 1
    s, kind = eq[0]
    assert kind == "minimum" and np.max(np.abs(s.z)) <= 1e-10


def test_equilibria_defocusing_axial_has_no_minimum():
    # U0 > 0 with Q c_quad < 0 gives K_a < 0, so B_a < 0
    cfg = TrapConfig.dimensionless(B0=1.0, U0=0.05, omega_a_ref=0.3, drive_mode="static")
    assert assemble(cfg).B_a < 0
    kinds = [k for _, k in find_equilibria(cfg)]
    assert "minimum" not in kinds
    # H decreases monotonically along the real axis towards the boundary
    h = assemble(cfg)
    x = np.linspace(0, 0.99, 200)
    e = evaluate_grid(h, x, 0.0)
    assert np.all(np.diff(e[100:]) < 0)


def test_equilibria_octopole_vs_grid():
    cfg = _matched(c_oct=-0.002)
    eq = [s for s, k in find_equilibria(cfg) if k == "minimum"]
    assert len(eq) == 1
    s = eq[0]
    h = assemble(cfg)
    x = np.array([s.axial.z.real, s.axial.z.imag, s.radial.z.real, s.radial.z.imag])
    assert np.all(np.linalg.eigvalsh(real_hessian(h, x)) > 0)
    assert abs(s.axial.z) > 1e-4  # displaced from the origin


def test_equilibria_requires_frozen_coefficients():
    with pytest.raises(DomainError):
        find_equilibria(TrapConfig.dimensionless())
