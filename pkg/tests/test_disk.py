import numpy as np
import pytest

from iontdvp.disk import (
    CoherentProductState,
    DiskField,
    DiskPoint,
    hamiltonian_vector_field,
    log_overlap_form,
    poisson_bracket,
    xi_eta,
    xi_eta_dzbar,
    xi_eta_flow_check,
)
from iontdvp.errors import BoundaryError, ConsistencyError, DomainError
from iontdvp.su11 import BargmannWeight


def fd_dzbar(f, z, h=1e-6):
    # d/dzbar = (d/dx + i d/dy) / 2
    return 0.5 * ((f(z + h) - f(z - h)) / (2 * h) + 1j * (f(z + 1j * h) - f(z - 1j * h)) / (2 * h))


def test_disk_point_domain():
    DiskPoint(0.999)
    for bad in (1.0, 1j, 2.0, complex("nan")):
        with pytest.raises(DomainError):
            DiskPoint(bad)


def test_xi_eta_examples():
    assert xi_eta(DiskPoint(0)) == (1.0, 1.0)
    xi, eta = xi_eta(DiskPoint(0.5))
    assert (xi, eta) == pytest.approx((3.0, 1 / 3))
    xi, eta = xi_eta(DiskPoint(0.3 + 0.4j))
    assert xi * eta >= 1.0  # equality only on the real axis


def test_xi_eta_derivatives_fd(rng):
    for _ in range(20):
        z = 0.8 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        dxi, deta = xi_eta_dzbar(z)
        assert dxi == pytest.approx(fd_dzbar(lambda u: xi_eta(u)[0], z), rel=1e-6, abs=1e-8)
        assert deta == pytest.approx(fd_dzbar(lambda u: xi_eta(u)[1], z), rel=1e-6, abs=1e-8)


def test_log_overlap_form():
    w = BargmannWeight(0.25)
    assert log_overlap_form(DiskPoint(0), w) == pytest.approx(0.5)
    z = 0.3 + 0.2j
    # d^2/dz dzbar of -2k ln(1 - |z|^2), by finite differences of the Laplacian / 4
    f = lambda u: -2 * 0.25 * np.log(1 - abs(u) ** 2)
    h = 1e-4
    lap = (f(z + h) + f(z - h) + f(z + 1j * h) + f(z - 1j * h) - 4 * f(z)) / h**2
    assert log_overlap_form(DiskPoint(z), w) == pytest.approx(lap / 4, rel=1e-6)
    with pytest.raises(DomainError):
        log_overlap_form(DiskPoint(z), BargmannWeight(0.25, 1))


def _zfield():
    return DiskField(lambda z: z, lambda z: 1.0, lambda z: 0.0)


def _zbarfield():
    return DiskField(lambda z: np.conj(z), lambda z: 0.0, lambda z: 1.0)


def test_bracket_of_coordinates():
    w = BargmannWeight(0.75, 1)
    z = 0.2 - 0.3j
    val = poisson_bracket(_zfield(), _zbarfield(), DiskPoint(z), w, real=False)
    assert val == pytest.approx((1 - abs(z) ** 2) ** 2 / (2j * 1.75))


def test_bracket_antisymmetry_and_leibniz(rng):
    w = BargmannWeight(1.0)
    xi = DiskField(lambda z: xi_eta(z)[0], lambda z: np.conj(xi_eta_dzbar(z)[0]))
    eta = DiskField(lambda z: xi_eta(z)[1], lambda z: np.conj(xi_eta_dzbar(z)[1]))
    for _ in range(10):
        p = DiskPoint(0.6 * rng.uniform() * np.exp(2j * np.pi * rng.uniform()))
        a = poisson_bracket(xi, eta, p, w)
        assert a == pytest.approx(-poisson_bracket(eta, xi, p, w))
        assert poisson_bracket(xi, xi, p, w) == pytest.approx(0.0, abs=1e-14)
        lhs = poisson_bracket(xi * eta, xi, p, w)
        rhs = xi.value(p.z) * poisson_bracket(eta, xi, p, w)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-14)


def test_bracket_rejects_complex_when_real_requested():
    with pytest.raises(ConsistencyError):
        poisson_bracket(_zfield(), _zbarfield(), DiskPoint(0.1), BargmannWeight(1.0))


def test_vector_field_is_hamiltonian_flow(rng):
    # H = a*xi + b*eta on each mode; dH/dt along the flow must vanish
    s = CoherentProductState.from_coordinates(0.3 + 0.1j, -0.2j, l=2)
    a, b = np.array([0.7, 1.3]), np.array([0.4, 0.9])

    def grad(z, t):
        dxi, deta = xi_eta_dzbar(z)
        return a * dxi + b * deta

    zdot = hamiltonian_vector_field(grad, s, hbar=0.5)
    g = grad(s.z, 0.0)
    dHdt = 2 * np.real(np.conj(g) * zdot)
    assert np.all(np.abs(dHdt) < 1e-14)


def test_vector_field_guard():
    s = CoherentProductState.from_coordinates(0.1, 0.2)
    with pytest.raises(BoundaryError):
        from iontdvp.disk import disk_velocity

        disk_velocity(lambda z, t: z, [0.1, 1 - 1e-13], s.kappas)


def test_xi_eta_flow_check_agrees():
    s = CoherentProductState.from_coordinates(0.3 + 0.2j, -0.1 + 0.4j, k_a=0.75, l=1, m_a=2)

    def dxi(z, t):
        xa = xi_eta(z[0])[0]
        return np.array([0.5 + 0.2 * xa, 1.1])

    def deta(z, t):
        return np.array([0.8, 0.3])

    xd, ed = xi_eta_flow_check(dxi, deta, s, hbar=2.0)
    assert np.all(np.isfinite(xd)) and np.all(np.isfinite(ed))


def test_state_validation():
    with pytest.raises(DomainError):
        CoherentProductState.from_coordinates(0.1, 0.1, k_a=0.5)
    s = CoherentProductState.from_coordinates(0.1, 0.2, l=3)
    assert s.radial.weight.k == 2.0
    assert np.allclose(s.kappas, [0.25, 2.0])
