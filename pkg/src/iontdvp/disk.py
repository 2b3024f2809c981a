"""Phase-space geometry on the unit disk and on the axial x radial bidisk."""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._validation import DISK_GUARD, check_disk, check_nonneg_int
from .errors import BoundaryError, ConsistencyError, DomainError
from .su11 import BargmannWeight

#: imaginary residue tolerated when a bracket of real fields is made real
REAL_RESIDUE_TOL = 1e-12


@dataclass(frozen=True)
class DiskPoint:
    z: complex

    def __post_init__(self):
        object.__setattr__(self, "z", check_disk(self.z))


@dataclass(frozen=True)
class ModeState:
    point: DiskPoint
    weight: BargmannWeight

    @property
    def z(self):
        return self.point.z

    @property
    def kappa(self):
        return float(self.weight.kappa)


@dataclass(frozen=True)
class CoherentProductState:
    """Product coherent state ``psi_a(z_a) psi_r(z_r)`` for orbital number ``l``."""

    axial: ModeState
    radial: ModeState
    l: int = 0

    def __post_init__(self):
        check_nonneg_int(self.l, "l")
        if self.axial.weight.k not in (0.25, 0.75):
            raise DomainError(f"axial Bargmann index must be 1/4 or 3/4, got {self.axial.weight.k!r}")
        if self.radial.weight.k != (self.l + 1) / 2:
            raise DomainError(
                f"radial Bargmann index {self.radial.weight.k!r} does not match (l+1)/2 for l={self.l}"
            )

    @classmethod
    def from_coordinates(cls, z_a, z_r, k_a=0.25, l=0, m_a=0, m_r=0):
        return cls(
            ModeState(DiskPoint(z_a), BargmannWeight(k_a, m_a)),
            ModeState(DiskPoint(z_r), BargmannWeight((l + 1) / 2, m_r)),
            l,
        )

    def with_coordinates(self, z_a, z_r):
        return CoherentProductState(
            ModeState(DiskPoint(z_a), self.axial.weight),
            ModeState(DiskPoint(z_r), self.radial.weight),
            self.l,
        )

    @property
    def z(self):
        return np.array([self.axial.z, self.radial.z])

    @property
    def kappas(self):
        return np.array([self.axial.kappa, self.radial.kappa])


@dataclass(frozen=True)
class DiskField:
    """A scalar field on one disk with its Wirtinger derivatives.

    ``d_dzbar`` defaults to the conjugate of ``d_dz``, which is right for
    real-valued fields.
    """

    value: Callable[[complex], complex]
    d_dz: Callable[[complex], complex]
    d_dzbar: Optional[Callable[[complex], complex]] = None

    def dzbar(self, z):
        if self.d_dzbar is None:
            return np.conj(self.d_dz(z))
        return self.d_dzbar(z)

    def __mul__(self, other):
        return DiskField(
            lambda z: self.value(z) * other.value(z),
            lambda z: self.d_dz(z) * other.value(z) + self.value(z) * other.d_dz(z),
            lambda z: self.dzbar(z) * other.value(z) + self.value(z) * other.dzbar(z),
        )


def _as_complex(p):
    return p.z if isinstance(p, DiskPoint) else check_disk(p)


def xi_eta(p):
    """Real disk coordinates ``(xi, eta)``; ``xi`` tracks position^2, ``eta`` momentum^2."""
    z = _as_complex(p)
    d = 1.0 - abs(z) ** 2
    return abs(1.0 + z) ** 2 / d, abs(1.0 - z) ** 2 / d


def xi_eta_dzbar(z):
    """``(d xi / d zbar, d eta / d zbar)`` in closed form."""
    d2 = (1.0 - abs(z) ** 2) ** 2
    return (1.0 + z) ** 2 / d2, -((1.0 - z) ** 2) / d2


def log_overlap_form(p, w):
    """``d^2 ln N / dz dzbar`` for the lowest-weight overlap ``N = (1 - |z|^2)^(-2k)``."""
    if w.m != 0:
        raise DomainError("the closed-form overlap is only available for m = 0")
    z = _as_complex(p)
    return 2.0 * float(w.k) / (1.0 - abs(z) ** 2) ** 2


def bracket_coefficient(z, kappa):
    return (1.0 - abs(z) ** 2) ** 2 / (2j * kappa)


def poisson_bracket(f, g, p, w, real=True):
    """Disk Poisson bracket ``{f, g}`` weighted by ``1 / (k + m)``.

    With ``real=True`` the result is checked to be real (imaginary part at most
    ``REAL_RESIDUE_TOL`` relative) and returned as a float. Pass ``real=False``
    for complex test functions such as ``z`` and ``conj(z)``.
    """
    z = _as_complex(p)
    val = bracket_coefficient(z, float(w.kappa)) * (f.d_dz(z) * g.dzbar(z) - f.dzbar(z) * g.d_dz(z))
    if not real:
        return complex(val)
    scale = max(abs(val), 1.0)
    if abs(val.imag) > REAL_RESIDUE_TOL * scale:
        raise ConsistencyError(f"bracket of real fields has imaginary part {val.imag:.3g}")
    return float(val.real)


def _guard(z):
    if np.any(np.abs(z) >= 1.0 - DISK_GUARD):
        raise BoundaryError(f"state reached the disk boundary guard: |z| = {np.max(np.abs(z)):.17g}")


def hamiltonian_vector_field(grad, s, t=0.0, hbar=1.0):
    """Time derivative of ``(z_a, z_r)`` under a Hamiltonian on the bidisk.

    Parameters
    ----------
    grad : callable
        ``grad(z, t) -> array([dH/dzbar_a, dH/dzbar_r])`` with ``z`` the pair of
        disk coordinates.
    s : CoherentProductState or array_like
        Current point. Raw arrays must be accompanied by ``kappa`` through
        :func:`disk_velocity`.
    hbar : float
        Action unit dividing the energy gradient.
    """
    return disk_velocity(grad, s.z, s.kappas, t, hbar)


def disk_velocity(grad, z, kappas, t=0.0, hbar=1.0):
    z = np.asarray(z, dtype=complex)
    _guard(z)
    d = 1.0 - np.abs(z) ** 2
    return d**2 / (2j * hbar * kappas) * np.asarray(grad(z, t))


def xi_eta_flow_check(dH_dxi, dH_deta, s, t=0.0, hbar=1.0, rtol=1e-9):
    """Rates of ``xi`` and ``eta`` per mode, computed two ways.

    ``dH_dxi(z, t)`` and ``dH_deta(z, t)`` return per-mode partial derivatives of
    ``H(xi_a, xi_r, eta_a, eta_r)``. The closed-form rates are compared with the
    chain rule applied to the disk velocity; disagreement beyond ``rtol``
    raises :class:`ConsistencyError`. Returns the chain-rule values.
    """
    z = s.z
    kappas = s.kappas
    hx = np.asarray(dH_dxi(z, t), dtype=float)
    he = np.asarray(dH_deta(z, t), dtype=float)
    dxi, deta = xi_eta_dzbar(z)

    def grad(zz, tt):
        return hx * dxi + he * deta

    zdot = disk_velocity(grad, z, kappas, t, hbar)
    # d xi/dt = 2 Re(d xi/dz * zdot) since xi is real and d xi/dz = conj(d xi/dzbar)
    xi_dot = 2.0 * np.real(np.conj(dxi) * zdot)
    eta_dot = 2.0 * np.real(np.conj(deta) * zdot)

    pref = (2.0 / (1j * hbar * kappas)) * (z - np.conj(z)) / (1.0 - np.abs(z) ** 2)
    xi_direct = np.real(pref * he)
    eta_direct = np.real(-pref * hx)
    for a, b, name in ((xi_dot, xi_direct, "xi"), (eta_dot, eta_direct, "eta")):
        scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-300)
        err = np.abs(a - b)
        if np.any((err > rtol * scale) & (err > 1e-15)):
            raise ConsistencyError(f"{name} rate mismatch: {a} vs {b}")
    return xi_dot, eta_dot
