"""Combined Paul-Penning trap: parameters, drive, spring constants, multipoles."""
from dataclasses import dataclass, fields, replace

import numpy as np

from .errors import DomainError
from .su11 import BargmannWeight

DRIVE_MODES = ("time_dependent", "static", "pseudopotential")
HBAR_SI = 1.054571817e-34


@dataclass(frozen=True)
class TrapConfig:
    """Physical trap parameters in SI units (or any consistent unit system).

    The potential is ``A(t) * (c_quad * H2 + c_oct * H4 + c_hex * H6)`` with
    ``A(t) = U0 + V0 cos(Omega_rf t)`` and ``c_quad = -1 / (r0^2 + 2 z0^2)``.
    ``omega_a_ref`` and ``omega_r_ref`` fix the generator realisation, that is
    which family of squeezed states the disk coordinates describe.
    """

    Q: float = 1.0
    M: float = 1.0
    B0: float = 0.0
    U0: float = 0.0
    V0: float = 0.0
    Omega_rf: float = 1.0
    r0: float = 1.0
    z0: float = 1.0 / np.sqrt(2.0)
    c_oct: float = 0.0
    c_hex: float = 0.0
    omega_a_ref: float = 1.0
    omega_r_ref: float = 1.0
    l: int = 0
    m_a: int = 0
    m_r: int = 0
    axial_sector: float = 0.25
    drive_mode: str = "time_dependent"
    hbar: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            if f.type is float:
                v = getattr(self, f.name)
                if isinstance(v, bool) or not np.isfinite(float(v)):
                    raise DomainError(f"{f.name} must be a finite number, got {v!r}")
                object.__setattr__(self, f.name, float(v))
        if not self.M > 0:
            raise DomainError("M must be positive")
        if self.drive_mode not in DRIVE_MODES:
            raise DomainError(f"drive_mode must be one of {DRIVE_MODES}, got {self.drive_mode!r}")
        if self.drive_mode != "static" and not self.Omega_rf > 0:
            raise DomainError("Omega_rf must be positive for a driven trap")
        if not (self.omega_a_ref > 0 and self.omega_r_ref > 0):
            raise DomainError("reference frequencies must be positive")
        if not (self.r0 > 0 and self.z0 > 0):
            raise DomainError("trap semiaxes must be positive")
        if not self.hbar > 0:
            raise DomainError("hbar must be positive")
        if self.axial_sector not in (0.25, 0.75):
            raise DomainError(f"axial_sector must be 1/4 or 3/4, got {self.axial_sector!r}")
        for name in ("l", "m_a", "m_r"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 0:
                raise DomainError(f"{name} must be a non-negative integer")
            object.__setattr__(self, name, int(v))

    @classmethod
    def dimensionless(cls, **kwargs):
        """Units with ``hbar = M = Omega_rf = 1``."""
        kwargs.setdefault("hbar", 1.0)
        kwargs.setdefault("M", 1.0)
        kwargs.setdefault("Omega_rf", 1.0)
        return cls(**kwargs)

    @property
    def omega_c(self):
        return self.Q * self.B0 / self.M

    @property
    def c_quad(self):
        return -1.0 / (self.r0**2 + 2.0 * self.z0**2)

    @property
    def period(self):
        return 2.0 * np.pi / self.Omega_rf

    def replace(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class SpringConstants:
    K_r: float
    K_a: float
    t: float


def drive(cfg, t):
    if cfg.drive_mode == "time_dependent":
        return cfg.U0 + cfg.V0 * np.cos(cfg.Omega_rf * t)
    return cfg.U0


def spring_parts(cfg):
    """Static and cosine amplitudes of ``(K_a, K_r)``: ``K(t) = K_dc + K_ac cos(Omega t)``."""
    qc = cfg.Q * cfg.c_quad
    ka = (4.0 * qc * cfg.U0, 4.0 * qc * cfg.V0)
    kr = (cfg.M * cfg.omega_c**2 / 4.0 - 2.0 * qc * cfg.U0, -2.0 * qc * cfg.V0)
    return ka, kr


def spring_constants(cfg, t=0.0):
    (ka_dc, ka_ac), (kr_dc, kr_ac) = spring_parts(cfg)
    if cfg.drive_mode == "pseudopotential":
        avg = 2.0 * cfg.M * cfg.Omega_rf**2
        return SpringConstants(kr_dc + kr_ac**2 / avg, ka_dc + ka_ac**2 / avg, t)
    A = drive(cfg, t)
    qc = cfg.Q * cfg.c_quad
    return SpringConstants(cfg.M * cfg.omega_c**2 / 4.0 - 2.0 * qc * A, 4.0 * qc * A, t)


def harmonic_polynomial(order, rho, z):
    """Axially symmetric harmonic polynomials ``H2``, ``H4`` and ``H6``."""
    r2 = np.asarray(rho, dtype=float) ** 2
    z2 = np.asarray(z, dtype=float) ** 2
    if order == 2:
        return 2 * z2 - r2
    if order == 4:
        return 8 * z2**2 - 24 * z2 * r2 + 3 * r2**2
    if order == 6:
        return 16 * z2**3 - 120 * z2**2 * r2 + 90 * z2 * r2**2 - 5 * r2**3
    raise DomainError(f"unsupported multipole order {order!r}")


def bargmann_indices(cfg):
    if cfg.axial_sector not in (0.25, 0.75):
        raise DomainError(f"axial_sector must be 1/4 or 3/4, got {cfg.axial_sector!r}")
    return cfg.axial_sector, (cfg.l + 1) / 2


def mode_weights(cfg):
    k_a, k_r = bargmann_indices(cfg)
    return BargmannWeight(k_a, cfg.m_a), BargmannWeight(k_r, cfg.m_r)


def mathieu_parameters(cfg):
    """``(a_z, q_z, a_r, q_r)`` for ``x'' + (a - 2q cos 2tau) x = 0`` with ``tau = Omega t / 2``."""
    if not cfg.Omega_rf > 0:
        raise DomainError("Omega_rf must be positive")
    s = 4.0 / (cfg.M * cfg.Omega_rf**2)
    (ka_dc, ka_ac), (kr_dc, kr_ac) = spring_parts(cfg)
    return s * ka_dc, -0.5 * s * ka_ac, s * kr_dc, -0.5 * s * kr_ac


def voltages_for(cfg, a_z, q_z):
    """Inverse of the axial Mathieu mapping: ``(U0, V0)`` giving ``(a_z, q_z)``."""
    qc = cfg.Q * cfg.c_quad
    if qc == 0:
        raise DomainError("Q * c_quad vanishes; axial Mathieu parameters are not adjustable")
    u0 = a_z * cfg.M * cfg.Omega_rf**2 / (16.0 * qc)
    v0 = -q_z * cfg.M * cfg.Omega_rf**2 / (8.0 * qc)
    return u0, v0


def with_mathieu(cfg, a_z, q_z):
    u0, v0 = voltages_for(cfg, a_z, q_z)
    return cfg.replace(U0=u0, V0=v0)
