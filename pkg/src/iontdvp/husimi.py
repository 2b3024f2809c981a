"""Energy (Husimi) function of the trap Hamiltonian on product coherent states.

With ``lambda_j = hbar / (M omega_j_ref)`` the generator realisation gives
``z^2 = lambda_a * 2 (K0a + K1a)`` and ``p_z^2 / 2M = hbar omega_a (K0a - K1a)``,
so every coherent moment ``<z^(2n)>`` equals ``lambda_a^n S_n(z_a)``. The energy
function is then a polynomial in ``xi_a, xi_r`` plus terms linear in ``eta``::

    H = A_r eta_r + A_a eta_a + B_r xi_r + B_a xi_a
        + C20 xi_r^2 + C11 xi_r xi_a + C02 xi_a^2
        + D30 xi_r^3 + D21 xi_r^2 xi_a + D12 xi_r xi_a^2 + D03 xi_a^3 + const
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from .disk import CoherentProductState, xi_eta, xi_eta_dzbar
from .errors import DomainError
from .su11 import q_moment, s_moment
from .trap import mode_weights, spring_constants, spring_parts

log = logging.getLogger(__name__)

COEFFICIENT_NAMES = (
    "A_a", "A_r", "B_a", "B_r",
    "C20", "C11", "C02",
    "D30", "D21", "D12", "D03",
    "const_term",
)


@dataclass(frozen=True)
class HusimiCoefficients:
    A_a: float
    A_r: float
    B_a: float
    B_r: float
    C20: float = 0.0
    C11: float = 0.0
    C02: float = 0.0
    D30: float = 0.0
    D21: float = 0.0
    D12: float = 0.0
    D03: float = 0.0
    const_term: float = 0.0
    t: float = 0.0
    Omega_rf: float = 1.0
    #: name -> (static part, amplitude of cos(Omega_rf t))
    time_profile: dict = field(default_factory=dict, compare=False)

    def vector(self):
        return np.array([getattr(self, n) for n in COEFFICIENT_NAMES])

    def at(self, t):
        """Coefficients at another time, from the affine time profile."""
        c = np.cos(self.Omega_rf * t)
        vals = {n: s + c * a for n, (s, a) in self.time_profile.items()}
        return HusimiCoefficients(**vals, t=t, Omega_rf=self.Omega_rf, time_profile=self.time_profile)

    @property
    def energy_scale(self):
        return max(abs(self.A_a), abs(self.A_r), abs(self.B_a), abs(self.B_r), 1e-300)


def length_scales(cfg):
    """``(lambda_a, lambda_r)``, the squared lengths per unit of ``2(K0 + K1)``."""
    return cfg.hbar / (cfg.M * cfg.omega_a_ref), cfg.hbar / (cfg.M * cfg.omega_r_ref)


def expectation_h4(s, cfg):
    """``<H4(rho, z)>`` in the product coherent state, in length^4."""
    la, lr = length_scales(cfg)
    wa, wr = s.axial.weight, s.radial.weight
    za, zr = s.axial.z, s.radial.z
    return (
        8 * la**2 * s_moment(2, za, wa)
        - 24 * la * lr * s_moment(1, za, wa) * s_moment(1, zr, wr)
        + 3 * lr**2 * s_moment(2, zr, wr)
    )


def expectation_h6(s, cfg):
    la, lr = length_scales(cfg)
    wa, wr = s.axial.weight, s.radial.weight
    za, zr = s.axial.z, s.radial.z
    S = lambda j, z, w: s_moment(j, z, w)  # noqa: E731
    return (
        16 * la**3 * S(3, za, wa)
        - 120 * la**2 * lr * S(2, za, wa) * S(1, zr, wr)
        + 90 * la * lr**2 * S(1, za, wa) * S(2, zr, wr)
        - 5 * lr**3 * S(3, zr, wr)
    )


def _coefficients(cfg, A, K_a, K_r):
    wa, wr = mode_weights(cfg)
    ka, kr = float(wa.kappa), float(wr.kappa)
    la, lr = length_scales(cfg)
    hb = cfg.hbar
    q1a, q2a, q3a = (q_moment(j, wa) for j in (1, 2, 3))
    q1r, q2r, q3r = (q_moment(j, wr) for j in (1, 2, 3))
    oct_ = cfg.Q * A * cfg.c_oct
    hex_ = cfg.Q * A * cfg.c_hex
    return {
        "A_a": hb * cfg.omega_a_ref * ka,
        "A_r": hb * cfg.omega_r_ref * kr,
        "B_a": 0.5 * K_a * la * q1a,
        "B_r": 0.5 * K_r * lr * q1r,
        "C20": oct_ * 3 * lr**2 * q2r,
        "C11": -oct_ * 24 * la * lr * q1a * q1r,
        "C02": oct_ * 8 * la**2 * q2a,
        "D30": -hex_ * 5 * lr**3 * q3r,
        "D21": hex_ * 90 * la * lr**2 * q1a * q2r,
        "D12": -hex_ * 120 * la**2 * lr * q2a * q1r,
        "D03": hex_ * 16 * la**3 * q3a,
        "const_term": -0.5 * cfg.omega_c * hb * cfg.l,
    }


def assemble(cfg, t=0.0):
    """Energy-function coefficients of the trap at time ``t``."""
    if cfg.drive_mode == "time_dependent":
        (ka_dc, ka_ac), (kr_dc, kr_ac) = spring_parts(cfg)
        static = _coefficients(cfg, cfg.U0, ka_dc, kr_dc)
        # every coefficient is affine in A, so the cosine part is a difference
        peak = _coefficients(cfg, cfg.U0 + cfg.V0, ka_dc + ka_ac, kr_dc + kr_ac)
        profile = {n: (static[n], peak[n] - static[n]) for n in COEFFICIENT_NAMES}
    else:
        sc = spring_constants(cfg, t)
        static = _coefficients(cfg, cfg.U0, sc.K_a, sc.K_r)
        profile = {n: (static[n], 0.0) for n in COEFFICIENT_NAMES}
    return HusimiCoefficients(
        A_a=0, A_r=0, B_a=0, B_r=0, Omega_rf=cfg.Omega_rf, time_profile=profile
    ).at(t)


def _xi_eta_pair(za, zr):
    xa, ea = xi_eta(za)
    xr, er = xi_eta(zr)
    return xa, ea, xr, er


def _polynomial(h, xa, xr):
    return (
        h.C20 * xr**2 + h.C11 * xr * xa + h.C02 * xa**2
        + h.D30 * xr**3 + h.D21 * xr**2 * xa + h.D12 * xr * xa**2 + h.D03 * xa**3
    )


def partials(h, z):
    """``(dH/dxi, dH/deta)`` per mode at disk coordinates ``z = (z_a, z_r)``."""
    xa, _, xr, _ = _xi_eta_pair(z[0], z[1])
    dxa = h.B_a + h.C11 * xr + 2 * h.C02 * xa + h.D21 * xr**2 + 2 * h.D12 * xr * xa + 3 * h.D03 * xa**2
    dxr = h.B_r + 2 * h.C20 * xr + h.C11 * xa + 3 * h.D30 * xr**2 + 2 * h.D21 * xr * xa + h.D12 * xa**2
    return np.array([dxa, dxr]), np.array([h.A_a, h.A_r])


def evaluate(h, s):
    if isinstance(s, CoherentProductState):
        za, zr = s.axial.z, s.radial.z
    else:
        za, zr = s
    xa, ea, xr, er = _xi_eta_pair(za, zr)
    return float(
        h.A_r * er + h.A_a * ea + h.B_r * xr + h.B_a * xa + _polynomial(h, xa, xr) + h.const_term
    )


def evaluate_grid(h, za, zr):
    """Vectorised :func:`evaluate` over broadcastable arrays of disk coordinates."""
    za = np.asarray(za, dtype=complex)
    zr = np.asarray(zr, dtype=complex)
    da, dr = 1 - np.abs(za) ** 2, 1 - np.abs(zr) ** 2
    if np.any(da <= 0) or np.any(dr <= 0):
        raise DomainError("grid leaves the unit disk")
    xa, ea = np.abs(1 + za) ** 2 / da, np.abs(1 - za) ** 2 / da
    xr, er = np.abs(1 + zr) ** 2 / dr, np.abs(1 - zr) ** 2 / dr
    return h.A_r * er + h.A_a * ea + h.B_r * xr + h.B_a * xa + _polynomial(h, xa, xr) + h.const_term


def gradient_z(h, z):
    """Wirtinger derivatives ``dH/dzbar`` for both modes at ``z = (z_a, z_r)``."""
    return gradient_from_vector(h.vector(), np.asarray(z, dtype=complex))


def gradient_from_vector(c, z):
    """:func:`gradient_z` on a raw coefficient vector ordered as ``COEFFICIENT_NAMES``."""
    A_a, A_r, B_a, B_r, C20, C11, C02, D30, D21, D12, D03, _ = c
    za, zr = z[0], z[1]
    da, dr = 1.0 - (za.real**2 + za.imag**2), 1.0 - (zr.real**2 + zr.imag**2)
    pa, ma, pr, mr = 1.0 + za, 1.0 - za, 1.0 + zr, 1.0 - zr
    xa = (pa.real**2 + pa.imag**2) / da
    xr = (pr.real**2 + pr.imag**2) / dr
    dxa = B_a + C11 * xr + 2 * C02 * xa + D21 * xr**2 + 2 * D12 * xr * xa + 3 * D03 * xa**2
    dxr = B_r + 2 * C20 * xr + C11 * xa + 3 * D30 * xr**2 + 2 * D21 * xr * xa + D12 * xa**2
    return np.array([
        (dxa * pa * pa - A_a * ma * ma) / (da * da),
        (dxr * pr * pr - A_r * mr * mr) / (dr * dr),
    ])


def gradient(h, s):
    g = gradient_z(h, s.z)
    return complex(g[0]), complex(g[1])


# ----------------------------------------------------------------- equilibria

_SEEDS = (0.0, 0.2, -0.2, 0.5, -0.5, 0.8, -0.8)


def _real_gradient(h, x):
    g = gradient_z(h, [complex(x[0], x[1]), complex(x[2], x[3])])
    # dH/dx = 2 Re dH/dzbar, dH/dy = 2 Im dH/dzbar
    return 2.0 * np.array([g[0].real, g[0].imag, g[1].real, g[1].imag])


def real_hessian(h, x, step=1e-6):
    x = np.asarray(x, dtype=float)
    H = np.empty((4, 4))
    for i in range(4):
        e = np.zeros(4)
        e[i] = step
        H[:, i] = (_real_gradient(h, x + e) - _real_gradient(h, x - e)) / (2 * step)
    return 0.5 * (H + H.T)


def classify(hess):
    if not np.all(np.isfinite(hess)):
        return "degenerate"
    ev = np.linalg.eigvalsh(hess)
    tiny = 1e-9 * max(np.max(np.abs(ev)), 1e-300)
    if np.any(np.abs(ev) <= tiny):
        return "degenerate"
    if np.all(ev > 0):
        return "minimum"
    if np.all(ev < 0):
        return "maximum"
    return "saddle"


def _inside(x, margin=1e-9):
    return abs(complex(x[0], x[1])) < 1 - margin and abs(complex(x[2], x[3])) < 1 - margin


def _newton(h, x, scale, max_iter=200, gtol=1e-10, xtol=1e-12):
    g = _real_gradient(h, x) / scale
    for _ in range(max_iter):
        gn = np.linalg.norm(g)
        if gn <= gtol:
            return x
        hess = real_hessian(h, x) / scale
        try:
            dx = -np.linalg.solve(hess, g)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(dx)):
            return None
        alpha = 1.0
        while alpha > 1e-12:
            xn = x + alpha * dx
            if _inside(xn):
                gn_new = _real_gradient(h, xn) / scale
                if np.linalg.norm(gn_new) < gn:
                    break
            alpha *= 0.5
        else:
            return None
        x, g = xn, gn_new
        if np.linalg.norm(alpha * dx) <= xtol:
            return x if np.linalg.norm(g) <= 1e3 * gtol else None
    return x if np.linalg.norm(g) <= gtol else None


def find_equilibria(cfg, gtol=1e-10):
    """Critical points of the time-frozen energy function over ``(z_a, z_r)``.

    Damped Newton runs start from every pair of real-axis seeds; the step is
    halved until the gradient norm decreases so that saddles are reachable.
    Returns ``[(state, classification), ...]`` with classification one of
    ``minimum``, ``saddle``, ``maximum`` or ``degenerate``.
    """
    if cfg.drive_mode not in ("static", "pseudopotential"):
        raise DomainError("equilibria need time-frozen coefficients (static or pseudopotential drive)")
    h = assemble(cfg, 0.0)
    scale = h.energy_scale
    found = []
    for sa in _SEEDS:
        for sr in _SEEDS:
            x = _newton(h, np.array([sa, 0.0, sr, 0.0]), scale, gtol=gtol)
            if x is None:
                continue
            if any(np.linalg.norm(x - y) < 1e-7 for y in found):
                continue
            found.append(x)
    if not found:
        log.warning("no critical point found from %d seeds", len(_SEEDS) ** 2)
    wa, wr = mode_weights(cfg)
    out = []
    for x in sorted(found, key=lambda v: tuple(np.round(v, 9))):
        x = np.where(np.abs(x) < 1e-15, 0.0, x)
        state = CoherentProductState.from_coordinates(
            complex(x[0], x[1]), complex(x[2], x[3]), k_a=wa.k, l=cfg.l, m_a=wa.m, m_r=wr.m
        )
        out.append((state, classify(real_hessian(h, x))))
    return out
