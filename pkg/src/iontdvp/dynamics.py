"""Coherent-state dynamics: trajectories, monodromy, stability maps and quasienergies."""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _rk
from ._validation import DISK_GUARD
from .disk import CoherentProductState, disk_velocity
from .errors import BoundaryError, ConsistencyError, DomainError, UnstableModeError
from .husimi import COEFFICIENT_NAMES, assemble, evaluate_grid, gradient_from_vector, length_scales
from .su11 import xi_factor
from .trap import mode_weights, spring_constants, with_mathieu

log = logging.getLogger(__name__)

MARGINAL_TOL = 1e-9
MONODROMY_TOL = 1e-12
MODES = ("axial", "radial")
# local error control runs this much tighter than the user tolerance, so that
# energy drift over ~1e3 periods stays below 10 * tol
LOCAL_TOL_FACTOR = 0.1


# --------------------------------------------------------------- trajectories


@dataclass
class Trajectory:
    times: np.ndarray
    z: np.ndarray  # shape (n, 2): columns z_a, z_r
    energy: np.ndarray
    template: CoherentProductState
    step_stats: dict = field(default_factory=dict)

    @property
    def states(self):
        return [self.template.with_coordinates(za, zr) for za, zr in self.z]

    def xi_eta(self):
        """Arrays ``(xi_a, eta_a, xi_r, eta_r)`` along the trajectory."""
        d = 1.0 - np.abs(self.z) ** 2
        xi = np.abs(1 + self.z) ** 2 / d
        eta = np.abs(1 - self.z) ** 2 / d
        return xi[:, 0], eta[:, 0], xi[:, 1], eta[:, 1]

    def position_moments(self, cfg):
        """``<z^2>(t)`` and ``<rho^2>(t)`` in physical units."""
        la, lr = length_scales(cfg)
        xa, _, xr, _ = self.xi_eta()
        return la * 2 * self.template.axial.kappa * xa, lr * 2 * self.template.radial.kappa * xr

    @property
    def energy_drift(self):
        e0 = self.energy[0]
        return float(np.max(np.abs(self.energy - e0)) / max(abs(e0), 1e-300))


def _coefficient_profile(cfg):
    h = assemble(cfg, 0.0)
    static = np.array([h.time_profile[n][0] for n in COEFFICIENT_NAMES])
    cosine = np.array([h.time_profile[n][1] for n in COEFFICIENT_NAMES])
    return static, cosine


def integrate(cfg, s0, t_span, tol=1e-10, t_eval=None, conservation_tol=None, max_steps=10_000_000):
    """Integrate the coherent-state equations of motion ``z' = {z, H}``.

    Coefficients follow the trap drive at every stage time. Output is taken at
    each accepted step unless ``t_eval`` is given.

    Raises
    ------
    BoundaryError
        If a mode approaches the edge of its disk.
    StiffnessError
        On step-size underflow; the offending time is attached as ``.t``.
    """
    t0, t1 = map(float, t_span)
    if not t1 > t0:
        raise DomainError("t_span must be increasing")
    if not tol > 0:
        raise DomainError("tol must be positive")
    static, cosine = _coefficient_profile(cfg)
    omega = cfg.Omega_rf
    driven = cfg.drive_mode == "time_dependent" and np.any(cosine != 0)
    kappas = s0.kappas
    hbar = cfg.hbar

    def coeffs(t):
        return static + math.cos(omega * t) * cosine if driven else static

    st = [float(x) for x in static]
    co = [float(x) for x in cosine]
    ka, kr = (2.0 * hbar * float(k) for k in kappas)

    def rhs(t, y):
        # fused form of disk_velocity(gradient_from_vector(...)); the D^2 factors cancel
        if driven:
            c = math.cos(omega * t)
            A_a, A_r, B_a, B_r, C20, C11, C02, D30, D21, D12, D03, _ = (a + c * b for a, b in zip(st, co))
        else:
            A_a, A_r, B_a, B_r, C20, C11, C02, D30, D21, D12, D03, _ = st
        xa_, ya, xr_, yr = y
        da = 1.0 - xa_ * xa_ - ya * ya
        dr = 1.0 - xr_ * xr_ - yr * yr
        if da <= DISK_GUARD or dr <= DISK_GUARD:
            raise BoundaryError(f"state reached the disk boundary guard at t = {t!r}")
        xa = ((1.0 + xa_) ** 2 + ya * ya) / da
        xr = ((1.0 + xr_) ** 2 + yr * yr) / dr
        dxa = B_a + C11 * xr + 2 * C02 * xa + D21 * xr * xr + 2 * D12 * xr * xa + 3 * D03 * xa * xa
        dxr = B_r + 2 * C20 * xr + C11 * xa + 3 * D30 * xr * xr + 2 * D21 * xr * xa + D12 * xa * xa
        # z' = [dxa (1+z)^2 - A (1-z)^2] / (2 i hbar kappa); (u + i v) / i = v - i u
        ua = dxa * ((1 + xa_) ** 2 - ya * ya) - A_a * ((1 - xa_) ** 2 - ya * ya)
        va = dxa * 2 * (1 + xa_) * ya + A_a * 2 * (1 - xa_) * ya
        ur = dxr * ((1 + xr_) ** 2 - yr * yr) - A_r * ((1 - xr_) ** 2 - yr * yr)
        vr = dxr * 2 * (1 + xr_) * yr + A_r * 2 * (1 - xr_) * yr
        return np.array([va / ka, -ua / ka, vr / kr, -ur / kr])

    z0 = s0.z
    y0 = np.array([z0[0].real, z0[0].imag, z0[1].real, z0[1].imag])
    ltol = tol * LOCAL_TOL_FACTOR
    res = _rk.integrate(rhs, t0, y0, t1, rtol=ltol, atol=ltol, t_eval=t_eval, max_steps=max_steps)
    z = res.y[:, 0::2] + 1j * res.y[:, 1::2]
    if np.any(np.abs(z) >= 1.0 - DISK_GUARD):
        raise BoundaryError("trajectory left the disk")
    energy = np.array([
        _energy(coeffs(t), za, zr) for t, (za, zr) in zip(res.t, z)
    ])
    traj = Trajectory(res.t, z, energy, s0, res.stats.as_dict())
    if conservation_tol is not None and not driven:
        drift = traj.energy_drift
        if drift > conservation_tol:
            raise ConsistencyError(f"relative energy drift {drift:.3g} exceeds {conservation_tol:.3g}")
    return traj


def _energy(c, za, zr):
    A_a, A_r, B_a, B_r, C20, C11, C02, D30, D21, D12, D03, const = c
    xa, ea = xi_factor(za, 1), xi_factor(za, -1)
    xr, er = xi_factor(zr, 1), xi_factor(zr, -1)
    return (
        A_r * er + A_a * ea + B_r * xr + B_a * xa
        + C20 * xr**2 + C11 * xr * xa + C02 * xa**2
        + D30 * xr**3 + D21 * xr**2 * xa + D12 * xr * xa**2 + D03 * xa**3 + const
    )


def transform_reference(z, factor):
    """Disk coordinate of the same physical state after ``omega_ref -> factor * omega_ref``.

    Rescaling the reference frequency is a boost mixing ``K0`` and ``K1``; the
    state is tracked through its generator expectation vector.
    """
    z = complex(z)
    d = 1.0 - abs(z) ** 2
    e0 = (1.0 + abs(z) ** 2) / d
    e1 = 2.0 * z.real / d
    e2 = -2.0 * z.imag / d
    c = 0.5 * (factor + 1.0 / factor)
    s = 0.5 * (factor - 1.0 / factor)
    e0n, e1n = c * e0 + s * e1, s * e0 + c * e1
    # conj(z') = <K+'> / (<K0'> + kappa), per unit kappa
    return complex(e1n, -e2) / (e0n + 1.0)


# ------------------------------------------------------------------ monodromy


def _mode_index(mode):
    if mode not in MODES:
        raise DomainError(f"mode must be 'axial' or 'radial', got {mode!r}")
    return MODES.index(mode)


def _riccati_generators(cfg, mode):
    """Static and cosine parts of the projective lift of the quadrupole disk flow.

    For ``H = A eta + B xi`` the disk velocity is the quadratic
    ``z' = c0 + c1 z + c2 z^2``; with ``z = u / v`` the pair ``(u, v)`` obeys
    ``(u, v)' = G (u, v)`` with ``G = [[c1/2, c0], [-c2, -c1/2]]``.
    """
    i = _mode_index(mode)
    cfg_q = cfg.replace(c_oct=0.0, c_hex=0.0)
    h = assemble(cfg_q, 0.0)
    kappa = float(mode_weights(cfg)[i].kappa)
    names = (("A_a", "B_a"), ("A_r", "B_r"))[i]
    parts = []
    for which in (0, 1):
        A = h.time_profile[names[0]][which]
        B = h.time_profile[names[1]][which]
        # z' = [B (1+z)^2 - A (1-z)^2] / (2 i hbar kappa)
        den = 2j * cfg.hbar * kappa
        c0, c1, c2 = (B - A) / den, 2 * (B + A) / den, (B - A) / den
        parts.append(np.array([[c1 / 2, c0], [-c2, -c1 / 2]]))
    return parts[0], parts[1]


def _lift_rhs(G0, G1, omega, driven, n=1):
    def rhs(t, y):
        W = (y[0::2] + 1j * y[1::2]).reshape(n, 2, 2)
        G = G0 + math.cos(omega * t) * G1 if driven else G0
        dW = np.einsum("...ij,njk->nik", G, W)
        out = np.empty(y.size)
        flat = dW.ravel()
        out[0::2] = flat.real
        out[1::2] = flat.imag
        return out

    return rhs


def disk_propagator(cfg, mode, t1=None, tol=MONODROMY_TOL, record_steps=False):
    """SU(1,1) matrix ``W(t)`` of the quadrupole disk flow of one mode.

    ``z(t) = (W11 z0 + W12) / (W21 z0 + W22)``. With ``record_steps`` the full
    time series is returned as ``(t, W)``; otherwise just ``W(t1)``.
    """
    G0, G1 = _riccati_generators(cfg, mode)
    t1 = cfg.period if t1 is None else t1
    driven = cfg.drive_mode == "time_dependent"
    y0 = np.zeros(8)
    y0[0] = y0[6] = 1.0
    res = _rk.integrate(
        _lift_rhs(G0, G1, cfg.Omega_rf, driven), 0.0, y0, t1,
        rtol=tol, atol=tol, record_steps=record_steps,
    )
    W = (res.y[:, 0::2] + 1j * res.y[:, 1::2]).reshape(-1, 2, 2)
    return (res.t, W) if record_steps else W[-1]


_CAYLEY = np.array([[1.0, 1j], [1.0, -1j]]) / np.sqrt(2.0)
_CAYLEY_INV = np.linalg.inv(_CAYLEY)


def _to_real(W, omega_ref):
    # (a, conj a) = C (X, P) with a = (X + iP)/sqrt 2; velocity coordinate X' = omega_ref P
    R = _CAYLEY_INV @ W @ _CAYLEY
    S = np.diag([1.0, omega_ref])
    R = S @ R @ np.linalg.inv(S)
    if np.max(np.abs(R.imag)) > 1e-8 * max(1.0, np.max(np.abs(R.real))):
        raise ConsistencyError("monodromy failed to map to a real matrix")
    return R.real


def linearized_monodromy(cfg, mode="axial", tol=MONODROMY_TOL):
    """One-period fundamental matrix of a mode in (position, velocity) coordinates.

    The quadrupole disk flow is a Riccati equation; its projective lift is a
    linear periodic system whose one-period solution is mapped to real
    coordinates by the Cayley transform. For a quadratic Hamiltonian this equals
    the monodromy of ``M x'' = -K(t) x``.
    """
    if cfg.drive_mode != "time_dependent":
        raise DomainError("monodromy needs drive_mode='time_dependent'")
    omega_ref = (cfg.omega_a_ref, cfg.omega_r_ref)[_mode_index(mode)]
    return _to_real(disk_propagator(cfg, mode, tol=tol), omega_ref)


def _batch_traces(cfgs, mode, tol):
    """Monodromy traces for several configs sharing one step sequence."""
    G0 = np.array([_riccati_generators(c, mode)[0] for c in cfgs])
    G1 = np.array([_riccati_generators(c, mode)[1] for c in cfgs])
    omega = cfgs[0].Omega_rf
    n = len(cfgs)
    y0 = np.zeros(8 * n)
    y0.reshape(n, 8)[:, 0] = 1.0
    y0.reshape(n, 8)[:, 6] = 1.0

    def rhs(t, y):
        W = (y[0::2] + 1j * y[1::2]).reshape(n, 2, 2)
        G = G0 + math.cos(omega * t) * G1
        flat = np.einsum("nij,njk->nik", G, W).ravel()
        out = np.empty(y.size)
        out[0::2] = flat.real
        out[1::2] = flat.imag
        return out

    res = _rk.integrate(rhs, 0.0, y0, cfgs[0].period, rtol=tol, atol=tol, record_steps=False)
    W = (res.y[-1, 0::2] + 1j * res.y[-1, 1::2]).reshape(n, 2, 2)
    return np.real(W[:, 0, 0] + W[:, 1, 1]), np.abs(np.linalg.det(W) - 1.0)


def rotation_angle(cfg, mode="axial", tol=MONODROMY_TOL):
    """Lifted one-period rotation angle of a stable mode.

    The winding of ``arg W11(t)`` fixes the branch, so the result is the angle
    of the path in the universal cover rather than a value modulo ``2 pi``.
    """
    t, W = disk_propagator(cfg, mode, tol=tol, record_steps=True)
    alpha = W[:, 0, 0]
    tr = 2.0 * alpha[-1].real
    if abs(tr) > 2.0:
        raise UnstableModeError(f"{mode} mode is unstable: |trace| = {abs(tr):.12g}", trace=tr)
    phase = np.unwrap(np.angle(alpha))
    theta = -phase[-1]
    base = math.acos(min(1.0, max(-1.0, alpha[-1].real)))
    n = round(theta / (2 * math.pi))
    cands = [2 * math.pi * j + sgn * base for j in (n - 1, n, n + 1) for sgn in (1, -1)]
    return min(cands, key=lambda c: abs(c - theta))


def floquet_exponent(trace, period, rotation_sign=1.0):
    """Principal-branch characteristic frequency in ``[0, Omega/2]``; NaN if unstable."""
    if abs(trace) > 2.0:
        return float("nan")
    mu = math.acos(max(-1.0, min(1.0, trace / 2.0)))
    return mu / period if rotation_sign >= 0 else (2 * math.pi - mu) / period


# ---------------------------------------------------------------- scan & spectra


@dataclass
class StabilityRecord:
    scan_coords: tuple
    trace_a: float
    trace_r: float
    stable_a: bool
    stable_r: bool
    floquet_exponent_a: float
    floquet_exponent_r: float
    marginal_a: bool = False
    marginal_r: bool = False
    det_error: float = 0.0
    diagnostic: Optional[str] = None


def _record(coords, tr_a, tr_r, period, det_err, diagnostic=None):
    def stable(tr):
        return bool(np.isfinite(tr) and abs(tr) <= 2.0)

    def marginal(tr):
        return bool(np.isfinite(tr) and abs(abs(tr) - 2.0) <= MARGINAL_TOL)

    return StabilityRecord(
        tuple(float(c) for c in coords), float(tr_a), float(tr_r),
        stable(tr_a), stable(tr_r),
        floquet_exponent(tr_a, period) if np.isfinite(tr_a) else float("nan"),
        floquet_exponent(tr_r, period) if np.isfinite(tr_r) else float("nan"),
        marginal(tr_a), marginal(tr_r), float(det_err), diagnostic,
    )


def mathieu_grid(a_values, q_values):
    """Row-major list of ``(a_z, q_z)`` pairs, rows indexed by ``a``."""
    return [(float(a), float(q)) for a in a_values for q in q_values]


def _point_config(template, coords, kind):
    if kind == "mathieu":
        return with_mathieu(template, *coords)
    if kind == "voltage":
        return template.replace(U0=float(coords[0]), V0=float(coords[1]))
    raise DomainError(f"grid kind must be 'mathieu' or 'voltage', got {kind!r}")


def _scan_chunk(template, chunk, kind, tol):
    cfgs, bad = [], {}
    for i, c in enumerate(chunk):
        try:
            cfgs.append(_point_config(template, c, kind))
        except Exception as exc:  # per-point failure is recorded, not raised
            bad[i] = f"{type(exc).__name__}: {exc}"
    out = [None] * len(chunk)
    try:
        if cfgs:
            tr_a, det_a = _batch_traces(cfgs, "axial", tol)
            tr_r, det_r = _batch_traces(cfgs, "radial", tol)
            it = iter(range(len(cfgs)))
            for i, c in enumerate(chunk):
                if i in bad:
                    continue
                j = next(it)
                out[i] = _record(c, tr_a[j], tr_r[j], template.period, max(det_a[j], det_r[j]))
    except Exception as exc:
        bad.update({i: f"{type(exc).__name__}: {exc}" for i in range(len(chunk)) if i not in bad})
    for i, msg in bad.items():
        out[i] = _record(chunk[i], float("nan"), float("nan"), template.period, float("nan"), msg)
    return out


def stability_scan(cfg_template, grid, kind="mathieu", tol=MONODROMY_TOL, threads=1, chunk_size=64):
    """Stability records for every grid point, in the order given.

    Points are grouped in fixed-size chunks that are integrated independently,
    so results do not depend on ``threads``.
    """
    if cfg_template.drive_mode != "time_dependent":
        raise DomainError("stability scans need drive_mode='time_dependent'")
    grid = [tuple(p) for p in grid]
    if not grid:
        raise DomainError("grid is empty")
    chunks = [grid[i:i + chunk_size] for i in range(0, len(grid), chunk_size)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda ch: _scan_chunk(cfg_template, ch, kind, tol), chunks))
    else:
        parts = [_scan_chunk(cfg_template, ch, kind, tol) for ch in chunks]
    return [r for part in parts for r in part]


def stability_edge(cfg_template, a_z, q_lo, q_hi, mode="axial", xtol=1e-6):
    """Bisect on ``|trace| = 2`` between a stable ``q_lo`` and an unstable ``q_hi``."""

    def excess(q):
        m = linearized_monodromy(with_mathieu(cfg_template, a_z, q), mode)
        return abs(np.trace(m)) - 2.0

    f_lo, f_hi = excess(q_lo), excess(q_hi)
    if not (f_lo <= 0 < f_hi):
        raise DomainError("interval does not bracket a stability edge")
    while q_hi - q_lo > xtol:
        mid = 0.5 * (q_lo + q_hi)
        if excess(mid) <= 0:
            q_lo = mid
        else:
            q_hi = mid
    return q_lo, q_hi


def quasienergy_spectrum(cfg, mode="axial", n_levels=5):
    """Quasienergy ladder ``2 (k + m) hbar nu`` reduced modulo ``hbar Omega``.

    ``nu`` is the lifted Floquet rotation angle per period. The constant
    ``-omega_c hbar l / 2`` is not included.
    """
    if cfg.drive_mode != "time_dependent":
        raise DomainError("quasienergies need drive_mode='time_dependent'")
    i = _mode_index(mode)
    k = float(mode_weights(cfg)[i].k)
    nu = rotation_angle(cfg, mode) / cfg.period
    quantum = cfg.hbar * cfg.Omega_rf
    return [float(np.mod(2 * (k + m) * cfg.hbar * nu, quantum)) for m in range(n_levels)]


def husimi_grid(cfg, mode, re_values, im_values, other=0j, t=0.0):
    """Energy function on a Cartesian grid over one disk, the other mode frozen.

    Returns an array of shape ``(len(im_values), len(re_values))``.
    """
    i = _mode_index(mode)
    X, Y = np.meshgrid(np.asarray(re_values, float), np.asarray(im_values, float))
    Z = X + 1j * Y
    if np.any(np.abs(Z) >= 1.0 - DISK_GUARD):
        raise DomainError("grid touches the disk boundary")
    h = assemble(cfg, t)
    return evaluate_grid(h, Z, other) if i == 0 else evaluate_grid(h, other, Z)


def secular_frequencies(cfg):
    """``(nu_a, nu_r)`` from the monodromies, NaN where unstable.

    For static or pseudopotential drives the harmonic value ``sqrt(K / M)`` is
    returned instead.
    """
    if cfg.drive_mode != "time_dependent":
        sc = spring_constants(cfg, 0.0)
        return tuple(math.sqrt(K / cfg.M) if K > 0 else float("nan") for K in (sc.K_a, sc.K_r))
    out = []
    for mode in MODES:
        tr = np.trace(linearized_monodromy(cfg, mode))
        out.append(floquet_exponent(tr, cfg.period))
    return tuple(out)


__all__ = [
    "Trajectory", "integrate", "transform_reference", "disk_propagator", "linearized_monodromy",
    "rotation_angle", "floquet_exponent", "StabilityRecord", "mathieu_grid", "stability_scan",
    "stability_edge", "quasienergy_spectrum", "husimi_grid", "secular_frequencies",
]
