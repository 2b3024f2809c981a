"""Truncated Fock-space evaluation of trap observables.

Everything here is built from generator matrices and numerically displaced
states, never from the closed-form moment polynomials, so it can serve as an
independent check on :mod:`iontdvp.husimi`.
"""
import numpy as np

from .su11 import build_truncated_rep, displacement_numeric
from .trap import drive, mode_weights, spring_constants


class ModeOracle:
    """Generator matrices and position-squared operator for one trap mode."""

    def __init__(self, weight, omega_ref, hbar, M, cutoff=300):
        self.rep = build_truncated_rep(weight, cutoff)
        self.weight = weight
        self.omega_ref = omega_ref
        self.hbar = hbar
        self.M = M
        self.cutoff = cutoff
        # position^2 = (2 hbar / M omega) (K0 + K1); kinetic = hbar omega (K0 - K1)
        self.x2 = (2 * hbar / (M * omega_ref)) * (self.rep.K0 + self.rep.K1)
        self.kinetic = hbar * omega_ref * (self.rep.K0 - self.rep.K1)

    def state(self, z):
        return displacement_numeric(z, self.weight, self.cutoff)

    def x2_power_expectation(self, psi, j):
        v = psi
        for _ in range(j):
            v = self.x2 @ v
        return np.vdot(psi, v)


def mode_oracles(cfg, cutoff=300):
    wa, wr = mode_weights(cfg)
    return (
        ModeOracle(wa, cfg.omega_a_ref, cfg.hbar, cfg.M, cutoff),
        ModeOracle(wr, cfg.omega_r_ref, cfg.hbar, cfg.M, cutoff),
    )


def _product_moment(oa, orr, psi_a, psi_r, ja, jr):
    # <z^(2 ja) rho^(2 jr)> in the product state, as <psi_a|.|psi_a><psi_r|.|psi_r>
    return oa.x2_power_expectation(psi_a, ja) * orr.x2_power_expectation(psi_r, jr)


def multipole_expectation(order, oa, orr, psi_a, psi_r):
    """``<H_order(rho, z)>`` from the operator polynomial in ``z^2`` and ``rho^2``."""
    terms = {
        2: ((2, 1, 0), (-1, 0, 1)),
        4: ((8, 2, 0), (-24, 1, 1), (3, 0, 2)),
        6: ((16, 3, 0), (-120, 2, 1), (90, 1, 2), (-5, 0, 3)),
    }[order]
    return sum(c * _product_moment(oa, orr, psi_a, psi_r, ja, jr) for c, ja, jr in terms)


def hamiltonian_expectation(cfg, s, t=0.0, cutoff=300, oracles=None):
    """``<Phi| H_l(t) |Phi>`` for the full trap Hamiltonian in the product state ``s``."""
    oa, orr = oracles if oracles is not None else mode_oracles(cfg, cutoff)
    psi_a, psi_r = oa.state(s.axial.z), orr.state(s.radial.z)
    sc = spring_constants(cfg, t)
    A = drive(cfg, t)
    energy = (
        np.vdot(psi_a, oa.kinetic @ psi_a)
        + np.vdot(psi_r, orr.kinetic @ psi_r)
        + 0.5 * sc.K_a * np.vdot(psi_a, oa.x2 @ psi_a)
        + 0.5 * sc.K_r * np.vdot(psi_r, orr.x2 @ psi_r)
        - 0.5 * cfg.omega_c * cfg.hbar * cfg.l
    )
    if cfg.c_oct:
        energy += cfg.Q * A * cfg.c_oct * multipole_expectation(4, oa, orr, psi_a, psi_r)
    if cfg.c_hex:
        energy += cfg.Q * A * cfg.c_hex * multipole_expectation(6, oa, orr, psi_a, psi_r)
    return energy


def mode_hamiltonian(oracle, K):
    """Single-mode matrix ``kinetic + K/2 * position^2``."""
    return oracle.kinetic + 0.5 * K * oracle.x2


def floquet_propagator(cfg, mode="axial", dim=120, n_steps=2000):
    """One-period propagator of a quadratic mode in a truncated basis.

    Fourth-order Magnus stepping with two Gauss points per step; the only
    input from the trap model is the spring constant ``K(t)``.
    """
    from scipy.linalg import expm

    i = ("axial", "radial").index(mode)
    w = mode_weights(cfg)[i]
    omega_ref = (cfg.omega_a_ref, cfg.omega_r_ref)[i]
    orc = ModeOracle(w, omega_ref, cfg.hbar, cfg.M, dim)
    T = cfg.period
    h = T / n_steps
    c1, c2 = 0.5 - np.sqrt(3) / 6, 0.5 + np.sqrt(3) / 6

    def gen(t):
        sc = spring_constants(cfg, t)
        return -1j / cfg.hbar * mode_hamiltonian(orc, (sc.K_a, sc.K_r)[i])

    U = np.eye(dim, dtype=complex)
    for n in range(n_steps):
        t = n * h
        A1, A2 = gen(t + c1 * h), gen(t + c2 * h)
        Om = 0.5 * h * (A1 + A2) + (np.sqrt(3) / 12) * h * h * (A2 @ A1 - A1 @ A2)
        U = expm(Om) @ U
    return U, orc


def quantum_quasienergy_phases(cfg, mode="axial", n_levels=5, dim=120, n_steps=2000):
    """Eigenphases ``-arg(lambda)`` in ``[0, 2 pi)`` of the one-period propagator.

    Floquet states are ordered by their ``K0`` expectation, so the low-lying,
    truncation-insensitive states come first.
    """
    U, orc = floquet_propagator(cfg, mode, dim, n_steps)
    lam, V = np.linalg.eig(U)
    k0 = np.real(np.einsum("ij,ij->j", V.conj(), orc.rep.K0 @ V)) / np.sum(np.abs(V) ** 2, axis=0)
    order = np.argsort(k0)[:n_levels]
    return np.mod(-np.angle(lam[order]), 2 * np.pi), k0[order]
