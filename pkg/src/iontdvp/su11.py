"""Positive discrete series of su(1,1): ladder algebra, coherent-state moments
and a truncated Fock-space oracle.

Conventions: the basis ``|m, k>`` diagonalises ``K0`` with eigenvalue ``k + m``,
``K+ = K1 + i K2`` raises ``m`` and ``K- = (K+)^dagger`` lowers it. Coherent
states are ``U(z)|m, k>`` with the disentangled product

    U(z) = exp(z K+) exp(beta K0) exp(-conj(z) K-),  beta = ln(1 - |z|^2).
"""
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

import numpy as np

from ._validation import check_disk, check_nonneg_int
from .errors import DomainError, TruncationError

#: norm allowed in the last few oracle components before a state is rejected
TAIL_TOLERANCE = 1e-12
_TAIL_WIDTH = 5


@dataclass(frozen=True)
class BargmannWeight:
    """Representation label ``k`` and excitation number ``m`` of one mode.

    ``k`` may be a :class:`fractions.Fraction` to enable exact moment arithmetic.
    """

    k: Real
    m: int = 0

    def __post_init__(self):
        if not self.k > 0:
            raise DomainError(f"Bargmann index must be positive, got {self.k!r}")
        check_nonneg_int(self.m, "m")

    @property
    def kappa(self):
        """``k + m``, the lowest-weight eigenvalue shifted by the excitation."""
        return self.k + self.m


@dataclass(frozen=True)
class TruncatedRep:
    weight: BargmannWeight
    cutoff: int
    K0: np.ndarray
    Kplus: np.ndarray
    Kminus: np.ndarray

    @property
    def K1(self):
        return 0.5 * (self.Kplus + self.Kminus)

    @property
    def K2(self):
        return -0.5j * (self.Kplus - self.Kminus)

    def casimir(self):
        K1, K2 = self.K1, self.K2
        return self.K0 @ self.K0 - K1 @ K1 - K2 @ K2


def ladder_elements(w):
    """Matrix elements of ``K+``, ``K-`` and ``K0`` on ``|m, k>``.

    Returns
    -------
    raise_amp, lower_amp, diag : float
        ``sqrt((m+1)(m+2k))``, ``sqrt(m(m+2k-1))`` and ``k+m``.
    """
    k, m = float(w.k), w.m
    return (np.sqrt((m + 1) * (m + 2 * k)), np.sqrt(m * (m + 2 * k - 1)), k + m)


def _raise_amplitudes(k, n):
    m = np.arange(n, dtype=float)
    return np.sqrt((m + 1) * (m + 2 * k))


def build_truncated_rep(w, cutoff):
    """Dense ``cutoff x cutoff`` matrices of the generators for Bargmann index ``w.k``.

    ``w.m`` plays no role here; the basis always starts at ``m = 0``.
    """
    if isinstance(cutoff, bool) or int(cutoff) != cutoff or cutoff < 2:
        raise DomainError(f"cutoff must be an integer >= 2, got {cutoff!r}")
    cutoff = int(cutoff)
    k = float(w.k)
    K0 = np.diag(k + np.arange(cutoff, dtype=float)).astype(complex)
    Kplus = np.zeros((cutoff, cutoff), dtype=complex)
    idx = np.arange(cutoff - 1)
    Kplus[idx + 1, idx] = _raise_amplitudes(k, cutoff - 1)
    Kminus = Kplus.conj().T.copy()
    return TruncatedRep(w, cutoff, K0, Kplus, Kminus)


def casimir_eigenvalue(w):
    return w.k * (w.k - 1)


def _apply_exp_raise(v, z, amps):
    # exp(z K+) v as a finite sum; K+ is strictly lower triangular in the truncated basis
    out = v.copy()
    term = v.copy()
    n = len(v)
    for j in range(1, n):
        shifted = np.zeros_like(term)
        shifted[1:] = amps[: n - 1] * term[:-1]
        term = z * shifted / j
        if not np.any(term):
            break
        out += term
    return out


def _apply_exp_lower(v, zeta, amps):
    # exp(zeta K-) v; nilpotent on any vector with finitely many components
    out = v.copy()
    term = v.copy()
    n = len(v)
    for j in range(1, n):
        shifted = np.zeros_like(term)
        shifted[:-1] = amps[: n - 1] * term[1:]
        term = zeta * shifted / j
        if not np.any(term):
            break
        out += term
    return out


def displacement_numeric(z, w, cutoff=300):
    """Oracle coherent state ``U(z)|m, k>`` in a truncated basis.

    The three exponentials are applied as exact finite series, so the
    components below ``cutoff`` are those of the untruncated state. The state
    is rejected if the norm carried by its last five components exceeds
    ``TAIL_TOLERANCE``.
    """
    z = check_disk(z)
    if cutoff <= w.m + _TAIL_WIDTH:
        raise DomainError(f"cutoff {cutoff} too small for m = {w.m}")
    k = float(w.k)
    amps = _raise_amplitudes(k, cutoff)
    v = np.zeros(cutoff, dtype=complex)
    v[w.m] = 1.0
    v = _apply_exp_lower(v, -np.conj(z), amps)
    beta = np.log1p(-abs(z) ** 2)
    v *= np.exp(beta * (k + np.arange(cutoff)))
    v = _apply_exp_raise(v, z, amps)
    tail = np.linalg.norm(v[-_TAIL_WIDTH:])
    if tail > TAIL_TOLERANCE:
        raise TruncationError(
            f"tail norm {tail:.3g} exceeds {TAIL_TOLERANCE:g} at cutoff {cutoff} for |z| = {abs(z):.6g}"
        )
    return v / np.linalg.norm(v)


def coherent_expectation_K(z, w):
    """Closed-form ``(<K0>, <K+>, <K->)`` in the coherent state ``U(z)|m, k>``."""
    z = check_disk(z)
    kappa = float(w.kappa)
    d = 1.0 - abs(z) ** 2
    kplus = 2.0 * np.conj(z) * kappa / d
    return kappa * (1.0 + abs(z) ** 2) / d, kplus, np.conj(kplus)


def xi_factor(z, eps=1):
    """``(1 + eps z)(1 + eps conj z) / (1 - |z|^2)``; ``eps=+1`` gives xi, ``-1`` gives eta."""
    return abs(1.0 + eps * z) ** 2 / (1.0 - abs(z) ** 2)


def _walk_weights(k, m, n, exact):
    # Diagonal moments of (K0 + K1)^n via a similarity transform that puts the
    # full up-down weight on the raising step: up a_j/4, down 1. Rational for rational k.
    size = m + n + 1
    one = Fraction(1) if exact else 1.0
    kk = Fraction(k) if exact else float(k)
    T = [[0 * one] * size for _ in range(size)]
    for j in range(size):
        T[j][j] = kk + j
        if j + 1 < size:
            T[j + 1][j] = (j + 1) * (j + 2 * kk) / 4
            T[j][j + 1] = one
    return T


def basis_moment(w, n, exact=False):
    """``<m, k| (K0 + K1)^n |m, k>``, z-independent factor of the coherent moments.

    With ``exact=True`` the value is a :class:`~fractions.Fraction` (``k`` must be
    rational). The same number is the ``eps = -1`` moment, since ``K0 - K1`` is
    unitarily equivalent to ``K0 + K1`` by a rotation generated by ``K0``.
    """
    check_nonneg_int(n, "n")
    m = w.m
    T = _walk_weights(w.k, m, n, exact)
    size = len(T)
    vec = [0] * size
    vec[m] = Fraction(1) if exact else 1.0
    for _ in range(n):
        vec = [sum(T[i][j] * vec[j] for j in range(size)) for i in range(size)]
    return vec[m]


def omega_moment(eps, n, z, w):
    """``<z,k,m| (K0 + eps K1)^n |z,k,m>`` from the factorised moment formula."""
    if eps not in (1, -1):
        raise DomainError(f"eps must be +1 or -1, got {eps!r}")
    z = check_disk(z)
    return xi_factor(z, eps) ** n * basis_moment(w, n)


def q_moment(j, w, exact=False):
    """Moment polynomial ``Q_j(k, m) = <m,k| (2(K0+K1))^j |m,k>`` for ``j <= 3``.

    ``Q_3`` carries the m-dependent terms obtained by enumerating the closed
    walks of ``(K0+K1)^3``; they differ from the commonly quoted form
    ``4mk(5+12k) + 4m^2(15k+1)`` by ``4m - 8km - 4m^2``.
    """
    if j not in (1, 2, 3):
        raise DomainError(f"closed-form Q_j is available for j in 1..3, got {j!r}")
    k = Fraction(w.k) if exact else float(w.k)
    m = w.m
    if j == 1:
        return 2 * (k + m)
    if j == 2:
        return 2 * k * (2 * k + 1) + 12 * k * m + 6 * m**2
    return (
        4 * k * (k + 1) * (2 * k + 1)
        + 4 * m * (12 * k**2 + 3 * k + 1)
        + 60 * k * m**2
        + 20 * m**3
    )


def s_moment(j, z, w):
    """``S_j = xi(z)^j Q_j(k, m)``, the coherent moment of ``2(K0 + K1)``."""
    z = check_disk(z)
    return xi_factor(z) ** j * q_moment(j, w)


def oracle_expectation(state, op):
    """``<state| op |state>`` for a dense operator in the truncated basis."""
    return np.vdot(state, op @ state)
