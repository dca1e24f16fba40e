"""Certified evaluation of Riemann theta series and their one-variable analogues.

Every evaluation sums a box of lattice points centred on the peak of the
Gaussian ``|term|`` and reports an absolute error bound covering the
omitted shells and the floating-point rounding of the kept terms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ampletheta import kernels

EPS = np.finfo(float).eps
EIGENVALUE_FLOOR = 0.05
MAX_RADIUS_1D = 200
MAX_BOX_TERMS = 4_000_000
DEFAULT_TOL = 1e-12


class ThetaCertificationError(RuntimeError):
    """The requested tolerance cannot be certified for these inputs."""


class AllSectionsVanishError(RuntimeError):
    """Every section vanishes (numerically) at the evaluation point."""


def e_of(z):
    """``exp(2 pi i z)``."""
    return np.exp(2j * np.pi * np.asarray(z, dtype=complex))


@dataclass(frozen=True, eq=False)
class SiegelPoint:
    """Symmetric ``g x g`` matrix with positive-definite imaginary part,
    together with the degree ``d`` of the polarization type ``(1,...,1,d)``."""

    tau: np.ndarray
    d: int = 1

    def __post_init__(self):
        tau = np.array(self.tau, dtype=complex)
        if tau.ndim == 0:
            tau = tau.reshape(1, 1)
        if tau.ndim != 2 or tau.shape[0] != tau.shape[1]:
            raise ValueError(f"tau must be square, got shape {tau.shape}")
        scale = max(1.0, float(np.abs(tau).max()))
        if np.abs(tau - tau.T).max() > 1e-12 * scale:
            raise ValueError("tau is not symmetric")
        tau = 0.5 * (tau + tau.T)
        try:
            np.linalg.cholesky(tau.imag)
        except np.linalg.LinAlgError:
            raise ValueError("imaginary part of tau is not positive definite") from None
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d!r}")
        tau.setflags(write=False)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "d", int(self.d))

    @property
    def g(self) -> int:
        return self.tau.shape[0]

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.tau.imag)[0])

    def shift(self) -> np.ndarray:
        """``(-tau_1/2, ..., -tau_{g-1}/2, 0)``."""
        s = -0.5 * np.diag(self.tau).copy()
        s[-1] = 0.0
        return s

    def period_rows(self) -> np.ndarray:
        """Rows of the period matrix: the rows of ``tau`` then ``diag(1,...,1,d)``."""
        dmat = np.diag([1.0] * (self.g - 1) + [float(self.d)]).astype(complex)
        return np.vstack([self.tau, dmat])


@dataclass(frozen=True)
class ThetaValue:
    value: complex
    tail_bound: float
    radius: int


# ------------------------------------------------------------------ bounds

def _shell_count(g: int, n: int) -> int:
    return (2 * n + 1) ** g - (2 * n - 1) ** g


def shell_tail(g: int, lam: float, radius: int, linear: float | None = None) -> float:
    """Bound for ``sum exp(-pi lam |v - c|^2)`` over lattice points outside the box.

    Points in shell ``n`` (sup-distance ``n`` from the box centre) satisfy
    ``|v - c| >= n - 1/2``.  With ``linear`` set, each term is additionally
    weighted by ``2 pi (linear + sqrt(g) (n + 1/2))`` (derivative series).
    """
    total = 0.0
    prev = None
    n = radius + 1
    while True:
        a = _shell_count(g, n) * math.exp(-math.pi * lam * (n - 0.5) ** 2)
        if linear is not None:
            a *= 2 * math.pi * (linear + math.sqrt(g) * (n + 0.5))
        total += a
        if a == 0.0:
            break
        if prev is not None and a < prev:
            rho = a / prev
            if rho < 0.5 and a <= 1e-18 * total:
                total += a * rho / (1 - rho)
                break
        prev = a
        n += 1
    return total


def _rounding_box(total, abs_sum, arg_sum, n_terms):
    # compensated summation: O(eps |S|) plus a second-order term
    return EPS * (2 * abs(total) + 4 * abs_sum + 2 * arg_sum) + 4 * n_terms * EPS ** 2 * abs_sum


def _rounding_plain(abs_sum, arg_sum, n_terms):
    # recursive summation of n_terms terms
    return EPS * ((n_terms + 4) * np.asarray(abs_sum) + 2 * np.asarray(arg_sum))


# ---------------------------------------------------------------- theta_g

def theta_g(tau: SiegelPoint, z, m=None, tol: float = DEFAULT_TOL,
            relative: bool = False) -> ThetaValue:
    """``sum_q e(1/2 (q+m) tau (q+m)^T + (q+m) z)`` with a certified error bound.

    ``tail_bound`` covers both the omitted lattice shells and the rounding
    of the summed terms.  With ``relative=True`` the tolerance is measured
    against the largest term ``exp(pi y Y^{-1} y)``, ``y = Im z``, which is
    the natural scale of the value.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    g = tau.g
    z = np.asarray(z, dtype=complex).reshape(-1)
    m = np.zeros(g) if m is None else np.asarray(m, dtype=float).reshape(-1)
    if z.size != g or m.size != g:
        raise ValueError("dimension mismatch between tau, z and m")
    y_mat = tau.tau.imag
    lam = tau.min_eigenvalue
    if lam < EIGENVALUE_FLOOR:
        raise ThetaCertificationError(
            f"smallest eigenvalue of Im tau is {lam:.3g} < floor {EIGENVALUE_FLOOR}")
    c = -np.linalg.solve(y_mat, z.imag)
    log_peak = math.pi * float(c @ y_mat @ c)
    center = np.rint(c - m).astype(np.int64)
    scale = math.exp(log_peak)
    limit = tol * scale if relative else tol
    radius = 0
    while True:
        trunc = scale * shell_tail(g, lam, radius)
        if trunc <= limit / 2:
            break
        radius += 1
        if (2 * radius + 1) ** g > MAX_BOX_TERMS:
            raise ThetaCertificationError(
                f"tolerance {tol:g} needs more than {MAX_BOX_TERMS} lattice points")
    value, abs_sum, arg_sum = kernels.theta_box(tau.tau, z, m, center, radius)
    bound = trunc + float(_rounding_box(value, abs_sum, arg_sum, (2 * radius + 1) ** g))
    if bound > limit:
        raise ThetaCertificationError(
            f"rounding error {bound:.3g} exceeds tol {limit:g}; value scale too large")
    return ThetaValue(complex(value), bound, radius)


def theta_k_section(tau: SiegelPoint, z, k: int, tol: float = DEFAULT_TOL,
                    relative: bool = False) -> ThetaValue:
    """``theta_{k r, 0}(tau, z + s(tau))`` with ``r = (0, ..., 0, 1/d)``."""
    k = int(k) % tau.d
    m = np.zeros(tau.g)
    m[-1] = k / tau.d
    z = np.asarray(z, dtype=complex).reshape(-1)
    return theta_g(tau, z + tau.shift(), m, tol, relative)


# ---------------------------------------------------------------- vartheta

def _check_upper(tau_g: complex) -> complex:
    tau_g = complex(tau_g)
    if tau_g.imag <= 0:
        raise ValueError(f"tau_g = {tau_g} is not in the upper half-plane")
    if tau_g.imag < EIGENVALUE_FLOOR:
        raise ThetaCertificationError(
            f"Im tau_g = {tau_g.imag:.3g} below floor {EIGENVALUE_FLOOR}")
    return tau_g


def vartheta_table(tau_g: complex, zs, d: int, tol: float = DEFAULT_TOL, deriv: bool = False,
                   relative: bool = False):
    """Evaluate ``vartheta_k(tau_g, z)`` (or its z-derivative) for all ``k`` mod ``d``.

    Returns ``(values, bounds, radius)`` with ``values[n, k]`` and absolute
    error bounds of the same shape.  With ``relative=True`` the truncation
    target is ``tol`` times the peak term ``exp(pi y^2 / Im tau_g)`` of each
    point (times ``2 pi (|c| + 1)``, ``c = -y / Im tau_g``, for the derivative)
    instead of an absolute ``tol``.

    Real parts are first reduced into ``[0, 1)`` using
    ``vartheta_k(z + 1) = e(k/d) vartheta_k(z)``, which keeps the exponents small.
    """
    tau_g = _check_upper(tau_g)
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    shift = np.floor(zs.real)
    zs = zs - shift
    lam = tau_g.imag
    c = -zs.imag / lam
    log_peak = math.pi * zs.imag ** 2 / lam
    lin = float(np.abs(c).max()) if zs.size else 0.0
    target = 0.0 if relative else float(log_peak.max()) if zs.size else 0.0
    radius = 0
    while True:
        s = shell_tail(1, lam, radius, linear=lin if deriv else None)
        if math.exp(target) * s <= tol / 2:
            break
        radius += 1
        if radius > MAX_RADIUS_1D:
            raise ThetaCertificationError(f"tolerance {tol:g} not reachable within radius cap")
    values, abs_sums, arg_sums = kernels.vartheta_grid(tau_g, zs, d, radius, deriv)
    # exact residues keep the phase arguments in [0, 1)
    residue = np.mod(shift.astype(np.int64)[:, None] * np.arange(d)[None, :], d)
    values = values * np.exp(2j * np.pi * residue / d)
    if deriv:
        s_each = np.array([shell_tail(1, lam, radius, linear=float(ci)) for ci in np.abs(c)])
    else:
        s_each = np.full(zs.shape, s)
    trunc = np.exp(log_peak) * s_each
    bounds = (trunc[:, None] + _rounding_plain(abs_sums, arg_sums, 2 * radius + 1)
              + 4 * EPS * abs_sums)
    scale = np.exp(log_peak)
    if deriv:
        scale = scale * 2 * math.pi * (np.abs(c) + 1)
    limit = tol * scale[:, None] if relative else tol
    if np.any(bounds > limit):
        raise ThetaCertificationError(
            f"error bound {float(bounds.max()):.3g} exceeds tol {tol:g}")
    return values, bounds, radius


def vartheta(tau_g: complex, z: complex, k: int, d: int, tol: float = DEFAULT_TOL,
             deriv: int = 0) -> ThetaValue:
    """``sum_q e(1/2 (q + k/d)^2 tau_g + (q + k/d) z)``; ``deriv=1`` gives the
    term-wise z-derivative."""
    if deriv not in (0, 1):
        raise ValueError("deriv must be 0 or 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    k = int(k) % int(d)
    values, bounds, radius = vartheta_table(tau_g, [z], d, tol, bool(deriv))
    return ThetaValue(complex(values[0, k]), float(bounds[0, k]), radius)


# ------------------------------------------------------ cross-validation

def factorization_terms(tau: SiegelPoint, z, k: int, box: int, tol: float = DEFAULT_TOL):
    """Partial sum of the expansion of ``theta_k`` in the one-variable ``vartheta_k``.

    Sums ``c_q vartheta_k(tau_g, z_g + q tau'') prod t_i^{q_i(q_i-1)/2} w_i^{q_i}``
    over ``q`` in ``[-box, box]^{g-1}``.  Returns ``(value, error_bound)``
    where the bound only covers the vartheta evaluations.
    """
    g, d = tau.g, tau.d
    z = np.asarray(z, dtype=complex).reshape(-1)
    t = tau.tau
    tau_g, tau_dd = t[-1, -1], t[:-1, -1]
    if g == 1:
        v = vartheta(tau_g, z[0], k, d, tol)
        return v.value, v.tail_bound
    qs = np.array(list(itertools.product(range(-box, box + 1), repeat=g - 1)), dtype=np.int64)
    tri = qs * (qs - 1)
    if np.any(tri % 2):
        raise AssertionError("non-integer exponent of t_i")
    expo = (tri // 2) @ np.diag(t)[:-1] + qs @ z[:-1]
    for i in range(g - 1):
        for j in range(i + 1, g - 1):
            expo = expo + qs[:, i] * qs[:, j] * t[i, j]
    weights = np.exp(2j * np.pi * expo)
    vals, bounds, _ = vartheta_table(tau_g, z[-1] + qs @ tau_dd, d, tol, relative=True)
    kk = int(k) % d
    total = complex(np.sum(weights * vals[:, kk]))
    err = float(np.sum(np.abs(weights) * bounds[:, kk]))
    return total, err


def factorization_residual(tau: SiegelPoint, z, k: int, box: int = 6,
                           tol: float = DEFAULT_TOL) -> float:
    """``|theta_k(tau, z) - (expansion truncated to |q| <= box)|``."""
    lhs = theta_k_section(tau, z, k, tol)
    rhs, _ = factorization_terms(tau, z, k, box, tol)
    return abs(lhs.value - rhs)


class AutomorphyRatio(NamedTuple):
    ratio: complex
    spread: float
    ks: tuple[int, ...]
    error_bound: float


def automorphy_ratio(tau: SiegelPoint, z, row: int, tol: float = DEFAULT_TOL,
                     denom_floor: float = 1e-3) -> AutomorphyRatio:
    """Ratios ``theta_k(z + lambda) / theta_k(z)`` for the period row ``lambda``.

    Rows ``0..g-1`` are the rows of ``tau``; rows ``g..2g-1`` those of
    ``diag(1,...,1,d)``.  Sections smaller than ``denom_floor`` times the
    largest one are skipped.  ``spread`` is the largest pairwise difference
    between the admissible ratios; ``error_bound`` propagates the theta
    error bounds through the quotients.  ``tol`` is peak-relative here
    since the translated point sits at a different scale.
    """
    g, d = tau.g, tau.d
    rows = tau.period_rows()
    if not 0 <= row < 2 * g:
        raise IndexError(f"row must lie in 0..{2 * g - 1}")
    z = np.asarray(z, dtype=complex).reshape(-1)
    lam = rows[row]
    den = [theta_k_section(tau, z, k, tol, relative=True) for k in range(d)]
    num = [theta_k_section(tau, z + lam, k, tol, relative=True) for k in range(d)]
    big = max(abs(v.value) for v in den)
    ks = tuple(k for k in range(d)
               if abs(den[k].value) > max(denom_floor * big, 100 * den[k].tail_bound))
    if not ks or (d > 1 and len(ks) < 2):
        raise AllSectionsVanishError(f"sections vanish at z={z}")
    ratios = [num[k].value / den[k].value for k in ks]
    errs = [(num[k].tail_bound + abs(ratios[i]) * den[k].tail_bound) / abs(den[k].value)
            for i, k in enumerate(ks)]
    spread = max((abs(a - b) for a in ratios for b in ratios), default=0.0)
    best = max(range(len(ks)), key=lambda i: abs(den[ks[i]].value))
    return AutomorphyRatio(ratios[best], float(spread), ks, float(2 * max(errs)))
