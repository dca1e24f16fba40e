"""The rank-(g-1) degenerate fibre and its ``d`` limit sections.

The fibre is handled chart-wise: a point is ``(z_g; (u_1:v_1), ...,
(u_{g-1}:v_{g-1}))`` with ``z_g`` on the covering line of
``E = C / (d Z + tau_g Z)`` and one homogeneous pair per ``P^1`` factor.
Sections are evaluated in homogeneous form,

    Phi_k = sum_{q in {0,1}^{g-1}} c_q vartheta_k(tau_g, z_g + q.tau'') prod u_i^{q_i} v_i^{1-q_i},

which is multilinear in the pairs and agrees with the affine formula for
``v_i = 1``.  Indices are 0-based: coordinate ``g-1`` is the elliptic one.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from ampletheta.theta import DEFAULT_TOL, SiegelPoint, e_of, theta_k_section, vartheta_table

SEPARATION_FLOOR = 1e-3
RELATION_TOL = 1e-9
# canonical z_g window is [-WINDOW_SLACK, 1 - WINDOW_SLACK) in both lattice coordinates
WINDOW_SLACK = 1e-12


class GenericityError(ValueError):
    """The translation points ``a_i = [tau_ig]`` satisfy a small integer relation."""


def binary_vectors(n: int) -> np.ndarray:
    """``{0,1}^n`` as an ``(2**n, n)`` integer array, lexicographic order."""
    return np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64).reshape(2 ** n, n)


@dataclass(frozen=True, eq=False)
class DegenerationModel:
    """Parameters ``(g, d, tau', tau'', tau_g)`` of a degenerate fibre.

    ``tau_prime`` is the symmetric ``(g-1) x (g-1)`` matrix of the fixed
    off-diagonal entries (its diagonal is ignored), ``tau_dprime`` the column
    ``(tau_{1g}, ..., tau_{g-1,g})``.  Construction certifies that no
    relation ``sum n_i a_i = 0`` on ``E`` holds with ``0 < max|n_i| <= n_rel``.
    """

    g: int
    d: int
    tau_g: complex
    tau_dprime: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    tau_prime: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), complex))
    n_rel: int = 8

    def __post_init__(self):
        g, d = int(self.g), int(self.d)
        if g < 1 or d < 1:
            raise ValueError("g and d must be positive")
        tau_g = complex(self.tau_g)
        if tau_g.imag <= 0:
            raise ValueError("tau_g must lie in the upper half-plane")
        tdp = np.array(self.tau_dprime, dtype=complex).reshape(-1)
        tp = np.array(self.tau_prime, dtype=complex).reshape(max(g - 1, 0), max(g - 1, 0))
        if tdp.size != g - 1:
            raise ValueError(f"tau_dprime needs {g - 1} entries")
        if np.abs(tp - tp.T).max(initial=0.0) > 1e-14:
            raise ValueError("tau_prime must be symmetric")
        np.fill_diagonal(tp, 0)
        for name, val in (("g", g), ("d", d), ("tau_g", tau_g), ("tau_dprime", tdp),
                          ("tau_prime", tp)):
            if isinstance(val, np.ndarray):
                val.setflags(write=False)
            object.__setattr__(self, name, val)
        witness = self.integer_relation(self.n_rel)
        if witness is not None:
            raise GenericityError(f"translation points satisfy the relation n={witness}")
        qs = binary_vectors(g - 1)
        cq = np.array([self._c_exponent(q) for q in qs])
        object.__setattr__(self, "_qs", qs)
        object.__setattr__(self, "_cq", e_of(cq))
        object.__setattr__(self, "_shifts", qs @ tdp if g > 1 else np.zeros(1, complex))

    @classmethod
    def from_offdiag(cls, g: int, d: int, tau_g: complex, tau_dprime: Sequence[complex],
                     tau_prime_offdiag: Sequence[complex] = (), n_rel: int = 8
                     ) -> DegenerationModel:
        """Build from the upper-triangle entries ``tau_ij``, ``i < j < g-1``, row-major."""
        tp = np.zeros((max(g - 1, 0),) * 2, complex)
        pairs = [(i, j) for i in range(g - 1) for j in range(i + 1, g - 1)]
        if len(tau_prime_offdiag) != len(pairs):
            raise ValueError(f"expected {len(pairs)} off-diagonal entries")
        for (i, j), v in zip(pairs, tau_prime_offdiag):
            tp[i, j] = tp[j, i] = v
        return cls(g, d, tau_g, np.asarray(tau_dprime, complex), tp, n_rel)

    # -------------------------------------------------------------- nomes

    @property
    def t_prime(self) -> np.ndarray:
        """``t_ij = e(tau_ij)`` for ``i, j < g-1`` (diagonal entries unused)."""
        return e_of(self.tau_prime)

    @property
    def t_last(self) -> np.ndarray:
        """``t_{i,g} = e(tau_ig / d)``."""
        return e_of(self.tau_dprime / self.d)

    @property
    def subsets(self) -> np.ndarray:
        return self._qs

    @property
    def c_values(self) -> np.ndarray:
        return self._cq

    @property
    def shifts(self) -> np.ndarray:
        """``q . tau''`` for every ``q`` in ``subsets``."""
        return self._shifts

    def _c_exponent(self, q) -> complex:
        q = np.asarray(q)
        return complex(0.5 * q @ self.tau_prime @ q)

    # ------------------------------------------------------- elliptic curve

    def lattice_coords(self, x):
        """Real coordinates ``(s, u)`` with ``x = s d + u tau_g``."""
        x = np.asarray(x, dtype=complex)
        u = x.imag / self.tau_g.imag
        s = (x.real - u * self.tau_g.real) / self.d
        return s, u

    def reduce(self, x):
        """``(x_red, n_d, n_tau)`` with ``x = x_red + n_d d + n_tau tau_g`` and
        ``x_red`` in the canonical window."""
        s, u = self.lattice_coords(x)
        n_tau = np.floor(u + WINDOW_SLACK)
        x1 = np.asarray(x, dtype=complex) - n_tau * self.tau_g
        s = (x1.real - (u - n_tau) * self.tau_g.real) / self.d
        n_d = np.floor(s + WINDOW_SLACK)
        return x1 - n_d * self.d, n_d.astype(np.int64), n_tau.astype(np.int64)

    def e_distance(self, x, y):
        """Shortest distance between ``[x]`` and ``[y]`` on ``E``."""
        r, _, _ = self.reduce(np.asarray(x, dtype=complex) - np.asarray(y, dtype=complex))
        best = np.full(np.shape(r), np.inf)
        for a in (-1, 0, 1):
            for b in (-1, 0, 1):
                best = np.minimum(best, np.abs(r + a * self.d + b * self.tau_g))
        return best

    def integer_relation(self, n_rel: int, tol: float = RELATION_TOL):
        """First ``n`` with ``0 < max|n_i| <= n_rel`` and ``sum n_i a_i = 0`` on E."""
        if self.g < 2 or n_rel < 1:
            return None
        rng = range(-n_rel, n_rel + 1)
        ns = np.array([n for n in itertools.product(rng, repeat=self.g - 1) if any(n)])
        dist = self.e_distance(ns @ self.tau_dprime, 0.0)
        hits = np.flatnonzero(dist < tol)
        return tuple(int(x) for x in ns[hits[0]]) if hits.size else None

    def translate_set(self, x: complex) -> np.ndarray:
        """The ``2^{g-1}`` points ``x + q a`` on E, reduced; raises if two coincide."""
        pts, _, _ = self.reduce(complex(x) + self.shifts)
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if self.e_distance(pts[i], pts[j]) < SEPARATION_FLOOR:
                    raise GenericityError(f"translates {i} and {j} of x={x} coincide on E")
        return pts

    def siegel_point(self, diag: Sequence[complex]) -> SiegelPoint:
        """Full ``tau`` with the given first ``g-1`` diagonal entries."""
        g = self.g
        tau = np.zeros((g, g), complex)
        tau[:-1, :-1] = self.tau_prime
        tau[np.arange(g - 1), np.arange(g - 1)] = np.asarray(diag, complex)
        tau[:-1, -1] = tau[-1, :-1] = self.tau_dprime
        tau[-1, -1] = self.tau_g
        return SiegelPoint(tau, self.d)

    def to_json(self) -> dict:
        def cx(v):
            return [float(v.real), float(v.imag)]
        return {
            "g": self.g, "d": self.d, "tau_g": cx(self.tau_g),
            "tau_dprime": [cx(v) for v in self.tau_dprime],
            "tau_prime_offdiag": [cx(self.tau_prime[i, j]) for i in range(self.g - 1)
                                  for j in range(i + 1, self.g - 1)],
        }


def c_coefficient(q: Sequence[int], model: DegenerationModel) -> complex:
    """``prod_{i<j<g} t_ij^{q_i q_j}`` for ``q`` in ``{0,1}^{g-1}``."""
    q = np.asarray(q, dtype=np.int64).reshape(-1)
    if q.size != model.g - 1 or np.any((q != 0) & (q != 1)):
        raise ValueError(f"q={q.tolist()} is not in {{0,1}}^{model.g - 1}")
    return complex(e_of(model._c_exponent(q)))


# ------------------------------------------------------------------ points

@dataclass(frozen=True, eq=False)
class ApPoint:
    """Point of the degenerate fibre in branch coordinates.

    ``w`` holds one homogeneous pair ``(u, v)`` per ``P^1`` factor, stored
    with ``max(|u|, |v|) = 1``; ``w_i = 0`` is ``(0, 1)`` and ``w_i = inf``
    is ``(1, 0)``.  ``order`` lists the special (zero or infinite) slots
    first, then the finite ones.
    """

    z: complex
    w: np.ndarray
    stratum: int = field(init=False)
    order: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        w = np.array(self.w, dtype=complex).reshape(-1, 2)
        scale = np.abs(w).max(axis=1) if w.size else np.zeros(0)
        if np.any(scale == 0) or not np.all(np.isfinite(w)):
            raise ValueError("homogeneous pair (0:0) or non-finite entry")
        w = w / scale[:, None]
        w.setflags(write=False)
        special = tuple(int(i) for i in np.flatnonzero((w[:, 0] == 0) | (w[:, 1] == 0)))
        finite = tuple(i for i in range(len(w)) if i not in special)
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "stratum", len(special))
        object.__setattr__(self, "order", special + finite)

    @classmethod
    def affine(cls, z: complex, ws: Sequence[complex]) -> ApPoint:
        """From affine values; ``math.inf`` (or ``None``) marks the point at infinity."""
        pairs = []
        for x in ws:
            if x is None or (isinstance(x, float) and math.isinf(x)):
                pairs.append((1, 0))
            else:
                pairs.append((complex(x), 1))
        return cls(z, np.array(pairs, dtype=complex).reshape(-1, 2))

    @property
    def infinite(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.w[:, 1] == 0))

    @property
    def zeros(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.w[:, 0] == 0))

    def affine_values(self) -> np.ndarray:
        out = np.full(len(self.w), np.inf, dtype=complex)
        fin = self.w[:, 1] != 0
        out[fin] = self.w[fin, 0] / self.w[fin, 1]
        return out

    def to_json(self) -> dict:
        return {
            "z": [self.z.real, self.z.imag],
            "w": [[[p.real, p.imag] for p in pair] for pair in self.w.tolist()],
            "stratum": self.stratum,
        }


def glue_normalize(model: DegenerationModel, p: ApPoint) -> ApPoint:
    """Canonical representative: no coordinate at infinity, ``z_g`` in the window.

    ``(z; ..., inf_i, ...) ~ (z + tau_ig; t_i1 w_1, ..., 0_i, ..., t_{i,g-1} w_{g-1})``
    and ``(z; w) ~ (z + tau_g; e(tau_1g) w_1, ..., e(tau_{g-1,g}) w_{g-1})``.
    """
    z = p.z
    w = p.w.copy()
    tp = model.t_prime
    for i in range(model.g - 1):
        if w[i, 1] == 0:
            z += model.tau_dprime[i]
            w[i] = (0, 1)
            for j in range(model.g - 1):
                if j != i:
                    w[j, 0] *= tp[i, j]
    z_red, _, n_tau = model.reduce(z)
    if n_tau != 0:
        w[:, 0] *= e_of(-int(n_tau) * model.tau_dprime)
    if n_tau == 0 and z_red == z and np.array_equal(w, p.w):
        return p
    return ApPoint(complex(z_red), w)


# --------------------------------------------------------------- sections

def monomial_weights(model: DegenerationModel, pairs: np.ndarray) -> np.ndarray:
    """``c_q prod u_i^{q_i} v_i^{1-q_i}`` for every ``q``; ``pairs`` is ``(n, g-1, 2)``."""
    pairs = np.asarray(pairs, dtype=complex).reshape(-1, model.g - 1, 2)
    qs = model.subsets
    mono = np.ones((pairs.shape[0], len(qs)), dtype=complex)
    for i in range(model.g - 1):
        mono *= np.where(qs[None, :, i] == 1, pairs[:, i, 0][:, None], pairs[:, i, 1][:, None])
    return mono * model.c_values[None, :]


class SectionValues(NamedTuple):
    values: np.ndarray
    error: np.ndarray


def phi_batch(model: DegenerationModel, zs, pairs, tol: float = DEFAULT_TOL,
              deriv: bool = False) -> SectionValues:
    """Sections (or their ``z_g``-derivative) at many points at once.

    ``zs`` has shape ``(n,)``, ``pairs`` shape ``(n, g-1, 2)``.  ``tol`` is
    relative to the peak size of each vartheta argument.
    """
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    n, ns = zs.size, len(model.subsets)
    args = (zs[:, None] + model.shifts[None, :]).reshape(-1)
    vals, bounds, _ = vartheta_table(model.tau_g, args, model.d, tol, deriv, relative=True)
    vals = vals.reshape(n, ns, model.d)
    bounds = bounds.reshape(n, ns, model.d)
    weights = monomial_weights(model, pairs) if model.g > 1 else np.ones((n, 1), complex)
    out = np.einsum("nq,nqk->nk", weights, vals)
    err = np.einsum("nq,nqk->nk", np.abs(weights), bounds)
    return SectionValues(out, err)


class SectionJet(NamedTuple):
    values: np.ndarray  # (n, d)
    dz: np.ndarray      # (n, d)
    du: np.ndarray      # (n, g-1, d)
    dv: np.ndarray      # (n, g-1, d)


def phi_jet(model: DegenerationModel, zs, pairs, tol: float = DEFAULT_TOL) -> SectionJet:
    """Sections with their derivatives in ``z_g`` and in each homogeneous entry.

    The homogeneous form is multilinear in the pairs, so ``d/du_i`` collects
    the terms with ``q_i = 1`` and ``d/dv_i`` those with ``q_i = 0``, each
    with slot ``i`` removed from the monomial.
    """
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    pairs = np.asarray(pairs, dtype=complex).reshape(zs.size, model.g - 1, 2)
    n, ns, d = zs.size, len(model.subsets), model.d
    args = (zs[:, None] + model.shifts[None, :]).reshape(-1)
    vals, _, _ = vartheta_table(model.tau_g, args, d, tol, relative=True)
    dvals, _, _ = vartheta_table(model.tau_g, args, d, tol, deriv=True, relative=True)
    vals = vals.reshape(n, ns, d)
    dvals = dvals.reshape(n, ns, d)
    qs = model.subsets
    weights = monomial_weights(model, pairs) if model.g > 1 else np.ones((n, 1), complex)
    values = np.einsum("nq,nqk->nk", weights, vals)
    dz = np.einsum("nq,nqk->nk", weights, dvals)
    du = np.zeros((n, model.g - 1, d), complex)
    dv = np.zeros((n, model.g - 1, d), complex)
    for i in range(model.g - 1):
        rest = np.ones((n, ns), complex) * model.c_values[None, :]
        for j in range(model.g - 1):
            if j != i:
                rest *= np.where(qs[None, :, j] == 1, pairs[:, j, 0][:, None],
                                 pairs[:, j, 1][:, None])
        on = qs[:, i] == 1
        du[:, i] = np.einsum("nq,nqk->nk", rest[:, on], vals[:, on])
        dv[:, i] = np.einsum("nq,nqk->nk", rest[:, ~on], vals[:, ~on])
    return SectionJet(values, dz, du, dv)


def phi_sections(model: DegenerationModel, p: ApPoint, tol: float = DEFAULT_TOL
                 ) -> SectionValues:
    """``(phi_0(P), ..., phi_{d-1}(P))`` in the homogeneous chart of ``P``.

    An all-zero vector is a base point; it is returned, not raised.
    """
    res = phi_batch(model, [p.z], p.w[None], tol)
    return SectionValues(res.values[0], res.error[0])


def phi_affine(model: DegenerationModel, z: complex, ws: Sequence[complex],
               tol: float = DEFAULT_TOL) -> np.ndarray:
    """``sum_q c_q vartheta_k(tau_g, z + q tau'') w^q`` for finite ``w``."""
    pairs = np.array([(w, 1) for w in ws], dtype=complex).reshape(1, -1, 2)
    return phi_batch(model, [z], pairs, tol).values[0]


def fs_distance(u, v) -> float:
    """Chordal Fubini-Study distance ``sqrt(1 - |<u,v>|^2 / (|u|^2 |v|^2))``."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise ValueError("zero vector has no projective class")
    # the sine form is accurate for nearby points
    cos = np.vdot(v, u) / (nu * nv)
    resid = u / nu - cos * (v / nv)
    return float(np.linalg.norm(resid))


def chordal_p1(a, b) -> float:
    """Chordal distance between two homogeneous pairs on ``P^1``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return float(abs(a[0] * b[1] - a[1] * b[0]) / (np.linalg.norm(a) * np.linalg.norm(b)))


def _aligned_distance(model: DegenerationModel, p: ApPoint, q: ApPoint) -> float:
    # move q to the lattice translate of its z closest to p.z, rescaling w to match
    delta = q.z - p.z
    red, n_d, n_tau = model.reduce(delta)
    best, shift = math.inf, 0
    for a in (-1, 0, 1):
        for b in (-1, 0, 1):
            dist = abs(red + a * model.d + b * model.tau_g)
            if dist < best:
                best, shift = dist, int(n_tau) - b
    w = q.w.copy()
    if shift:
        w[:, 0] *= e_of(-shift * model.tau_dprime)
    slots = [chordal_p1(p.w[i], w[i]) for i in range(model.g - 1)]
    return max([best] + slots)


def chart_separation(model: DegenerationModel, p: ApPoint, q: ApPoint) -> float:
    """Distance between ``P`` and ``Q`` in the glued branch coordinates.

    Direct comparison after aligning ``z_g`` on ``E``, or a path through the
    gluing locus: push a set of slots of one point to infinity (paying the
    chordal distance) and compare its glued image with the other point.
    """
    p = glue_normalize(model, p)
    q = glue_normalize(model, q)
    best = _aligned_distance(model, p, q)
    n = model.g - 1
    for a, b in ((p, q), (q, p)):
        for r in range(1, n + 1):
            for slots in itertools.combinations(range(n), r):
                cost = sum(chordal_p1(a.w[i], (1, 0)) for i in slots)
                if cost >= best:
                    continue
                w = a.w.copy()
                w[list(slots)] = (1, 0)
                img = glue_normalize(model, ApPoint(a.z, w))
                best = min(best, cost + _aligned_distance(model, img, b))
    return best


def translate_set_I(model: DegenerationModel, x: complex) -> np.ndarray:
    return model.translate_set(x)


# -------------------------------------------------------- tangent vectors

def _restricted(model: DegenerationModel, zero_slots: Sequence[int]) -> np.ndarray:
    qs = model.subsets
    if not len(zero_slots):
        return np.arange(len(qs))
    return np.flatnonzero(np.all(qs[:, list(zero_slots)] == 0, axis=1))


def tangent_family(model: DegenerationModel, p: ApPoint, tol: float = DEFAULT_TOL
                   ) -> np.ndarray:
    """The ``g + h + 1`` vectors spanning the projective tangent image at ``P``.

    Rows, in order: the section vector; its ``z_g``-derivative; for each
    zero slot ``b`` and ``eps = -1, +1`` the vector with arguments shifted by
    ``eps tau_bg`` and weights ``prod_{j in L} t_bj^{eps r_j}``; for each
    finite slot ``b`` the partial sum over ``r_b = 1``.
    """
    p = glue_normalize(model, p)
    g, d = model.g, model.d
    zero_slots = list(p.order[: p.stratum])
    finite = list(p.order[p.stratum:])
    idx = _restricted(model, zero_slots)
    qs = model.subsets[idx]
    vals_w = p.affine_values()
    mono = np.ones(len(idx), dtype=complex)
    for j in finite:
        mono *= np.where(qs[:, j] == 1, vals_w[j], 1.0)
    c = model.c_values[idx]
    base = p.z + model.shifts[idx]
    tp = model.tau_prime

    arg_blocks = [base]
    for b in zero_slots:
        for eps in (-1, 1):
            arg_blocks.append(base + eps * model.tau_dprime[b])
    args = np.concatenate(arg_blocks) if g > 1 else base
    vals, _, _ = vartheta_table(model.tau_g, args, d, tol, relative=True)
    dvals, _, _ = vartheta_table(model.tau_g, base, d, tol, deriv=True, relative=True)
    m = len(idx)
    coeff = c * mono

    rows = [coeff @ vals[:m], coeff @ dvals]
    block = 1
    for b in zero_slots:
        for eps in (-1, 1):
            lw = np.ones(m, dtype=complex)
            for j in finite:
                lw *= np.where(qs[:, j] == 1, e_of(eps * tp[b, j]), 1.0)
            rows.append((coeff * lw) @ vals[block * m:(block + 1) * m])
            block += 1
    for b in finite:
        sel = qs[:, b] == 1
        rows.append(coeff[sel] @ vals[:m][sel])
    return np.array(rows).reshape(g + p.stratum + 1, d)


def theta_vector_family(model: DegenerationModel, z: complex, h: int,
                        tol: float = DEFAULT_TOL) -> np.ndarray:
    """Vectors ``vartheta(z + r tau'')``, ``vartheta'(z + r tau'')`` and
    ``vartheta(z + eps tau_bg + r tau'')`` for ``r`` vanishing on the first
    ``h`` slots, ``b < h`` and ``eps = +-1``: ``2^{g-h}(h+1)`` rows."""
    g, d = model.g, model.d
    if not 0 <= h <= g - 1:
        raise ValueError(f"stratum must lie in 0..{g - 1}")
    n_rows = 2 ** (g - h) * (h + 1)
    if n_rows > d:
        warnings.warn(f"{n_rows} vectors in C^{d} cannot be independent", stacklevel=2)
    idx = _restricted(model, list(range(h)))
    base = complex(z) + model.shifts[idx]
    vals, _, _ = vartheta_table(model.tau_g, base, d, tol, relative=True)
    dvals, _, _ = vartheta_table(model.tau_g, base, d, tol, deriv=True, relative=True)
    blocks = [vals, dvals]
    for b in range(h):
        for eps in (-1, 1):
            v, _, _ = vartheta_table(model.tau_g, base + eps * model.tau_dprime[b], d, tol,
                                     relative=True)
            blocks.append(v)
    return np.vstack(blocks)


# ------------------------------------------------------------ limit check

def limit_consistency(model: DegenerationModel, t_scale: float, samples: int = 20,
                      tol: float = DEFAULT_TOL, rng: np.random.Generator | None = None
                      ) -> float:
    """Largest ``|theta_k(tau, z) - phi_k(z_g; e(z_1), ..., e(z_{g-1}))|`` over samples.

    ``tau`` has the model's off-diagonal entries and diagonal entries with
    ``e(tau_i) = t_scale`` for ``i < g-1``.
    """
    if not 0 < t_scale < 1:
        raise ValueError("t_scale must lie in (0, 1)")
    rng = rng if rng is not None else np.random.default_rng(0)
    g = model.g
    diag = [1j * math.log(1 / t_scale) / (2 * math.pi)] * (g - 1)
    tau = model.siegel_point(diag)
    worst = 0.0
    for _ in range(samples):
        z = np.empty(g, complex)
        z[:-1] = rng.uniform(0, 1, g - 1) + 1j * rng.uniform(-0.1, 0.1, g - 1)
        z[-1] = rng.uniform(0, 1) + rng.uniform(0, 1) * model.tau_g
        phi = phi_affine(model, z[-1], e_of(z[:-1]), tol)
        for k in range(model.d):
            th = theta_k_section(tau, z, k, tol, relative=True).value
            worst = max(worst, abs(th - phi[k]))
    return worst
