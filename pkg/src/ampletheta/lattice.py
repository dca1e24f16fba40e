"""Exact exponent algebra for the rank-(g-1) toroidal degeneration.

Monomials in the toroidal coordinates ``T_ij`` (``i <= j``) and the torus
characters ``w_i`` are stored as integer exponent vectors.  Everything in
this module uses exact integers (Python ints, or int64 arrays for the batch
tables); there is no floating point anywhere.

Indices are 0-based throughout: ``T_00`` is the first diagonal coordinate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import sympy

from ampletheta._accel import HAS_NUMBA, njit


class InvalidDimensionError(ValueError):
    pass


class InvalidStarVectorError(ValueError):
    pass


class NotInChartRingError(ValueError):
    """Exponent data that cannot be written with nonnegative chart exponents."""


def _check_dim(g: int) -> None:
    if int(g) != g or g < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {g!r}")


def pair_list(g: int) -> list[tuple[int, int]]:
    """Canonical ordering of the index pairs ``(i, j)``, ``i <= j``."""
    return [(i, j) for i in range(g) for j in range(i, g)]


def pair_index(g: int, i: int, j: int) -> int:
    if i > j:
        i, j = j, i
    if not (0 <= i and j < g):
        raise IndexError(f"pair ({i}, {j}) out of range for g={g}")
    # rows 0..i-1 contribute g, g-1, ..., g-i+1 pairs
    return i * g - i * (i - 1) // 2 + (j - i)


@dataclass(frozen=True)
class MonomialExponents:
    """``prod T_ij^{t[ij]} * prod w_i^{w[i]}`` as exact exponent data."""

    g: int
    t: tuple[int, ...]
    w: tuple[int, ...]

    def __post_init__(self):
        _check_dim(self.g)
        if len(self.t) != self.g * (self.g + 1) // 2 or len(self.w) != self.g:
            raise ValueError("exponent vectors do not match the dimension")
        if not all(isinstance(e, int) for e in self.t + self.w):
            raise TypeError("exponents must be Python integers")

    @classmethod
    def zero(cls, g: int) -> MonomialExponents:
        return cls(g, (0,) * (g * (g + 1) // 2), (0,) * g)

    @classmethod
    def from_maps(cls, g: int, t: dict[tuple[int, int], int] | None = None,
                  w: Sequence[int] | None = None) -> MonomialExponents:
        tt = [0] * (g * (g + 1) // 2)
        for (i, j), e in (t or {}).items():
            tt[pair_index(g, i, j)] += int(e)
        ww = tuple(int(e) for e in w) if w is not None else (0,) * g
        return cls(g, tuple(tt), ww)

    def t_exponent(self, i: int, j: int) -> int:
        return self.t[pair_index(self.g, i, j)]

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.t_exponent(i, i) for i in range(self.g))

    def is_restricted(self) -> bool:
        """True when no off-diagonal ``T_ij`` occurs."""
        return all(self.t_exponent(i, j) == 0 for i, j in pair_list(self.g) if i != j)

    def __mul__(self, other: MonomialExponents) -> MonomialExponents:
        if self.g != other.g:
            raise ValueError("dimension mismatch")
        return MonomialExponents(
            self.g,
            tuple(a + b for a, b in zip(self.t, other.t)),
            tuple(a + b for a, b in zip(self.w, other.w)),
        )

    def __pow__(self, n: int) -> MonomialExponents:
        n = int(n)
        return MonomialExponents(self.g, tuple(n * a for a in self.t), tuple(n * a for a in self.w))

    def to_json(self) -> dict:
        return {
            "t": [[[i, j], self.t_exponent(i, j)] for i, j in pair_list(self.g)],
            "w": list(self.w),
        }


def _as_int_vector(v: Iterable[int]) -> tuple[int, ...]:
    out = []
    for x in v:
        if int(x) != x:
            raise TypeError(f"expected an integer entry, got {x!r}")
        out.append(int(x))
    return tuple(out)


def is_star_vector(alpha: Sequence[int]) -> bool:
    a = tuple(alpha)
    if not a or any(x not in (-1, 0, 1) for x in a):
        return False
    return all(x >= 0 for x in a) or all(x <= 0 for x in a)


def _check_star(alpha: Sequence[int], g: int | None = None) -> tuple[int, ...]:
    a = _as_int_vector(alpha)
    if not is_star_vector(a):
        raise InvalidStarVectorError(f"{a} is not in the star")
    if g is not None and len(a) != g:
        raise InvalidStarVectorError(f"star vector {a} has length {len(a)}, expected {g}")
    return a


def enumerate_star(g: int) -> list[tuple[int, ...]]:
    """All sign vectors in ``{0, +-1}^g`` that are ``>= 0`` or ``<= 0``.

    The zero vector appears once; the size is ``2**(g+1) - 1``.
    """
    _check_dim(g)
    nonneg = list(itertools.product((0, 1), repeat=g))
    nonpos = [tuple(-x for x in a) for a in nonneg if any(a)]
    return nonneg + nonpos


def pairing_exponents(y: Sequence[int], z: Sequence[int]) -> MonomialExponents:
    """Exponents of the character of ``y`` evaluated on the period ``z``.

    ``T_ii -> y_i z_i`` and ``T_ij -> (y_i - y_j)(z_i - z_j)`` for ``i < j``.
    """
    y, z = _as_int_vector(y), _as_int_vector(z)
    if len(y) != len(z) or not y:
        raise ValueError(f"length mismatch: {len(y)} vs {len(z)}")
    g = len(y)
    t = []
    for i, j in pair_list(g):
        t.append(y[i] * z[i] if i == j else (y[i] - y[j]) * (z[i] - z[j]))
    return MonomialExponents(g, tuple(t), (0,) * g)


def shifted_self_pairing(y: Sequence[int], alpha: Sequence[int]) -> MonomialExponents:
    """Exponents of ``X^{Phi(y)+alpha}(y)``; all nonnegative for ``alpha`` in the star."""
    y = _as_int_vector(y)
    a = _check_star(alpha, len(y))
    g = len(y)
    t = []
    for i, j in pair_list(g):
        if i == j:
            t.append(y[i] * (y[i] + a[i]))
        else:
            dy = y[i] - y[j]
            t.append(dy * (dy + a[i] - a[j]))
    return MonomialExponents(g, tuple(t), (0,) * g)


def chart_monomial(alpha: Sequence[int], beta: Sequence[int], z: Sequence[int],
                   restricted: bool = True) -> MonomialExponents:
    """Generator ``M_{beta,z}`` of the chart ring attached to ``alpha``.

    With ``restricted=True`` the off-diagonal ``T_ij`` are dropped (the
    coordinates ``T_ij``, ``i != j``, are fixed nonzero constants).
    """
    z = _as_int_vector(z)
    g = len(z)
    a = _check_star(alpha, g)
    b = _check_star(beta, g)
    t = []
    for i, j in pair_list(g):
        if i == j:
            t.append(z[i] * (z[i] + b[i]))
        elif restricted:
            t.append(0)
        else:
            dz = z[i] - z[j]
            t.append(dz * (dz + b[i] - b[j]))
    w = tuple(2 * z[i] + b[i] - a[i] for i in range(g))
    return MonomialExponents(g, tuple(t), w)


def express_in_chart(alpha: Sequence[int], m: MonomialExponents) -> list[tuple[int, int, int]]:
    """Write a restricted monomial as ``prod X_i^a Y_i^b T_i^c`` with ``a, b, c >= 0``.

    For ``alpha >= 0``: ``X_i = T_i^{alpha_i} w_i`` and ``Y_i = 1/w_i``; for
    ``alpha <= 0``: ``X_i = w_i`` and ``Y_i = T_i^{-alpha_i}/w_i``.  Since
    ``X_i Y_i`` is a power of ``T_i``, taking ``min(a, b) = 0`` maximizes
    ``c``, so a failure here means no representation exists.
    """
    a = _check_star(alpha, m.g)
    if not m.is_restricted():
        raise NotInChartRingError("monomial carries off-diagonal T exponents")
    nonneg = all(x >= 0 for x in a)
    out = []
    for i in range(m.g):
        e_t, e_w = m.t_exponent(i, i), m.w[i]
        if e_w >= 0:
            pa, pb = e_w, 0
        else:
            pa, pb = 0, -e_w
        # T-weight carried by X^pa Y^pb
        carried = a[i] * pa if nonneg else -a[i] * pb
        c = e_t - carried
        if c < 0:
            raise NotInChartRingError(
                f"coordinate {i}: T^{e_t} w^{e_w} needs T exponent {c} in chart {a}"
            )
        out.append((pa, pb, c))
    return out


def toroidal_exponent_matrix(g: int) -> sympy.Matrix:
    """Integer matrix ``E`` with ``log T = E log t`` (pairs in canonical order).

    ``T_ii = prod_k t_ki`` and ``T_ij = 1/t_ij``.  The map is an involution.
    The result is cross-checked against the dual of the principal-cone basis
    ``n'_ij = n_ii + n_jj - n_ij`` before it is returned.
    """
    _check_dim(g)
    pairs = pair_list(g)
    n = len(pairs)
    e = sympy.zeros(n, n)
    for row, (i, j) in enumerate(pairs):
        if i == j:
            for k in range(g):
                e[row, pair_index(g, k, i)] = 1
        else:
            e[row, pair_index(g, i, j)] = -1
    if e != principal_cone_exponent_matrix(g):
        raise AssertionError("coordinate change disagrees with the principal-cone dual basis")
    return e


def principal_cone_basis(g: int) -> sympy.Matrix:
    """Rows express ``n'_ij`` in the standard basis ``{n_kl}`` of ``Sym(g, Z)``."""
    _check_dim(g)
    pairs = pair_list(g)
    b = sympy.zeros(len(pairs), len(pairs))
    for row, (i, j) in enumerate(pairs):
        b[row, pair_index(g, i, i)] += 1
        b[row, pair_index(g, j, j)] += 1
        b[row, pair_index(g, i, j)] -= 1
    return b


def principal_cone_exponent_matrix(g: int) -> sympy.Matrix:
    """``log T`` in terms of ``log t`` obtained from the dual bases.

    With ``n' = B n`` the dual coordinates satisfy ``m = B^T m'``, so
    ``log T = (B^T)^{-1} log t``.  ``B`` is unimodular; the inverse is exact.
    """
    b = principal_cone_basis(g)
    inv = b.T.inv()
    if any(not x.is_integer for x in inv):
        raise AssertionError("principal-cone basis is not unimodular")
    return inv


@dataclass(frozen=True)
class PeriodLattice:
    """Generators of the period group acting on the torus ``(C*)^g``.

    Each generator is a tuple of ``g`` monomials in ``T``; component ``j``
    multiplies ``w_j``.
    """

    g: int
    d: int
    generators: tuple[tuple[MonomialExponents, ...], ...]

    def coefficient_matrix(self) -> sympy.Matrix:
        """Coordinates of the generators on the principal basis ``r_1..r_g``."""
        principal = period_lattice(self.g, 1)
        basis = sympy.Matrix([_flatten(r) for r in principal.generators])
        rows = []
        for r in self.generators:
            target = sympy.Matrix([_flatten(r)])
            sol = basis.T.solve_least_squares(target.T)
            if basis.T * sol != target.T or any(not x.is_integer for x in sol):
                raise AssertionError("generator is not an integer combination of r_1..r_g")
            rows.append(list(sol))
        return sympy.Matrix(rows)

    def index(self) -> int:
        return abs(int(self.coefficient_matrix().det()))

    def to_json(self) -> list:
        return [[m.to_json() for m in r] for r in self.generators]


def _flatten(r: Sequence[MonomialExponents]) -> list[int]:
    return [e for m in r for e in m.t]


def period_lattice(g: int, d: int = 1) -> PeriodLattice:
    """Periods ``r_i = (1/T_1i, ..., prod_k T_ki, ..., 1/T_gi)``; ``r_g`` is replaced
    by ``r_g^d`` for a polarization of type ``(1, ..., 1, d)``."""
    _check_dim(g)
    if int(d) != d or d < 1:
        raise ValueError(f"degree must be a positive integer, got {d!r}")
    gens = []
    for i in range(g):
        comps = []
        for j in range(g):
            if j == i:
                m = MonomialExponents.from_maps(g, {(k, i): 1 for k in range(g)})
            else:
                m = MonomialExponents.from_maps(g, {(j, i): -1})
            comps.append(m)
        gens.append(tuple(comps))
    if d > 1:
        gens[-1] = tuple(m ** d for m in gens[-1])
    return PeriodLattice(g, int(d), tuple(gens))


def character_on_period(y: Sequence[int], z: Sequence[int], lattice: PeriodLattice | None = None
                        ) -> MonomialExponents:
    """Evaluate ``prod w_i^{y_i}`` on the period ``sum z_j r_j`` by multiplying
    out the generators.  Independent of the closed form in ``pairing_exponents``."""
    y, z = _as_int_vector(y), _as_int_vector(z)
    g = len(y)
    if len(z) != g:
        raise ValueError("length mismatch")
    lattice = lattice or period_lattice(g, 1)
    out = MonomialExponents.zero(g)
    for i in range(g):
        comp = MonomialExponents.zero(g)
        for j in range(g):
            comp = comp * lattice.generators[j][i] ** z[j]
        out = out * comp ** y[i]
    return out


# ------------------------------------------------------------ batch tables
#
# Exhaustive checks over boxes of integer vectors need millions of exponent
# vectors.  The tables below evaluate the same formulas on int64 arrays
# (still exact: every entry stays far below 2**63).

def integer_box(g: int, bound: int) -> np.ndarray:
    """All vectors in ``[-bound, bound]^g`` as an ``(n, g)`` int64 array."""
    _check_dim(g)
    axis = np.arange(-bound, bound + 1, dtype=np.int64)
    grids = np.meshgrid(*([axis] * g), indexing="ij")
    return np.stack([x.ravel() for x in grids], axis=1)


def _pair_arrays(g: int) -> tuple[np.ndarray, np.ndarray]:
    pairs = np.array(pair_list(g), dtype=np.int64)
    return pairs[:, 0], pairs[:, 1]


def _int_array(x) -> np.ndarray:
    x = np.asarray(x)
    if x.dtype.kind not in "iu":
        raise TypeError(f"expected an integer array, got dtype {x.dtype}")
    return x


def pairing_exponent_table(ys: np.ndarray, zs: np.ndarray) -> np.ndarray:
    """``out[a, b] = pairing_exponents(ys[a], zs[b]).t``.

    The integer dtype of the inputs is kept, so narrow dtypes are the
    caller's responsibility (entries up to ``4 max|y| max|z|``).
    """
    ys, zs = _int_array(ys), _int_array(zs)
    ii, jj = _pair_arrays(ys.shape[1])
    dy = np.where(ii == jj, ys[:, ii], ys[:, ii] - ys[:, jj])
    dz = np.where(ii == jj, zs[:, ii], zs[:, ii] - zs[:, jj])
    return dy[:, None, :] * dz[None, :, :]


def pairing_exponent_rows(ys: np.ndarray, zs: np.ndarray) -> np.ndarray:
    """Row-aligned version: ``out[a] = pairing_exponents(ys[a], zs[a]).t``."""
    ys, zs = _int_array(ys), _int_array(zs)
    if ys.shape != zs.shape:
        raise ValueError(f"shape mismatch: {ys.shape} vs {zs.shape}")
    ii, jj = _pair_arrays(ys.shape[1])
    dy = np.where(ii == jj, ys[:, ii], ys[:, ii] - ys[:, jj])
    dz = np.where(ii == jj, zs[:, ii], zs[:, ii] - zs[:, jj])
    return dy * dz


def shifted_self_pairing_table(ys: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    """``out[a, b] = shifted_self_pairing(ys[a], alphas[b]).t``."""
    ys, alphas = _int_array(ys), _int_array(alphas).astype(np.asarray(ys).dtype)
    ii, jj = _pair_arrays(ys.shape[1])
    dy = np.where(ii == jj, ys[:, ii], ys[:, ii] - ys[:, jj])
    da = np.where(ii == jj, alphas[:, ii], alphas[:, ii] - alphas[:, jj])
    return dy[:, None, :] * (dy[:, None, :] + da[None, :, :])


def chart_slack_table(alpha: Sequence[int], betas: np.ndarray, zs: np.ndarray) -> np.ndarray:
    """T-exponent left over when the restricted ``M_{beta,z}`` is written in the
    generators of the chart ``alpha``; shape ``(len(betas), len(zs), g)``.

    ``express_in_chart`` succeeds exactly when every entry is ``>= 0``.
    """
    a = np.array(_check_star(alpha), dtype=np.int64)
    betas, zs = _int_array(betas), _int_array(zs)
    a = a.astype(zs.dtype)
    b = betas[:, None, :]
    z = zs[None, :, :]
    e_t = z * (z + b)
    e_w = 2 * z + b - a
    if np.all(a >= 0):
        carried = a * np.maximum(e_w, 0)
    else:
        carried = -a * np.maximum(-e_w, 0)
    return e_t - carried


@njit(cache=True)
def _pairing_into(y, z, ii, jj, out):
    for p in range(ii.shape[0]):
        i = ii[p]
        j = jj[p]
        if i == j:
            out[p] = y[i] * z[i]
        else:
            out[p] = (y[i] - y[j]) * (z[i] - z[j])


@njit(cache=True)
def _asymmetry_count_jit(ys, ii, jj):
    n = ys.shape[0]
    fwd = np.empty((n, ii.shape[0]), dtype=np.int64)
    bwd = np.empty((n, ii.shape[0]), dtype=np.int64)
    bad = 0
    for a in range(n):
        for b in range(a + 1, n):
            _pairing_into(ys[a], ys[b], ii, jj, fwd[b])
            _pairing_into(ys[b], ys[a], ii, jj, bwd[b])
        for b in range(a + 1, n):
            for p in range(ii.shape[0]):
                if fwd[b, p] != bwd[b, p]:
                    bad += 1
                    break
    return bad


def pairing_asymmetry_count(ys: np.ndarray, chunk: int = 512) -> int:
    """Number of unordered pairs ``{y, z}`` from ``ys`` with
    ``pairing_exponents(y, z) != pairing_exponents(z, y)``."""
    ys = _int_array(ys)
    if HAS_NUMBA:
        ii, jj = _pair_arrays(ys.shape[1])
        return int(_asymmetry_count_jit(ys.astype(np.int64), ii, jj))
    bad = 0
    for lo in range(0, len(ys), chunk):
        c = ys[lo:lo + chunk]
        a = pairing_exponent_table(c, ys)
        b = pairing_exponent_table(ys, c).transpose(1, 0, 2)
        mism = np.any(a != b, axis=2)
        # keep b > a only, so each unordered pair counts once
        idx = np.arange(lo, lo + len(c))[:, None] < np.arange(len(ys))[None, :]
        bad += int(np.sum(mism & idx))
    return bad
