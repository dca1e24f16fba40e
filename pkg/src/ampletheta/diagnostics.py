"""Numerical certificates for the linear-system claims on degenerate fibres.

Every routine returns a small result record carrying a verdict and the
tolerance it was judged against.  Verdicts are strings:

* ``PASS`` / ``FAIL``: a claimed property was checked,
* ``INCONCLUSIVE``: a search ran out of budget without a decisive outcome,
* ``INFO``: the inputs lie outside the range where anything is claimed.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares, minimize
from scipy.stats import qmc

from ampletheta.degeneration import (
    SEPARATION_FLOOR,
    ApPoint,
    DegenerationModel,
    chart_separation,
    fs_distance,
    glue_normalize,
    monomial_weights,
    phi_batch,
    phi_jet,
    phi_sections,
    tangent_family,
)
from ampletheta.theta import DEFAULT_TOL, vartheta_table

PASS, FAIL, INCONCLUSIVE, INFO = "PASS", "FAIL", "INCONCLUSIVE", "INFO"

TOL_REL = 1e-8
DELTA_BPF = 1e-6
DELTA_COLL = 1e-8
ZERO_TOL = 1e-8
MAX_STEP = 0.5


def _spawn(rng: np.random.Generator, n: int) -> list[np.random.Generator]:
    """Independent child streams (counter-mode split of the parent's seed sequence)."""
    return [np.random.default_rng(s) for s in rng.bit_generator.seed_seq.spawn(n)]


# ------------------------------------------------------------------- rank

@dataclass(frozen=True)
class RankVerdict:
    shape: tuple[int, int]
    singular_values: tuple[float, ...]
    rank: int
    tol_rel: float
    threshold: float

    @property
    def full(self) -> bool:
        return self.rank == min(self.shape)

    @property
    def smallest_ratio(self) -> float:
        s = self.singular_values
        return s[-1] / s[0] if s and s[0] > 0 else 0.0

    def to_json(self) -> dict:
        return {"shape": list(self.shape), "rank": self.rank, "tol_rel": self.tol_rel,
                "threshold": self.threshold, "singular_values": list(self.singular_values)}


def numerical_rank(m, tol_rel: float = TOL_REL) -> RankVerdict:
    """Count singular values above ``tol_rel * s_max * max(shape)``.

    Rows are scaled to unit length first (zero rows stay zero), so scaling a
    row never changes the verdict.
    """
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if tol_rel <= 0:
        raise ValueError("tol_rel must be positive")
    norms = np.linalg.norm(m, axis=1)
    scaled = m / np.where(norms > 0, norms, 1.0)[:, None]
    s = np.linalg.svd(scaled, compute_uv=False) if m.size else np.zeros(0)
    top = float(s[0]) if s.size else 0.0
    threshold = tol_rel * top * max(m.shape)
    rank = int(np.sum(s > threshold)) if top > 0 else 0
    return RankVerdict(tuple(int(x) for x in m.shape), tuple(float(x) for x in s), rank,
                       float(tol_rel), float(threshold))


def elliptic_independence_check(model: DegenerationModel, points: Sequence[complex],
                                tol_rel: float = TOL_REL, tol: float = DEFAULT_TOL,
                                sep_floor: float = SEPARATION_FLOOR) -> RankVerdict:
    """Rank of ``(vartheta_k(tau_g, x_j))_{j,k}`` for distinct points ``x_j`` of E."""
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    if pts.size == 0:
        raise ValueError("need at least one point")
    for i in range(pts.size):
        for j in range(i + 1, pts.size):
            if model.e_distance(pts[i], pts[j]) < sep_floor:
                raise ValueError(f"points {i} and {j} are closer than {sep_floor} on E")
    red, _, _ = model.reduce(pts)
    vals, _, _ = vartheta_table(model.tau_g, red, model.d, tol, relative=True)
    return numerical_rank(vals, tol_rel)


def random_e_points(model: DegenerationModel, n: int, rng: np.random.Generator,
                    sep_floor: float = SEPARATION_FLOOR) -> np.ndarray:
    """``n`` points of E, uniform on the fundamental rectangle, pairwise separated."""
    pts: list[complex] = []
    while len(pts) < n:
        s, u = rng.uniform(0, 1, 2)
        x = complex(s * model.d + u * model.tau_g)
        if all(model.e_distance(x, y) >= sep_floor for y in pts):
            pts.append(x)
    return np.array(pts)


# ---------------------------------------------------------- point sampling

def _sphere_pair(a, b) -> np.ndarray:
    """Area-uniform point of ``P^1`` from two numbers in ``[0, 1)``."""
    theta = np.arccos(1 - 2 * np.asarray(a))
    phi = 2 * np.pi * np.asarray(b)
    return np.stack([np.sin(theta / 2) * np.exp(1j * phi), np.cos(theta / 2) + 0j], axis=-1)


def _stratum_points(model: DegenerationModel, h: int, unit: np.ndarray,
                    slot_sets: Sequence[tuple[int, ...]]):
    """Points of stratum ``h`` from rows of ``unit`` (values in ``[0,1)``).

    Row ``n`` uses zero slots ``slot_sets[n % len(slot_sets)]``; its first two
    columns place ``z_g`` in the fundamental rectangle, the rest fill the
    finite slots two at a time.
    """
    g, n = model.g, unit.shape[0]
    zs = unit[:, 0] * model.d + unit[:, 1] * model.tau_g
    pairs = np.zeros((n, g - 1, 2), complex)
    for r in range(n):
        zero = slot_sets[r % len(slot_sets)]
        col = 2
        for i in range(g - 1):
            if i in zero:
                pairs[r, i] = (0, 1)
            else:
                pairs[r, i] = _sphere_pair(unit[r, col], unit[r, col + 1])
                col += 2
    return zs, pairs


def _normalizer(model: DegenerationModel, zs, pairs) -> np.ndarray:
    """Scale of ``Phi``: the largest term envelope ``|c_q mono_q| exp(pi Im(x_q)^2 / Im tau_g)``."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    x = zs[:, None] + model.shifts[None, :]
    env = np.exp(np.pi * x.imag ** 2 / model.tau_g.imag)
    if model.g > 1:
        env = env * np.abs(monomial_weights(model, pairs))
    return env.max(axis=1)


def normalized_residual(model: DegenerationModel, zs, pairs, tol: float = DEFAULT_TOL
                        ) -> np.ndarray:
    """``|Phi(P)| / scale(P)`` for a batch of points; zero exactly at base points."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    pairs = np.asarray(pairs, dtype=complex).reshape(zs.size, model.g - 1, 2)
    red, _, n_tau = model.reduce(zs)
    pairs = pairs.copy()
    if model.g > 1:
        pairs[:, :, 0] *= np.exp(-2j * np.pi * n_tau[:, None] * model.tau_dprime[None, :])
        pairs /= np.abs(pairs).max(axis=2, keepdims=True)
    vals = phi_batch(model, red, pairs, tol).values
    return np.linalg.norm(vals, axis=1) / _normalizer(model, red, pairs)


# -------------------------------------------------------------- base locus

@dataclass
class BaseLocusResult:
    minimum: float
    witness: ApPoint
    per_stratum: dict[int, float]
    evaluations: int
    verdict: str
    threshold: float

    def to_json(self) -> dict:
        return {"minimum": self.minimum, "threshold": self.threshold, "verdict": self.verdict,
                "witness": self.witness.to_json(), "evaluations": self.evaluations,
                "per_stratum": {str(h): v for h, v in self.per_stratum.items()}}


def _chart_params(p: ApPoint) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """Real parameters of the finite slots in their ``|w| <= 1`` chart."""
    params = [p.z.real, p.z.imag]
    charts = []
    for i, (u, v) in enumerate(p.w):
        if u == 0:
            continue
        if abs(u) <= abs(v):
            w, c = u / v, 0
        else:
            w, c = v / u, 1
        params += [w.real, w.imag]
        charts.append((i, c))
    return np.array(params), charts


def _chart_point(base: ApPoint, x: np.ndarray, charts) -> tuple[complex, np.ndarray]:
    pairs = base.w.copy()
    for n, (i, c) in enumerate(charts):
        w = complex(x[2 + 2 * n], x[3 + 2 * n])
        pairs[i] = (w, 1) if c == 0 else (1, w)
    return complex(x[0], x[1]), pairs


def _refine_point(model: DegenerationModel, p: ApPoint, iterations: int, tol: float):
    x0, charts = _chart_params(p)

    def f(x):
        z, pairs = _chart_point(p, x, charts)
        r = normalized_residual(model, [z], pairs[None], tol)[0]
        return math.log(max(r, 1e-300))

    res = minimize(f, x0, method="Nelder-Mead",
                   options={"maxiter": iterations, "xatol": 1e-14, "fatol": 1e-14,
                            "adaptive": x0.size > 4})
    z, pairs = _chart_point(p, res.x, charts)
    q = glue_normalize(model, ApPoint(z, pairs))
    return math.exp(res.fun), q, res.nfev


def base_locus_search(model: DegenerationModel, samples: int = 2048, refine_starts: int = 6,
                      iterations: int = 400, rng: np.random.Generator | None = None,
                      delta_bpf: float = DELTA_BPF, tol: float = DEFAULT_TOL
                      ) -> BaseLocusResult:
    """Smallest normalized ``|Phi|`` over a stratified low-discrepancy sweep of ``A_p``.

    Each stratum ``h = 0..g-1`` gets ``samples`` points, the best
    ``refine_starts`` of which are polished by simplex descent on the
    logarithm of the residual in chart coordinates.  PASS iff the minimum
    exceeds ``delta_bpf`` when ``d > 2^{g-1}``; otherwise INFO.
    """
    if model.d < 2 and model.g > 1:
        raise ValueError("base locus search needs d > 1")
    rng = rng if rng is not None else np.random.default_rng(0)
    g = model.g
    streams = _spawn(rng, g)
    best = (math.inf, None)
    per: dict[int, float] = {}
    evals = 0
    for h in range(g):
        slot_sets = list(itertools.combinations(range(g - 1), h))
        dim = 2 + 2 * (g - 1 - h)
        sob = qmc.Sobol(dim, scramble=True, seed=streams[h])
        unit = sob.random(samples)
        zs, pairs = _stratum_points(model, h, unit, slot_sets)
        res = normalized_residual(model, zs, pairs, tol)
        evals += samples
        order = np.argsort(res)[:refine_starts]
        h_best = float(res[order[0]])
        h_pt = ApPoint(zs[order[0]], pairs[order[0]])
        for n in order:
            r, q, nfev = _refine_point(model, ApPoint(zs[n], pairs[n]), iterations, tol)
            evals += nfev
            if r < h_best:
                h_best, h_pt = r, q
        per[h] = h_best
        if h_best < best[0]:
            best = (h_best, h_pt)
    if model.d > 2 ** (g - 1):
        verdict = PASS if best[0] > delta_bpf else FAIL
    else:
        verdict = INFO
    return BaseLocusResult(best[0], glue_normalize(model, best[1]), per, evals, verdict,
                           delta_bpf)


# ---------------------------------------------------------------- products

@dataclass
class ProductResult:
    minimum: float
    witness: list[complex]
    expected_zero: bool
    verdict: str
    threshold: float
    evaluations: int

    def to_json(self) -> dict:
        return {"minimum": self.minimum, "threshold": self.threshold, "verdict": self.verdict,
                "expected_zero": self.expected_zero, "evaluations": self.evaluations,
                "witness": [[z.real, z.imag] for z in self.witness]}


def product_residual(taus: Sequence[complex], d: int, zs, tol: float = DEFAULT_TOL
                     ) -> np.ndarray:
    """``|(prod_j vartheta_l(tau_j, z_j))_l| / prod_j |vartheta(tau_j, z_j)|`` per row of ``zs``."""
    zs = np.atleast_2d(np.asarray(zs, dtype=complex))
    prod = np.ones((zs.shape[0], d), complex)
    scale = np.ones(zs.shape[0])
    for j, tau in enumerate(taus):
        v, _, _ = vartheta_table(tau, zs[:, j], d, tol, relative=True)
        prod *= v
        scale *= np.linalg.norm(v, axis=1)
    return np.linalg.norm(prod, axis=1) / scale


def product_construction_check(g: int, d: int, taus: Sequence[complex], samples: int = 4096,
                               refine_starts: int = 8, iterations: int = 2000,
                               rng: np.random.Generator | None = None,
                               delta_bpf: float = DELTA_BPF, zero_tol: float = ZERO_TOL,
                               tol: float = DEFAULT_TOL) -> ProductResult:
    """Search for common zeros of ``P_l(z) = prod_j vartheta_l(tau_j, z_j)`` on ``E_1 x ... x E_g``.

    A common zero is expected iff ``d <= g``: then PASS iff the minimum is
    below ``zero_tol``; otherwise PASS iff it exceeds ``delta_bpf``.
    """
    taus = [complex(t) for t in taus]
    if len(taus) != g:
        raise ValueError(f"need {g} elliptic parameters")
    if any(t.imag <= 0 for t in taus):
        raise ValueError("every tau_j must lie in the upper half-plane")
    if d < 2:
        raise ValueError("d must be at least 2")
    rng = rng if rng is not None else np.random.default_rng(0)
    tj = np.array(taus)
    unit = qmc.Sobol(2 * g, scramble=True, seed=rng).random(samples)
    zs = unit[:, :g] * d + unit[:, g:] * tj[None, :]
    res = product_residual(taus, d, zs, tol)
    evals = samples
    order = np.argsort(res)[:refine_starts]
    best_r, best_z = float(res[order[0]]), zs[order[0]]

    def f(x):
        z = (x[:g] + 1j * x[g:])[None]
        return math.log(max(product_residual(taus, d, z, tol)[0], 1e-300))

    for n in order:
        x0 = np.concatenate([zs[n].real, zs[n].imag])
        out = minimize(f, x0, method="Nelder-Mead",
                       options={"maxiter": iterations, "xatol": 1e-15, "fatol": 1e-15,
                                "adaptive": True})
        evals += out.nfev
        r = math.exp(out.fun)
        if r < best_r:
            best_r, best_z = r, out.x[:g] + 1j * out.x[g:]
    expected = d <= g
    if expected:
        verdict = PASS if best_r < zero_tol else FAIL
    else:
        verdict = PASS if best_r > delta_bpf else FAIL
    return ProductResult(best_r, [complex(z) for z in best_z], expected, verdict,
                         zero_tol if expected else delta_bpf, evals)


# ------------------------------------------------------------- injectivity

@dataclass
class CollisionWitness:
    p: ApPoint
    q: ApPoint
    fs_distance: float
    refined_fs_distance: float
    fs_error_bound: float
    separation: float
    rank_p: RankVerdict
    rank_q: RankVerdict
    joint_rank: RankVerdict

    @property
    def images_certified_distinct(self) -> bool:
        """The refined distance exceeds its certified evaluation error."""
        return self.refined_fs_distance > self.fs_error_bound

    def to_json(self) -> dict:
        return {"P": self.p.to_json(), "Q": self.q.to_json(), "fs_distance": self.fs_distance,
                "refined_fs_distance": self.refined_fs_distance,
                "fs_error_bound": self.fs_error_bound,
                "images_certified_distinct": self.images_certified_distinct,
                "separation": self.separation,
                "rank_P": self.rank_p.to_json(), "rank_Q": self.rank_q.to_json(),
                "joint_rank": self.joint_rank.to_json()}


@dataclass
class InjectivityResult:
    witnesses: list[CollisionWitness]
    coverage: dict
    verdict: str
    threshold: float

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "threshold": self.threshold, "coverage": self.coverage,
                "witnesses": [w.to_json() for w in self.witnesses]}


def _renormalize(model: DegenerationModel, zs: np.ndarray, pairs: np.ndarray):
    """Reduce ``z_g`` into the window (rescaling ``w``) and put each pair in its unit chart."""
    red, _, n_tau = model.reduce(zs)
    pairs = pairs.copy()
    if model.g > 1:
        pairs[..., 0] *= np.exp(-2j * np.pi * n_tau[..., None] * model.tau_dprime)
        pairs /= np.take_along_axis(
            pairs, np.argmax(np.abs(pairs), axis=-1)[..., None], axis=-1)
    return red, pairs


class _PairState:
    """Batched state ``(z_P, w_P, z_Q, w_Q)`` for the collision least squares."""

    def __init__(self, model: DegenerationModel, zs: np.ndarray, pairs: np.ndarray, tol: float):
        self.model = model
        self.tol = tol
        self.zs, self.pairs = _renormalize(model, zs, pairs)
        self._evaluate()

    def _evaluate(self):
        b = self.zs.shape[0]
        jet = phi_jet(self.model, self.zs.reshape(-1), self.pairs.reshape(2 * b, -1, 2), self.tol)
        d = self.model.d
        self.values = jet.values.reshape(b, 2, d)
        self.dz = jet.dz.reshape(b, 2, d)
        # derivative along the free entry of each pair (the other one is 1)
        free_u = np.abs(self.pairs[..., 0]) <= np.abs(self.pairs[..., 1])
        du = jet.du.reshape(b, 2, -1, d)
        dv = jet.dv.reshape(b, 2, -1, d)
        self.free_u = free_u
        self.dw = np.where(free_u[..., None], du, dv)
        fp, fq = self.values[:, 0], self.values[:, 1]
        self.mu = np.einsum("bk,bk->b", fq.conj(), fp) / np.einsum("bk,bk->b", fq.conj(), fq)
        self.residual = fp - self.mu[:, None] * fq
        self.cost = (np.linalg.norm(self.residual, axis=1) / np.linalg.norm(fp, axis=1)) ** 2

    def jacobian(self) -> np.ndarray:
        mu = self.mu[:, None, None]
        cols = [self.dz[:, 0, :, None], self.dw[:, 0].transpose(0, 2, 1),
                -mu * self.dz[:, 1, :, None], -mu * self.dw[:, 1].transpose(0, 2, 1),
                -self.values[:, 1, :, None]]
        return np.concatenate(cols, axis=2)

    def stepped(self, delta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n = self.model.g - 1
        zs = self.zs.copy()
        pairs = self.pairs.copy()
        zs[:, 0] += delta[:, 0]
        zs[:, 1] += delta[:, 1 + n]
        for side, off in ((0, 1), (1, 2 + n)):
            for i in range(n):
                step = delta[:, off + i]
                fu = self.free_u[:, side, i]
                pairs[:, side, i, 0] += np.where(fu, step, 0)
                pairs[:, side, i, 1] += np.where(fu, 0, step)
        return zs, pairs

    def take(self, mask: np.ndarray, other: _PairState):
        for name in ("zs", "pairs", "values", "dz", "free_u", "dw", "mu", "residual", "cost"):
            cur = getattr(self, name)
            cur[mask] = getattr(other, name)[mask]


def _aligned_proxy(model: DegenerationModel, zs: np.ndarray, pairs: np.ndarray) -> np.ndarray:
    """Cheap upper bound for the separation: direct comparison on ``E`` and each ``P^1``."""
    sep = model.e_distance(zs[:, 0], zs[:, 1])
    if model.g > 1:
        a, b = pairs[:, 0], pairs[:, 1]
        num = np.abs(a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0])
        den = np.linalg.norm(a, axis=-1) * np.linalg.norm(b, axis=-1)
        sep = np.maximum(sep, (num / den).max(axis=1))
    return sep


def polish_pairs(model: DegenerationModel, zs: np.ndarray, pairs: np.ndarray,
                 iterations: int = 40, tol: float = DEFAULT_TOL, collapse: float = 1e-4):
    """Batched Levenberg-Marquardt on ``Phi(P) - mu Phi(Q)`` with ``mu`` re-fitted each step.

    ``zs`` has shape ``(B, 2)`` and ``pairs`` shape ``(B, 2, g-1, 2)``.
    Restarts whose two points merge (aligned distance below ``collapse``)
    are frozen.  Returns ``(zs, pairs, fs, active)``.
    """
    state = _PairState(model, np.asarray(zs, complex), np.asarray(pairs, complex), tol)
    b = state.zs.shape[0]
    lam = np.full(b, 1e-3)
    active = np.ones(b, dtype=bool)
    for _ in range(iterations):
        if not active.any():
            break
        jac = state.jacobian()
        jh = jac.conj().transpose(0, 2, 1)
        a = jh @ jac
        diag = np.einsum("bii->bi", a).real
        a = a + (lam[:, None] * diag + 1e-300)[:, :, None] * np.eye(a.shape[1])[None]
        rhs = -np.einsum("bij,bj->bi", jh, state.residual)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            try:
                delta = np.linalg.solve(a, rhs[..., None])[..., 0]
            except np.linalg.LinAlgError:
                delta = np.stack([np.linalg.lstsq(a[i], rhs[i], rcond=None)[0]
                                  for i in range(b)])
        delta[~active] = 0
        delta[~np.all(np.isfinite(delta), axis=1)] = 0
        # trust region: coordinates live in unit charts, so no step beyond MAX_STEP
        big = np.abs(delta).max(axis=1)
        delta *= np.minimum(1.0, MAX_STEP / np.maximum(big, 1e-300))[:, None]
        zs_t, pairs_t = state.stepped(delta)
        trial = _PairState(model, zs_t, pairs_t, tol)
        better = (trial.cost < state.cost) & active & np.isfinite(trial.cost)
        state.take(better, trial)
        lam = np.where(better, np.maximum(lam / 3, 1e-12), np.minimum(lam * 4, 1e8))
        merged = _aligned_proxy(model, state.zs, state.pairs) < collapse
        active &= ~merged
        active &= state.cost > 1e-34
    fs = np.sqrt(np.maximum(state.cost, 0))
    return state.zs, state.pairs, fs, active


def _rank_one_defects(lam: np.ndarray, c: np.ndarray, n: int) -> np.ndarray:
    """2x2 minors of every flattening of ``lam / c`` as a ``2 x ... x 2`` tensor."""
    t = (lam / c).reshape((2,) * n)
    out = []
    for i in range(n):
        m = np.moveaxis(t, i, 0).reshape(2, -1)
        for a, b in itertools.combinations(range(m.shape[1]), 2):
            out.append(m[0, a] * m[1, b] - m[0, b] * m[1, a])
    scale = np.vdot(lam, lam).real
    return np.array(out) / scale if scale > 0 else np.array(out)


def _segre_pairs(lam: np.ndarray, c: np.ndarray, n: int) -> np.ndarray:
    """Recover homogeneous pairs ``(u_i, v_i)`` from a (near) rank-one ``lam / c``."""
    t = (lam / c).reshape((2,) * n)
    pairs = np.zeros((n, 2), complex)
    for i in range(n):
        m = np.moveaxis(t, i, 0).reshape(2, -1)
        col = int(np.argmax(np.linalg.norm(m, axis=0)))
        pairs[i] = (m[1, col], m[0, col])
    return pairs


def _determinant_seeds(model: DegenerationModel, attempts: int, rng: np.random.Generator,
                       tol: float):
    """Candidate pairs when ``d = 2^g``: points ``x, y`` on E where the ``2^g``
    vectors ``vartheta(x + q tau'')``, ``vartheta(y + q tau'')`` are dependent with
    Segre-type relation coefficients on both sides."""
    n = model.g - 1
    ns = 2 ** n
    c = model.c_values

    def system(p):
        x = model.reduce(complex(p[0], p[1]))[0]
        y = model.reduce(complex(p[2], p[3]))[0]
        args = np.concatenate([x + model.shifts, y + model.shifts])
        v, _, _ = vartheta_table(model.tau_g, args, model.d, tol, relative=True)
        nr = np.linalg.norm(v, axis=1)
        vn = v / nr[:, None]
        u, _, _ = np.linalg.svd(vn)
        alpha = np.conj(u[:, -1]) / nr
        lam, mu = alpha[:ns], -alpha[ns:]
        parts = [np.atleast_1d(np.linalg.det(vn)), _rank_one_defects(lam, c, n),
                 _rank_one_defects(mu, c, n)]
        r = np.concatenate(parts)
        return np.concatenate([r.real, r.imag]), x, y, lam, mu

    seeds = []
    for sub in _spawn(rng, attempts):
        s = sub.uniform(0, 1, 4)
        x0 = s[0] * model.d + s[1] * model.tau_g
        y0 = s[2] * model.d + s[3] * model.tau_g
        try:
            out = least_squares(lambda p: system(p)[0], [x0.real, x0.imag, y0.real, y0.imag],
                                xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=200)
        except (np.linalg.LinAlgError, ValueError):
            continue
        r, x, y, lam, mu = system(out.x)
        if not np.all(np.isfinite(r)):
            continue
        seeds.append((float(np.linalg.norm(r)), x, y, _segre_pairs(lam, c, n),
                      _segre_pairs(mu, c, n)))
    return seeds


def _random_pairs(model: DegenerationModel, rng: np.random.Generator):
    n = model.g - 1
    s = rng.uniform(0, 1, 4 + 4 * n)
    zs = np.array([s[0] * model.d + s[1] * model.tau_g, s[2] * model.d + s[3] * model.tau_g])
    pairs = _sphere_pair(s[4::2], s[5::2]).reshape(2, n, 2)
    return zs, pairs


def _overlap_pairs(model: DegenerationModel, rng: np.random.Generator):
    """``y`` near ``x + (q - q') . tau''`` so that the translate sets overlap."""
    zs, pairs = _random_pairs(model, rng)
    qs = model.subsets
    i, j = rng.choice(len(qs), 2, replace=False)
    jitter = 0.05 * (rng.normal() + 1j * rng.normal())
    zs[1] = zs[0] + (qs[i] - qs[j]) @ model.tau_dprime + jitter
    return zs, pairs


def _differential_rank(model: DegenerationModel, p: ApPoint, tol_rel: float, tol: float):
    t = tangent_family(model, p, tol)
    return t, numerical_rank(t, tol_rel)


def injectivity_search(model: DegenerationModel, restarts: int = 10_000, iterations: int = 40,
                       rng: np.random.Generator | None = None, delta_coll: float = DELTA_COLL,
                       sep_floor: float = SEPARATION_FLOOR, structured: int = 200,
                       tol_rel: float = TOL_REL, tol: float = DEFAULT_TOL,
                       batch: int = 2500) -> InjectivityResult:
    """Multi-start search for pairs ``P != Q`` with ``phi(P) = phi(Q)``.

    Restarts are split between structured seeds (overlapping translate sets
    ``I(x)``, ``I(y)``; when ``d = 2^g`` also the dependent-configuration
    solutions from :func:`_determinant_seeds`) and uniform random pairs.
    Each is polished by batched Levenberg-Marquardt; survivors with Fubini-
    Study distance below ``10 delta_coll`` and separation above ``sep_floor``
    are re-polished at a 10x tighter evaluation tolerance and kept only if the
    refined distance stays below ``delta_coll`` and the differential has full
    rank at both points.

    Verdict: for ``d > 2^g`` PASS iff no witness survives.  Otherwise a
    verified witness gives PASS and an empty list gives INCONCLUSIVE (the
    coverage statistics say how much was searched).
    """
    g, d = model.g, model.d
    if d <= 2 ** (g - 1):
        raise ValueError("phi is only a morphism for d > 2^(g-1)")
    if g < 2:
        # E embeds for d >= 3; nothing to search
        return InjectivityResult([], {"restarts": 0}, PASS if d > 2 else INFO, delta_coll)
    rng = rng if rng is not None else np.random.default_rng(0)
    seed_rng, det_rng, polish_rng = _spawn(rng, 3)
    n_struct = min(structured, restarts)
    streams = _spawn(seed_rng, restarts)
    init = [(_overlap_pairs if k < n_struct // 2 else _random_pairs)(model, s)
            for k, s in enumerate(streams)]
    det_seeds = []
    if d == 2 ** g and n_struct:
        det_seeds = _determinant_seeds(model, n_struct - n_struct // 2, det_rng, tol)
        for k, (_, x, y, pp, pq) in enumerate(det_seeds):
            init[n_struct // 2 + k] = (np.array([x, y]), np.stack([pp, pq]))
    zs = np.array([a for a, _ in init])
    pairs = np.array([b for _, b in init])

    out_z, out_p, out_fs = [], [], []
    for lo in range(0, restarts, batch):
        z1, p1, fs1, _ = polish_pairs(model, zs[lo:lo + batch], pairs[lo:lo + batch],
                                      iterations, tol)
        out_z.append(z1)
        out_p.append(p1)
        out_fs.append(fs1)
    zs = np.concatenate(out_z)
    pairs = np.concatenate(out_p)
    fs = np.concatenate(out_fs)
    proxy = _aligned_proxy(model, zs, pairs)

    witnesses: list[CollisionWitness] = []
    candidates = np.flatnonzero((fs < 10 * delta_coll) & (proxy >= sep_floor))
    separated_fs = fs[proxy >= sep_floor]
    rejected = {"separation": 0, "refined_fs": 0, "rank": 0}
    for k in candidates[np.argsort(fs[candidates])]:
        p = glue_normalize(model, ApPoint(zs[k, 0], pairs[k, 0]))
        q = glue_normalize(model, ApPoint(zs[k, 1], pairs[k, 1]))
        if chart_separation(model, p, q) < sep_floor:
            rejected["separation"] += 1
            continue
        z2, p2, _, _ = polish_pairs(model, zs[k:k + 1], pairs[k:k + 1], 2 * iterations, tol / 10)
        p = glue_normalize(model, ApPoint(z2[0, 0], p2[0, 0]))
        q = glue_normalize(model, ApPoint(z2[0, 1], p2[0, 1]))
        sp = phi_sections(model, p, tol / 10)
        sq = phi_sections(model, q, tol / 10)
        refined = fs_distance(sp.values, sq.values)
        # moving u by e turns it by at most |e| / (|u| - |e|); factor 2 covers that
        fs_err = 2.0 * float(np.linalg.norm(sp.error) / np.linalg.norm(sp.values)
                             + np.linalg.norm(sq.error) / np.linalg.norm(sq.values))
        sep = chart_separation(model, p, q)
        if sep < sep_floor:
            rejected["separation"] += 1
            continue
        if not refined < delta_coll:
            rejected["refined_fs"] += 1
            continue
        tp, rp = _differential_rank(model, p, tol_rel, tol)
        tq, rq = _differential_rank(model, q, tol_rel, tol)
        if rp.rank != g + p.stratum + 1 or rq.rank != g + q.stratum + 1:
            rejected["rank"] += 1
            continue
        if any(chart_separation(model, p, w.p) < sep_floor and
               chart_separation(model, q, w.q) < sep_floor or
               chart_separation(model, p, w.q) < sep_floor and
               chart_separation(model, q, w.p) < sep_floor for w in witnesses):
            continue
        joint = numerical_rank(np.vstack([tp, tq]), tol_rel)
        witnesses.append(CollisionWitness(p, q, float(fs[k]), float(refined), fs_err,
                                          float(sep), rp, rq, joint))
    witnesses.sort(key=lambda w: w.refined_fs_distance)
    coverage = {
        "restarts": int(restarts),
        "structured_overlap_seeds": int(n_struct // 2),
        "determinant_seeds": len(det_seeds),
        "determinant_seed_best_residual": (min(s[0] for s in det_seeds) if det_seeds
                                           else None),
        "iterations": int(iterations),
        "collapsed_to_diagonal": int(np.sum(proxy < sep_floor)),
        "separated": int(np.sum(proxy >= sep_floor)),
        "best_separated_fs": float(separated_fs.min()) if separated_fs.size else None,
        "candidates": int(candidates.size),
        "rejected_on_verification": rejected,
    }
    if d > 2 ** g:
        verdict = PASS if not witnesses else FAIL
    else:
        verdict = PASS if witnesses else INCONCLUSIVE
    return InjectivityResult(witnesses, coverage, verdict, delta_coll)


# --------------------------------------------------------------- immersion

@dataclass
class ImmersionResult:
    ranks: dict[int, list[int]]
    expected: dict[int, int]
    worst_ratio: dict[int, float]
    claimed: bool
    verdict: str
    tol_rel: float

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "tol_rel": self.tol_rel, "claimed": self.claimed,
                "ranks": {str(h): r for h, r in self.ranks.items()},
                "expected": {str(h): r for h, r in self.expected.items()},
                "worst_singular_ratio": {str(h): r for h, r in self.worst_ratio.items()}}


def immersion_check(model: DegenerationModel, points_per_stratum: int = 20,
                    tol_rel: float = TOL_REL, rng: np.random.Generator | None = None,
                    tol: float = DEFAULT_TOL) -> ImmersionResult:
    """Numerical rank of the tangent family at random points of every stratum.

    The expected rank on stratum ``h`` is ``g + h + 1``.  The verdict is
    PASS/FAIL when ``d > 2^g`` and INFO for smaller ``d``; the table is
    reported either way.
    """
    g, d = model.g, model.d
    if d <= 2 ** (g - 1):
        raise ValueError("phi is only a morphism for d > 2^(g-1)")
    rng = rng if rng is not None else np.random.default_rng(0)
    ranks: dict[int, list[int]] = {}
    worst: dict[int, float] = {}
    streams = _spawn(rng, g)
    for h in range(g):
        slot_sets = list(itertools.combinations(range(g - 1), h))
        unit = streams[h].uniform(0, 1, (points_per_stratum, 2 + 2 * (g - 1 - h)))
        zs, pairs = _stratum_points(model, h, unit, slot_sets)
        ranks[h] = []
        worst[h] = math.inf
        for z, pr in zip(zs, pairs):
            rv = numerical_rank(tangent_family(model, ApPoint(z, pr), tol), tol_rel)
            ranks[h].append(rv.rank)
            worst[h] = min(worst[h], rv.smallest_ratio)
    expected = {h: g + h + 1 for h in range(g)}
    ok = all(r == expected[h] for h in ranks for r in ranks[h])
    claimed = d > 2 ** g
    verdict = (PASS if ok else FAIL) if claimed else INFO
    return ImmersionResult(ranks, expected, worst, claimed, verdict, tol_rel)


# ------------------------------------------------------------ divisibility

def degree_divisibility_scan(g_max: int) -> list[tuple[int, int]]:
    """Pairs ``(g, d)`` with ``g < d <= 2g + 1`` and ``g!`` dividing ``C(d, g + 1)``."""
    if g_max < 1:
        raise ValueError("g_max must be at least 1")
    return [(g, d) for g in range(1, g_max + 1) for d in range(g + 1, 2 * g + 2)
            if math.comb(d, g + 1) % math.factorial(g) == 0]
