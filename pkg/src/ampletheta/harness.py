"""Dispatch of the named verification suites.

Each suite returns a list of :class:`~ampletheta.report.Check`.  A suite
that raises is recorded as a failed check carrying the error message; only
configuration problems (unknown suite, non-generic model) escape as
:class:`~ampletheta.config.ConfigError`.

Randomness: the root seed of the config is split per suite with
``SeedSequence(seed, spawn_key=(suite index,))`` and further per check, so
a suite gives the same numbers whether it runs alone or inside ``full``.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from typing import Callable

import numpy as np
import sympy

from ampletheta import _accel, lattice
from ampletheta.config import SUITES, ConfigError, SuiteConfig
from ampletheta.degeneration import (
    ApPoint,
    DegenerationModel,
    GenericityError,
    fs_distance,
    glue_normalize,
    limit_consistency,
    phi_sections,
)
from ampletheta.diagnostics import (
    base_locus_search,
    degree_divisibility_scan,
    elliptic_independence_check,
    immersion_check,
    injectivity_search,
    product_construction_check,
    random_e_points,
)
from ampletheta.report import FAIL, INCONCLUSIVE, INFO, PASS, Check, DiagnosticsReport, Residual
from ampletheta.theta import (
    AllSectionsVanishError,
    SiegelPoint,
    automorphy_ratio,
    e_of,
    factorization_residual,
    factorization_terms,
    theta_k_section,
    vartheta_table,
)

log = logging.getLogger(__name__)


def _cx(pair) -> complex:
    return complex(pair[0], pair[1])


def build_model(cfg: SuiteConfig, d: int | None = None) -> DegenerationModel:
    m = cfg.model
    try:
        return DegenerationModel.from_offdiag(
            m.g, m.d if d is None else d, _cx(m.tau_g), [_cx(v) for v in m.tau_dprime],
            [_cx(v) for v in m.tau_prime_offdiag], m.n_rel)
    except GenericityError as exc:
        raise ConfigError(f"model is not generic: {exc}", "tau_dprime") from None
    except ValueError as exc:
        raise ConfigError(f"invalid model: {exc}", "model") from None


def _rng(cfg: SuiteConfig, suite: str, *sub: int) -> np.random.Generator:
    key = (SUITES.index(suite),) + tuple(sub)
    return np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=key))


def _verdict(ok: bool) -> str:
    return PASS if ok else FAIL


# ------------------------------------------------------------ lattice-exact

def _suite_lattice(cfg: SuiteConfig) -> list[Check]:
    g_top = cfg.model.g
    bound = cfg.budgets.lattice_bound
    checks = []
    dims = range(1, g_top + 1)

    t0 = time.perf_counter()
    sizes = {}
    ok = True
    for g in range(1, max(g_top, 10) + 1):
        stars = lattice.enumerate_star(g)
        brute = [a for a in itertools.product((-1, 0, 1), repeat=g)
                 if all(x >= 0 for x in a) or all(x <= 0 for x in a)]
        sizes[g] = len(stars)
        ok &= (len(stars) == 2 ** (g + 1) - 1 and sorted(stars) == sorted(brute)
               and len(set(stars)) == len(stars))
    checks.append(Check("star-cardinality", _verdict(ok), {"exact": 0},
                        "sign vectors that are all >= 0 or all <= 0",
                        info={"sizes": sizes, "wall_time_s": time.perf_counter() - t0}))

    t0 = time.perf_counter()
    asym, indef, neg53, chart_bad = {}, {}, {}, {}
    for g in dims:
        box = lattice.integer_box(g, bound)
        stars = np.array(lattice.enumerate_star(g), dtype=np.int64)
        asym[g] = lattice.pairing_asymmetry_count(box)
        self_pair = lattice.pairing_exponent_rows(box, box)
        zero_row = np.all(box == 0, axis=1)
        indef[g] = int(np.sum(np.any(self_pair < 0, axis=1))
                       + np.sum(np.all(self_pair == 0, axis=1) != zero_row))
        neg53[g] = int(np.sum(np.any(lattice.shifted_self_pairing_table(box, stars) < 0,
                                     axis=2)))
        bad = 0
        for a in stars:
            bad += int(np.sum(np.any(lattice.chart_slack_table(a, stars, box) < 0, axis=2)))
        chart_bad[g] = bad
    elapsed = time.perf_counter() - t0
    tol = {"exact": 0, "entry_bound": bound, "g_max": g_top}
    checks.append(Check("pairing-symmetry", _verdict(not any(asym.values())), tol,
                        "pairing exponents are symmetric in the two lattice vectors",
                        [Residual(f"asymmetric_pairs_g{g}", v, 0, "==") for g, v in asym.items()]))
    checks.append(Check("pairing-definiteness", _verdict(not any(indef.values())), tol,
                        "self-pairing exponents are >= 0 and vanish only at y = 0",
                        [Residual(f"violations_g{g}", v, 0, "==") for g, v in indef.items()]))
    checks.append(Check("shifted-self-pairing-nonnegative", _verdict(not any(neg53.values())),
                        tol, "shifted self-pairing exponents are nonnegative on the star",
                        [Residual(f"violations_g{g}", v, 0, "==") for g, v in neg53.items()]))
    checks.append(Check("chart-membership", _verdict(not any(chart_bad.values())), tol,
                        "every chart generator lies in the chart ring of every star vector",
                        [Residual(f"violations_g{g}", v, 0, "==")
                         for g, v in chart_bad.items()],
                        info={"wall_time_s": elapsed}))

    # the batch tables must agree with the scalar operations
    rng = _rng(cfg, "lattice-exact", 0)
    mismatches = 0
    for _ in range(300):
        g = int(rng.integers(1, g_top + 1))
        y = rng.integers(-bound, bound + 1, g)
        z = rng.integers(-bound, bound + 1, g)
        stars = lattice.enumerate_star(g)
        a = stars[int(rng.integers(len(stars)))]
        b = stars[int(rng.integers(len(stars)))]
        mismatches += lattice.pairing_exponents(y.tolist(), z.tolist()).t != tuple(
            lattice.pairing_exponent_table(y[None], z[None])[0, 0].tolist())
        mismatches += lattice.shifted_self_pairing(y.tolist(), a).t != tuple(
            lattice.shifted_self_pairing_table(y[None], np.array([a]))[0, 0].tolist())
        m = lattice.chart_monomial(a, b, z.tolist(), restricted=True)
        triples = lattice.express_in_chart(a, m)
        slack = lattice.chart_slack_table(a, np.array([b]), z[None])[0, 0]
        mismatches += tuple(c for _, _, c in triples) != tuple(slack.tolist())
    checks.append(Check("batch-scalar-agreement", _verdict(mismatches == 0), {"exact": 0},
                        "batch exponent tables reproduce the scalar operations",
                        [Residual("mismatches", mismatches, 0, "==")]))

    t0 = time.perf_counter()
    inv_bad = []
    for g in range(1, cfg.budgets.involution_g_max + 1):
        e = lattice.toroidal_exponent_matrix(g)  # also checks the principal-cone dual basis
        if e * e != sympy.eye(e.shape[0]):
            inv_bad.append(g)
    checks.append(Check("toroidal-involution", _verdict(not inv_bad),
                        {"exact": 0, "g_max": cfg.budgets.involution_g_max},
                        "toroidal coordinate change squares to the identity and matches "
                        "the principal-cone dual basis",
                        [Residual("failing_dimensions", len(inv_bad), 0, "==")],
                        info={"failing": inv_bad, "wall_time_s": time.perf_counter() - t0}))

    idx = {}
    for g in dims:
        idx[g] = lattice.period_lattice(g, cfg.model.d).index()
    checks.append(Check("period-lattice-index", _verdict(all(v == cfg.model.d
                                                              for v in idx.values())),
                        {"exact": 0, "d": cfg.model.d},
                        "d-th power of the last period generator has index d",
                        [Residual(f"index_g{g}", v, cfg.model.d, "==") for g, v in idx.items()]))
    return checks


# ------------------------------------------------------------ divisibility

def _suite_divisibility(cfg: SuiteConfig) -> list[Check]:
    g_max = cfg.budgets.g_max
    found = degree_divisibility_scan(g_max)
    # independent oracle: exact rational arithmetic on the binomial quotient
    from fractions import Fraction
    oracle = [(g, d) for g in range(1, g_max + 1) for d in range(g + 1, 2 * g + 2)
              if (Fraction(math.factorial(d), math.factorial(g + 1) * math.factorial(d - g - 1))
                  / math.factorial(g)).denominator == 1]
    high = [p for p in found if p[0] > 2]
    return [Check("degree-divisibility", _verdict(found == oracle and not high),
                  {"exact": 0, "g_max": g_max},
                  "g! divides the degree count only in genus 1 and 2",
                  [Residual("pairs_with_g_above_2", len(high), 0, "=="),
                   Residual("oracle_disagreements", len(set(found) ^ set(oracle)), 0, "==")],
                  info={"qualifying": [list(p) for p in found]})]


# ------------------------------------------------------------ theta level

def _random_siegel(rng: np.random.Generator, g: int, d: int, min_eig: float) -> SiegelPoint:
    q, _ = np.linalg.qr(rng.normal(size=(g, g)))
    lam = rng.uniform(min_eig, min_eig + 1.0, g)
    im = q @ np.diag(lam) @ q.T
    re = rng.uniform(-0.5, 0.5, (g, g))
    re = 0.5 * (re + re.T)
    return SiegelPoint(re + 1j * 0.5 * (im + im.T), d)


def _suite_theta_identities(cfg: SuiteConfig) -> list[Check]:
    th = cfg.theta
    tol = cfg.tolerances.tol
    gate = cfg.tolerances.identity
    rng = _rng(cfg, "theta-identities", 0)
    worst = {"shift_by_1": 0.0, "shift_by_tau": 0.0, "automorphy_spread": 0.0}
    where: dict[str, dict] = {}
    skipped = 0
    g_hi = min(th.identity_g_max, max(cfg.model.g, 1))
    for n in range(cfg.budgets.random_inputs):
        g = int(rng.integers(1, g_hi + 1))
        d = int(rng.integers(1, th.identity_d_max + 1))
        tau = _random_siegel(rng, g, d, th.identity_min_eig)
        c = rng.uniform(-0.5, 0.5, g)
        z = rng.uniform(0, 1, g) + 1j * (tau.tau.imag @ c)
        tg = complex(tau.tau[-1, -1])
        zg = complex(z[-1])
        v0, _, _ = vartheta_table(tg, [zg, zg + 1, zg + tg], d, tol, relative=True)
        scale = float(np.abs(v0[0]).max())
        k = np.arange(d)
        r1 = float(np.abs(v0[1] - e_of(k / d) * v0[0]).max()) / scale
        r2 = float(np.abs(v0[2] - e_of(-tg / 2 - zg) * v0[0]).max()) / (
            scale * abs(e_of(-tg / 2 - zg)))
        spread = 0.0
        for row in range(2 * g):
            try:
                ar = automorphy_ratio(tau, z, row, tol)
            except AllSectionsVanishError:
                skipped += 1
                continue
            spread = max(spread, ar.spread / abs(ar.ratio))
        for key, val in (("shift_by_1", r1), ("shift_by_tau", r2), ("automorphy_spread", spread)):
            if val >= worst[key]:
                worst[key] = val
                where[key] = {"input": n, "g": g, "d": d, "tau": tau.tau.tolist(),
                              "z": z.tolist()}
    res = [Residual(f"{k}_relative", v, gate, "<") for k, v in worst.items()]
    return [Check("theta-identities", _verdict(all(r.passed for r in res)),
                  {"identity": gate, "tol": tol, "min_eig": th.identity_min_eig},
                  "one-variable quasi-periodicity and a k-independent automorphy factor",
                  res, [{"kind": "worst-input", "tolerance": {"identity": gate}, "data": where}],
                  info={"inputs": cfg.budgets.random_inputs, "vanishing_rows_skipped": skipped})]


def _factorization_tau(cfg: SuiteConfig) -> SiegelPoint:
    g, d = cfg.model.g, cfg.model.d
    ft = cfg.theta.factorization_tau
    if ft:
        tau = np.zeros((g, g), complex)
        for (i, j), v in zip(lattice.pair_list(g), ft):
            tau[i, j] = tau[j, i] = _cx(v)
        return SiegelPoint(tau, d)
    if g == 1:
        return SiegelPoint([[1j]], d)
    if g == 2:
        return SiegelPoint([[2j, 0.3 + 0.1j], [0.3 + 0.1j, 1j]], d)
    model = build_model(cfg)
    return model.siegel_point([2j] * (g - 1))


def _suite_factorization(cfg: SuiteConfig) -> list[Check]:
    tau = _factorization_tau(cfg)
    g, d = tau.g, tau.d
    box = cfg.budgets.box
    gate = cfg.tolerances.factorization
    # absolute evaluation error well below the gate; the sections can be large
    tol = max(cfg.tolerances.tol, gate / 100)
    rng = _rng(cfg, "factorization", 0)
    worst, worst_at = 0.0, None
    monotone = True
    for _ in range(cfg.budgets.factorization_points):
        c = rng.uniform(-0.3, 0.3, g)
        z = rng.uniform(0, 1, g) + 1j * (tau.tau.imag @ c)
        for k in range(d):
            r = factorization_residual(tau, z, k, box, tol)
            if r >= worst:
                worst, worst_at = r, {"z": z.tolist(), "k": k}
            if g > 1:
                lhs = theta_k_section(tau, z, k, tol)
                prev = math.inf
                for q in range(1, box + 1):
                    rhs, err = factorization_terms(tau, z, k, q, tol)
                    cur = abs(lhs.value - rhs)
                    if cur > prev + lhs.tail_bound + err:
                        monotone = False
                    prev = cur
    res = [Residual("max_residual", worst, gate, "<")]
    return [Check("factorization", _verdict(res[0].passed), {"residual": gate, "box": box, "evaluation_tol": tol},
                  "theta_k expands in one-variable thetas with integer nome exponents",
                  res, [{"kind": "worst-point", "tolerance": {"residual": gate}, "data": worst_at}],
                  info={"tau": tau.tau.tolist(), "monotone_in_box": monotone})]


def _suite_limit(cfg: SuiteConfig) -> list[Check]:
    model = build_model(cfg)
    if model.g < 2:
        return [Check("limit", INFO, {}, "no degenerating directions for g = 1",
                      mandatory=False)]
    gate = cfg.tolerances.limit
    scales = sorted(cfg.theta.t_scales, reverse=True)
    devs = []
    for s in scales:
        # same sample points at every scale
        devs.append(limit_consistency(model, s, cfg.budgets.limit_samples, cfg.tolerances.tol,
                                      _rng(cfg, "limit", 0)))
    decreasing = all(b < a for a, b in zip(devs, devs[1:]))
    res = [Residual(f"deviation_t{s:g}", v, gate if s == scales[-1] else None, "<")
           for s, v in zip(scales, devs)]
    res.append(Residual("strict_decrease", int(decreasing), 1, "=="))
    return [Check("limit", _verdict(res[-2].passed and decreasing),
                  {"deviation": gate, "t_scales": scales},
                  "theta_k tends to the degenerate sections as the nomes go to zero", res,
                  info={"deviations": dict(zip([f"{s:g}" for s in scales], devs))})]


# -------------------------------------------------------- degenerate fibre

def _random_glue_point(model: DegenerationModel, rng: np.random.Generator) -> ApPoint:
    u = rng.uniform(-1.0, 2.0)
    z = complex(rng.uniform(0, 1) * model.d + u * model.tau_g)
    ws: list = []
    for _ in range(model.g - 1):
        if rng.uniform() < 0.5:
            ws.append(math.inf)
        else:
            ws.append(complex(rng.normal(), rng.normal()))
    return ApPoint.affine(z, ws)


def _suite_gluing(cfg: SuiteConfig) -> list[Check]:
    model = build_model(cfg)
    gate = cfg.tolerances.gluing
    rng = _rng(cfg, "gluing", 0)
    worst, worst_at, moved = 0.0, None, 0
    for _ in range(cfg.budgets.gluing_points):
        p = _random_glue_point(model, rng)
        q = glue_normalize(model, p)
        moved += q is not p
        dist = fs_distance(phi_sections(model, p, cfg.tolerances.tol).values,
                           phi_sections(model, q, cfg.tolerances.tol).values)
        if dist >= worst:
            worst, worst_at = dist, {"P": p.to_json(), "normalized": q.to_json()}
    res = [Residual("max_fs_distance", worst, gate, "<")]
    return [Check("gluing", _verdict(res[0].passed), {"fs_distance": gate},
                  "sections are compatible with the gluing and lattice identifications",
                  res, [{"kind": "worst-point", "tolerance": {"fs_distance": gate},
                         "data": worst_at}],
                  info={"points": cfg.budgets.gluing_points, "points_moved": moved})]


def _suite_independence(cfg: SuiteConfig) -> list[Check]:
    model = build_model(cfg)
    d = model.d
    t = cfg.tolerances
    if d < 2:
        return [Check("elliptic-independence", INFO, {}, "no subsets of d - 1 >= 1 points",
                      mandatory=False)]
    rng = _rng(cfg, "independence", 0)
    failures, worst, worst_at = 0, math.inf, None
    for _ in range(cfg.budgets.subsets):
        pts = random_e_points(model, d - 1, rng, t.sep_floor)
        rv = elliptic_independence_check(model, pts, t.tol_rel, t.tol, t.sep_floor)
        ok = rv.full and rv.smallest_ratio > t.singular_ratio
        failures += not ok
        if rv.smallest_ratio < worst:
            worst = rv.smallest_ratio
            worst_at = {"points": pts.tolist(), "rank": rv.to_json()}
    res = [Residual("failing_subsets", failures, 0, "=="),
           Residual("min_singular_ratio", worst, t.singular_ratio, ">")]
    return [Check("elliptic-independence", _verdict(failures == 0),
                  {"tol_rel": t.tol_rel, "singular_ratio": t.singular_ratio},
                  "any d - 1 distinct points of E impose independent conditions", res,
                  [{"kind": "worst-subset", "tolerance": {"tol_rel": t.tol_rel},
                    "data": worst_at}],
                  info={"subsets": cfg.budgets.subsets, "subset_size": d - 1})]


def _suite_bpf(cfg: SuiteConfig) -> list[Check]:
    model = build_model(cfg)
    b, t = cfg.budgets, cfg.tolerances
    r = base_locus_search(model, b.samples, b.refine_starts, b.refine_iterations,
                          _rng(cfg, "bpf", 0), t.delta_bpf, t.tol)
    claimed = r.verdict != INFO
    res = [Residual("min_normalized_residual", r.minimum, t.delta_bpf if claimed else None, ">")]
    res += [Residual(f"min_residual_stratum{h}", v, None, ">") for h, v in r.per_stratum.items()]
    return [Check("base-point-free", r.verdict, {"delta_bpf": t.delta_bpf},
                  "the degenerate sections have no common zero when d > 2^(g-1)", res,
                  [{"kind": "minimizer", "tolerance": {"delta_bpf": t.delta_bpf},
                    "data": r.witness.to_json()}],
                  info={"evaluations": r.evaluations, "samples_per_stratum": b.samples},
                  mandatory=claimed)]


def _suite_product(cfg: SuiteConfig) -> list[Check]:
    g, d = cfg.model.g, cfg.model.d
    b, t = cfg.budgets, cfg.tolerances
    taus = cfg.theta.product_taus
    if len(taus) < g:
        raise ConfigError(f"product_taus needs at least g = {g} entries", "product_taus")
    r = product_construction_check(g, d, [_cx(v) for v in taus[:g]], b.product_samples,
                                   b.product_refine_starts, b.product_iterations,
                                   _rng(cfg, "product-bpf", 0), t.delta_bpf, t.zero_tol, t.tol)
    rel = "<" if r.expected_zero else ">"
    return [Check("product-base-locus", r.verdict,
                  {"zero_tol": t.zero_tol, "delta_bpf": t.delta_bpf},
                  "products of one-variable thetas are base-point free iff d > g",
                  [Residual("min_normalized_residual", r.minimum, r.threshold, rel)],
                  [{"kind": "minimizer", "tolerance": {"threshold": r.threshold},
                    "data": {"z": r.witness}}],
                  info={"expected_common_zero": r.expected_zero, "evaluations": r.evaluations})]


def _suite_injectivity(cfg: SuiteConfig) -> list[Check]:
    model = build_model(cfg)
    g, d = model.g, model.d
    b, t = cfg.budgets, cfg.tolerances
    if d <= 2 ** (g - 1):
        return [Check("injectivity", INFO, {}, "not a morphism for d <= 2^(g-1)",
                      mandatory=False)]
    r = injectivity_search(model, b.restarts, b.iterations, _rng(cfg, "injectivity", 0),
                           t.delta_coll, t.sep_floor, b.structured, t.tol_rel, t.tol)
    tol = {"delta_coll": t.delta_coll, "sep_floor": t.sep_floor, "tol_rel": t.tol_rel}
    wit = [{"kind": "collision", "tolerance": tol, "data": w.to_json()} for w in r.witnesses]
    best = r.coverage.get("best_separated_fs")
    res = [Residual("verified_witnesses", len(r.witnesses), 0, "==" if d > 2 ** g else ">"),
           Residual("best_separated_fs", best if best is not None else math.nan, None, ">")]
    if d > 2 ** g:
        return [Check("injectivity", r.verdict, tol,
                      "phi separates points of the degenerate fibre when d > 2^g", res, wit,
                      info={"coverage": r.coverage})]
    explored = Check("collision-search", r.verdict, tol,
                     "at d = 2^g a finite set of pairs may be identified", res, wit,
                     info={"coverage": r.coverage}, mandatory=False)
    explicit = r.verdict in (PASS, INCONCLUSIVE) and r.coverage.get("restarts", 0) > 0
    outcome = Check("collision-search-outcome", _verdict(explicit), tol,
                    "the search reports either a verified witness or INCONCLUSIVE with "
                    "coverage statistics",
                    [Residual("explicit_outcome", int(explicit), 1, "==")],
                    info={"search_verdict": r.verdict})
    return [explored, outcome]


def _suite_immersion(cfg: SuiteConfig) -> list[Check]:
    model = build_model(cfg)
    g, d = model.g, model.d
    b, t = cfg.budgets, cfg.tolerances
    if d <= 2 ** (g - 1):
        return [Check("immersion", INFO, {}, "not a morphism for d <= 2^(g-1)",
                      mandatory=False)]
    r = immersion_check(model, b.points_per_stratum, t.tol_rel, _rng(cfg, "immersion", 0),
                        t.tol)
    mism = sum(x != r.expected[h] for h in r.ranks for x in r.ranks[h])
    res = [Residual("rank_mismatches", mism, 0, "==")]
    res += [Residual(f"worst_singular_ratio_stratum{h}", v, None, ">")
            for h, v in r.worst_ratio.items()]
    table = {h: sorted(set(v)) for h, v in r.ranks.items()}
    return [Check("immersion", r.verdict, {"tol_rel": t.tol_rel},
                  "the differential has rank g + h + 1 on stratum h", res,
                  info={"rank_table": table, "expected": r.expected, "ranks": r.ranks,
                        "claimed": r.claimed}, mandatory=r.claimed)]


_SUITES: dict[str, Callable[[SuiteConfig], list[Check]]] = {
    "lattice-exact": _suite_lattice,
    "theta-identities": _suite_theta_identities,
    "factorization": _suite_factorization,
    "limit": _suite_limit,
    "gluing": _suite_gluing,
    "bpf": _suite_bpf,
    "product-bpf": _suite_product,
    "independence": _suite_independence,
    "injectivity": _suite_injectivity,
    "immersion": _suite_immersion,
    "divisibility": _suite_divisibility,
}


def _run_one(name: str, cfg: SuiteConfig) -> list[Check]:
    t0 = time.perf_counter()
    try:
        checks = _SUITES[name](cfg)
    except ConfigError:
        raise
    except Exception as exc:  # reported, never propagated
        log.exception("suite %s failed", name)
        checks = [Check(name, FAIL, {}, "suite raised before completing",
                        info={"error": f"{type(exc).__name__}: {exc}"})]
    elapsed = time.perf_counter() - t0
    for c in checks:
        c.info.setdefault("suite", name)
        c.info.setdefault("suite_wall_time_s", elapsed)
    return checks


def run_suite(cfg: SuiteConfig) -> DiagnosticsReport:
    """Run ``cfg.suite`` and collect its checks into a report."""
    if cfg.suite not in SUITES:
        raise ConfigError(f"unknown suite {cfg.suite!r}; choose from {', '.join(SUITES)}",
                          "suite")
    names = [s for s in SUITES if s != "full"] if cfg.suite == "full" else [cfg.suite]
    if any(n not in ("lattice-exact", "divisibility", "theta-identities", "product-bpf")
           for n in names):
        build_model(cfg)  # surface configuration problems before any work
    t0 = time.perf_counter()
    report = DiagnosticsReport(cfg.suite, cfg.to_dict(), backend=_accel.backend())
    for name in names:
        log.info("running suite %s", name)
        report.checks.extend(_run_one(name, cfg))
    report.wall_time_s = time.perf_counter() - t0
    return report
