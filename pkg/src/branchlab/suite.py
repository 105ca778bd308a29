"""Seeded property-suite runner.

Each registered check draws from its own deterministically seeded
generator, so a fixed seed reproduces the report byte for byte.  The
fast level sticks to exhaustive small cases and smoke runs; the full
level runs every check at its acceptance scale.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, product

from .colorings import (EVEN_SHAPE, GRADED_SHAPE, Coloring,
                        bushy_level_strings, extract_nice, extract_twocol,
                        kappa, ncol, verify_extraction)
from .cupping import (EMPTY_BUNDLE, bundle, find_pi_member,
                      materialize_pi_star, pi_membership_violation)
from .errors import ScenarioError
from .functionals import (FunctionalTable, hat_eval, image_tree,
                          pullback_tree)
from .gen import (odd_readback_psi, random_functional_table,
                  random_kappa_tree, random_pi_staging,
                  random_readback_splitting_subtree,
                  random_selection_scenario, random_weak_staged_tree,
                  spined_weak_tree, staged_context)
from .report import Report, ReportLine, errored, failed, passed
from .smc import (build_tprime, enumerate_pi, omega_level, oplus_tree,
                  select_extensions, smc_driver_stage, t_of, theta_decode)
from .strings import compatible, show_string, sort_lenlex, string_to_nat
from .thin import (TraceSystem, encode_tuple, hat_level_stages, is_thin,
                   rescale_trace, selfdelim_decode, selfdelim_encode,
                   spaced_level, spacing_bound_limit, spacing_bound_partial,
                   splitting_to_thin, thin_from_trace, trace_from_thin)
from .traceable import (declared_counts, extract_trace, frontier, init_state,
                        node_count_bound, run_stage, trace_bound_pair,
                        verify_final_nodes)
from .trees import branching_stats, leaves, level_map, level_of, successors


def _clean(x) -> str:
    return " ".join(str(x).split())


def _tally(check_id: str, total: int, first_bad) -> ReportLine:
    if first_bad is None:
        return passed(check_id, f"{total}/{total}")
    return failed(check_id, _clean(first_bad))


# -- colourings ---------------------------------------------------------------

def _twocol_bad(n: int, colors: dict[str, int]):
    c = Coloring(colors, 2)
    try:
        d, sub = extract_twocol(EVEN_SHAPE, n, c)
    except ValueError as e:
        return _clean(e)
    if verify_extraction(EVEN_SHAPE, lambda k: 2, n, c, d, sub):
        return None
    return "colouring " + "".join(str(colors[s]) for s in sorted(colors))


def _chk_twocol_exhaustive(rng, n):
    lvs = bushy_level_strings(EVEN_SHAPE, n)
    total = 1 << len(lvs)
    bad = None
    for idx in range(total):
        bad = _twocol_bad(n, {s: (idx >> k) & 1 for k, s in enumerate(lvs)})
        if bad is not None:
            break
    return [_tally(f"twocol-exh-n{n}", total, bad)]


def _chk_twocol_random(rng, n, count):
    lvs = bushy_level_strings(EVEN_SHAPE, n)
    bad = None
    for _ in range(count):
        bad = _twocol_bad(n, {s: rng.getrandbits(1) for s in lvs})
        if bad is not None:
            break
    return [_tally(f"twocol-rand-n{n}", count, bad)]


def _chk_twocol_mutant(rng):
    # deliberately spoil one extraction; the verifier must notice
    lvs = bushy_level_strings(EVEN_SHAPE, 1)
    colors = {s: rng.getrandbits(1) for s in lvs}
    d, sub = extract_twocol(EVEN_SHAPE, 1, Coloring(colors, 2))
    leaf = min(leaves(sub))
    flipped = dict(colors)
    flipped[leaf] = d
    if verify_extraction(EVEN_SHAPE, lambda k: 2, 1,
                         Coloring(flipped, 2), d, sub):
        return [errored("twocol-mutant", "flipped colour went undetected")]
    return [failed("twocol-mutant",
                   f"flipped {show_string(leaf)} to colour {d}")]


def _chk_nice(rng, i_max, per_cell):
    lines = []
    for i in range(i_max + 1):
        for n in range(i, i + 3):
            t0 = random_kappa_tree(rng, i, n)
            lvs = leaves(t0)
            bad = None
            for _ in range(per_cell):
                c = Coloring({s: rng.randrange(ncol(i)) for s in lvs},
                             ncol(i))
                try:
                    d, t1 = extract_nice(GRADED_SHAPE, i, t0, c)
                except ValueError as e:
                    bad = _clean(e)
                    break
                if not verify_extraction(GRADED_SHAPE,
                                         lambda k: kappa(i + 1, k),
                                         n, c, d, t1):
                    bad = f"d={d} rejected"
                    break
            lines.append(_tally(f"nice-i{i}-n{n}", per_cell, bad))
    return lines


def _chk_kappa(rng, imax, nmax):
    bad = None
    cases = 0
    for i in range(imax + 1):
        for n in range(i, nmax + 1):
            cases += 1
            if kappa(i, n) != 1 << (n - i + 2):
                bad = f"kappa({i},{n}) = {kappa(i, n)}"
                break
    return [_tally("kappa-closed-form", cases, bad)]


# -- cupping ------------------------------------------------------------------

def _crafted_blockers():
    const = FunctionalTable(tuple(("", n, 0, 1) for n in range(3)))
    readback = FunctionalTable(tuple((b, n, int(b), 1)
                                     for b in "01" for n in range(3)))
    return [bundle([const]), bundle([readback]), bundle([const, readback])]


def _chk_cupping_exhaustive(rng):
    lines = []
    for n in (0, 1):
        star = materialize_pi_star(n)
        node = find_pi_member(n, EMPTY_BUNDLE)
        ok = node in star and pi_membership_violation(node,
                                                      EMPTY_BUNDLE) is None
        lines.append(passed(f"cupping-exh-n{n}", show_string(node.tau))
                     if ok else failed(f"cupping-exh-n{n}",
                                       show_string(node.tau)))
    size = len(materialize_pi_star(1))
    lines.append(passed("cupping-pi1-size", str(size)) if size == 12
                 else failed("cupping-pi1-size", str(size)))
    return lines


def _chk_cupping_corpus(rng, bundles, nmax):
    corpus = [EMPTY_BUNDLE] + _crafted_blockers()
    while len(corpus) < bundles:
        tables = [random_functional_table(rng,
                                          axioms=rng.choice((5, 40, 200)))
                  for _ in range(rng.randint(1, 3))]
        corpus.append(bundle(tables))
    star1 = {0: set(materialize_pi_star(0)), 1: set(materialize_pi_star(1))}
    bad = None
    for k, adv in enumerate(corpus):
        for n in range(nmax + 1):
            try:
                node = find_pi_member(n, adv)
            except (ValueError, RuntimeError) as e:
                bad = f"bundle {k} n={n}: {_clean(e)}"
                break
            if pi_membership_violation(node, adv) is not None:
                bad = f"bundle {k} n={n}: filtered out"
                break
            if n <= 1 and node not in star1[n]:
                bad = f"bundle {k} n={n}: outside the materialized class"
                break
        if bad is not None:
            break
    return [_tally("cupping-corpus", len(corpus) * (nmax + 1), bad)]


# -- traceable ----------------------------------------------------------------

def _chk_traceable(rng, runs, horizon):
    frontier_bad = counts_bad = size_bad = pdiag_bad = None
    for k in range(runs):
        if k % 3 == 0:
            adv = EMPTY_BUNDLE
        else:
            adv = bundle([random_functional_table(rng,
                                                  axioms=rng.randint(2, 30))
                          for _ in range(rng.randint(1, 2))])
        st = init_state()
        for s in range(horizon):
            st = run_stage(st, adv)
            if frontier_bad is None and not frontier(st):
                frontier_bad = f"run {k}: empty frontier at stage {s + 1}"
        if counts_bad is None:
            for n, c in sorted(declared_counts(st).items()):
                if n <= 4 and c > node_count_bound(n):
                    counts_bad = (f"run {k}: {c} nodes at level {n} exceed "
                                  f"{node_count_bound(n)}")
                    break
        if size_bad is None:
            for i, by_n in extract_trace(st).per_i.items():
                for n, ds in by_n.items():
                    if len(ds) > trace_bound_pair(i, n)[1]:
                        size_bad = (f"run {k}: trace ({i},{n}) holds "
                                    f"{len(ds)} values")
                        break
                if size_bad is not None:
                    break
        if pdiag_bad is None and not verify_final_nodes(st, adv):
            pdiag_bad = f"run {k}: a guarded branch survived"
    return [_tally("traceable-frontier", runs, frontier_bad),
            _tally("traceable-counts", runs, counts_bad),
            _tally("traceable-tracesize", runs, size_bad),
            _tally("traceable-pdiag", runs, pdiag_bad)]


def _chk_factorial_identity(rng, nmax):
    import math
    bad = None
    for n in range(nmax + 1):
        lhs = 2 * (n + 2) * (1 << n) * math.factorial(n + 1)
        rhs = (1 << (n + 1)) * math.factorial(n + 2)
        if lhs != rhs:
            bad = f"n={n}: {lhs} != {rhs}"
            break
    return [_tally("traceable-identity", nmax + 1, bad)]


# -- thin / trace arms ---------------------------------------------------------

def _random_two_branching_sub(rng, t):
    sub, stack = {""}, [""]
    while stack:
        node = stack.pop()
        kids = list(successors(t, node))
        rng.shuffle(kids)
        for kid in kids[:2]:
            sub.add(kid)
            stack.append(kid)
    return sub


def _chk_trace_size_bound(rng, count):
    bad = None
    for k in range(count):
        psi = random_functional_table(rng, axioms=rng.randint(4, 16))
        stages = hat_level_stages(psi, 5)
        sub = _random_two_branching_sub(rng, stages.final)
        if not is_thin(stages.final, sub):
            bad = f"case {k}: spine subtree not thin"
            break
        ts = trace_from_thin(psi, stages, sub)
        for n, vals in ts.w.items():
            if len(vals) > 1 << (n + 1):
                bad = f"case {k}: {len(vals)} values at position {n}"
                break
        if bad is not None:
            break
    return [_tally("trace-size-bound", count, bad)]


def _chk_thin_from_trace(rng, count, depth):
    bad = None
    for k in range(count):
        st_tree = spined_weak_tree(rng, depth=rng.randint(4, depth),
                                   shoots=rng.randint(2, 8))
        buckets = level_map(st_tree.final)
        w = {}
        for n in range(4):
            pool = list(buckets.get(spaced_level(n), ()))
            rng.shuffle(pool)
            w[n] = frozenset(string_to_nat(s)
                             for s in pool[:rng.randint(1, max(1, n))])
        ts = TraceSystem(tuple(max(1, n) for n in range(4)), w)
        tp = thin_from_trace(st_tree, ts)
        if "" not in tp or not is_thin(st_tree.final, tp):
            bad = f"case {k}: output not thin"
            break
    return [_tally("thin-from-trace", count, bad)]


def _chk_spacing_bound(rng):
    lim = spacing_bound_limit(0)
    parts = [spacing_bound_partial(0, k) for k in range(1, 40)]
    ok = (lim == Fraction(4, 9) < 1
          and all(a < b for a, b in zip(parts, parts[1:]))
          and all(p < lim for p in parts)
          and lim - parts[-1] < Fraction(1, 10 ** 9))
    return [passed("kraft-four-ninths", str(lim)) if ok
            else failed("kraft-four-ninths", str(lim))]


def _chk_rescale_sizes(rng, count):
    bad = None
    for k in range(count):
        cuts = sorted({rng.randint(1, 2)}
                      | set(rng.sample(range(3, 14), rng.randint(2, 4))))
        p = (0, *cuts)
        horizon = len(p)
        f = tuple(rng.randrange(50) for _ in range(p[-1] + horizon))
        w = {}
        for m in range(horizon):
            need = p[m + 1] if m + 1 < horizon else max(horizon, p[-1] + 1)
            vals = {encode_tuple(f[:need])}
            w[m] = frozenset(vals if p[m] else ())
        out = rescale_trace(TraceSystem(p, w))
        for n in range(p[1], horizon):
            if f[n] not in out.values_at(n) or len(out.values_at(n)) > n:
                bad = f"case {k}: position {n} misses f or runs fat"
                break
        if bad is not None:
            break
    return [_tally("rescale-size-bound", count, bad)]


def _chk_selfdelim(rng, top):
    bad = None
    for n in range(1, top + 1):
        for m in range(1, top + 1):
            code = selfdelim_encode(n, m)
            if (selfdelim_decode(code) != (n, m)
                    or len(code) != 2 * n.bit_length() + m.bit_length()):
                bad = f"({n},{m}) -> {code}"
                break
        if bad is not None:
            break
    return [_tally("sd-roundtrip", top * top, bad)]


# -- splitting reductions ------------------------------------------------------

def _chk_split_thin(rng, count):
    bad = None
    for k in range(count):
        st_tree = random_weak_staged_tree(rng, steps=rng.randint(12, 25))
        sub = random_readback_splitting_subtree(rng, st_tree.final)
        r = splitting_to_thin(st_tree, sub)
        if not r.thin_ok or r.witness is not None:
            bad = f"case {k}: {r.witness}"
            break
    return [_tally("split-thin", count, bad)]


def _chk_split_mutant(rng, tries):
    # graft a compatible-image string onto a clean splitting subset and
    # make sure the reduction reports the break
    found = 0
    for _ in range(tries):
        st_tree = random_weak_staged_tree(rng, steps=20)
        final = st_tree.final
        sub = set(random_readback_splitting_subtree(rng, final))
        spoil = None
        for cand in sort_lenlex(final - sub):
            for y in sorted(sub):
                if y and not compatible(cand, y):
                    cut = min(level_of(final, cand), level_of(final, y))
                    if cand[:cut] == y[:cut]:
                        spoil = cand
                        break
            if spoil:
                break
        if spoil is None:
            continue
        r = splitting_to_thin(st_tree, sub | {spoil})
        if r.witness is None:
            return [failed("split-mutant-detect",
                           f"broken split at {show_string(spoil)} "
                           "went unreported")]
        found += 1
    if found == 0:
        return [errored("split-mutant-detect", "no mutant constructed")]
    return [passed("split-mutant-detect", f"{found} mutants caught")]


# -- packing selection ----------------------------------------------------------

def _selection_flaw(ctx, tau, nodes, sigma, res):
    picks = [s for pair in res.sigma_pairs.values() for s in pair]
    if set(res.sigma_pairs) != set(range(len(nodes))):
        return "member indices off"
    if len(set(picks)) != 2 * len(nodes):
        return "duplicate pick"
    for a, b in combinations(picks, 2):
        if compatible(a, b):
            return f"picks {show_string(a)},{show_string(b)} compatible"
    budget = Fraction(0)
    seen = []
    for m in range(1, max(d for _, d in nodes) + 1):
        budget += Fraction(sum(1 for _, d in nodes if d == m), 1 << m)
        seen.append(budget)
    if tuple(seen) != res.r or budget > 1:
        return f"budget sequence {res.r} off"
    for i, (nm, d) in enumerate(nodes):
        t_i = t_of(ctx.phi, nm)
        want = omega_level(ctx, nm)
        for pick in res.sigma_pairs[i]:
            if pick not in t_i or level_of(t_i, pick) != want:
                return f"pick {show_string(pick)} misses level {want}"
            if not pick.startswith(sigma):
                return f"pick {show_string(pick)} leaves the base"
        floor = (1 - res.r[d - 1]) * (1 << (d + 1))
        if len(res.psi_pool[i]) < floor:
            return f"pool {i} of {len(res.psi_pool[i])} under {floor}"
    return None


def _selection_exhaustive_flaw(ctx, tau, nodes, sigma, res):
    cands = []
    for nm, _ in nodes:
        t_i = t_of(ctx.phi, nm)
        want = omega_level(ctx, nm)
        pool = sort_lenlex(x for x in t_i
                           if level_of(t_i, x) == want
                           and x.startswith(sigma))
        if len(pool) > 12:
            return None  # out of oracle scope
        cands.append(list(combinations(pool, 2)))
    valid = []
    for combo in product(*cands):
        flat = [s for pair in combo for s in pair]
        if all(not compatible(a, b) for a, b in combinations(flat, 2)):
            valid.append(tuple(frozenset(p) for p in combo))
    if not valid:
        return "oracle finds no valid assignment at all"
    ours = tuple(frozenset(res.sigma_pairs[i]) for i in range(len(nodes)))
    if ours not in valid:
        return "selection not among the oracle's valid assignments"
    return None


def _chk_selection_twostar(rng):
    ctx = staged_context({"": 0, "1": 2, "10": 4, "11": 4})
    nodes = [("10", 1), ("11", 1)]
    res = select_extensions(ctx, "1", nodes, "00")
    ok = (res.sigma_pairs == {0: ("0000", "0001"), 1: ("0010", "0011")}
          and res.r == (Fraction(1),)
          and _selection_flaw(ctx, "1", nodes, "00", res) is None
          and _selection_exhaustive_flaw(ctx, "1", nodes, "00", res) is None)
    return [passed("select-twostar", "r=1") if ok
            else failed("select-twostar", str(res.sigma_pairs))]


def _chk_selection_random(rng, count):
    bad = None
    oracle_hits = 0
    for k in range(count):
        ctx, tau, nodes, sigma = random_selection_scenario(rng)
        res = select_extensions(ctx, tau, nodes, sigma)
        bad = _selection_flaw(ctx, tau, nodes, sigma, res)
        if bad is None:
            flaw = _selection_exhaustive_flaw(ctx, tau, nodes, sigma, res)
            if flaw is not None:
                bad = f"case {k}: {flaw}"
            else:
                oracle_hits += 1
        else:
            bad = f"case {k}: {bad}"
        if bad is not None:
            break
    line = _tally("select-random", count, bad)
    if bad is None:
        line = passed("select-random", f"{count}/{count} "
                                       f"oracle={oracle_hits}")
    return [line]


# -- readback round trip --------------------------------------------------------

def _chk_theta_roundtrip(rng, count):
    bad = None
    for k in range(count):
        ctx, st, succ = random_pi_staging(rng)
        tp, theta = build_tprime(ctx, st, succ)
        by_target: dict[str, list[str]] = {}
        for src, tgt in theta.axioms.items():
            by_target.setdefault(tgt, []).append(src)
        for tgt, srcs in by_target.items():
            for a, b in combinations(sorted(srcs), 2):
                if compatible(a, b):
                    bad = (f"case {k}: codes for {show_string(tgt)} "
                           "not prefix-free")
                    break
            if bad is not None:
                break
        if bad is not None:
            break
        for x in sort_lenlex(st.final):
            if x == "":
                continue
            chain = tuple(sorted((p for p in st.final
                                  if p != "" and x.startswith(p)), key=len))
            for leaf in leaves(tp[x]):
                if theta_decode(theta, leaf) != chain:
                    bad = (f"case {k}: leaf {show_string(leaf)} decodes "
                           f"off the path to {show_string(x)}")
                    break
            if bad is not None:
                break
        if bad is not None:
            break
    return [_tally("theta-roundtrip", count, bad)]


# -- image / pullback ------------------------------------------------------------

def _chk_pullback_image(rng, count):
    bad = None
    for k in range(count):
        a = "".join(rng.choice("01") for _ in range(rng.randint(1, 4)))
        t0 = frozenset(_random_two_branching_sub(rng, oplus_tree(a)))
        psi = odd_readback_psi(a)
        img = image_tree(psi, t0)
        back = pullback_tree(psi, t0, img)
        if back != t0:
            bad = f"case {k}: pullback lost {len(t0 ^ back)} strings"
            break
        if any(len(successors(img, m)) not in (0, 2) for m in img):
            bad = f"case {k}: image not two-branching"
            break
    return [_tally("pullback-image", count, bad)]


# -- enumeration / driver smoke ---------------------------------------------------

def _chk_pi6_chain(rng):
    ctx = staged_context({"": 0, "1": 2, "11": 4, "111": 6})
    st = enumerate_pi(ctx, 3)
    ok = st.final == frozenset({"", "1", "11", "111"})
    if ok:
        lv = {m: omega_level(ctx, m) for m in st.final}
        ok = all(lv[m] >= 2 + max((lv[p] for p in st.final
                                   if p != m and m.startswith(p)),
                                  default=-2)
                 for m in st.final if m != "")
    return [passed("pi6-chain", "4 admitted") if ok
            else failed("pi6-chain", ",".join(show_string(m)
                                              for m in sort_lenlex(st.final)))]


def _chk_smc_driver(rng, count):
    bad = None
    for k in range(count):
        a = "".join(rng.choice("01") for _ in range(rng.randint(1, 3)))
        t = oplus_tree(a)
        psi = FunctionalTable(tuple(
            (m, len(m) // 2 - 1, rng.getrandbits(1), 1)
            for m in sort_lenlex(t) if m))
        res = smc_driver_stage(("", t), psi, 64)
        if res.b_next not in res.t_next or not res.t_next <= t:
            bad = f"case {k}: stage left the tree"
            break
        if res.branch == "splitting-subtree" and any(
                len(successors(res.t_next, m)) not in (0, 2)
                for m in res.t_next):
            bad = f"case {k}: subtree not two-branching"
            break
    return [_tally("smc-driver", count, bad)]


# -- determinism -----------------------------------------------------------------

def _chk_determinism(rng):
    probe_seed = rng.randrange(1 << 30)

    def render_once():
        sub = random.Random(f"{probe_seed}:probe")
        lines = _chk_selection_random(sub, 3) + _chk_split_thin(sub, 5)
        return Report(probe_seed, tuple(lines)).render()

    first, second = render_once(), render_once()
    return [passed("report-determinism", f"bytes={len(first)}")
            if first == second else failed("report-determinism")]


# -- registry ---------------------------------------------------------------------

# (name, fn, fast kwargs or None, full kwargs or None)
_CHECKS = (
    ("twocol-exh-n0", _chk_twocol_exhaustive, {"n": 0}, {"n": 0}),
    ("twocol-exh-n1", _chk_twocol_exhaustive, {"n": 1}, {"n": 1}),
    ("twocol-exh-n2", _chk_twocol_exhaustive, None, {"n": 2}),
    ("twocol-rand-n2", _chk_twocol_random, {"n": 2, "count": 50}, None),
    ("twocol-rand-n3", _chk_twocol_random, None, {"n": 3, "count": 10_000}),
    ("nice", _chk_nice, {"i_max": 1, "per_cell": 25},
     {"i_max": 2, "per_cell": 1112}),
    ("kappa-closed-form", _chk_kappa, {"imax": 3, "nmax": 6},
     {"imax": 6, "nmax": 10}),
    ("cupping-exh", _chk_cupping_exhaustive, {}, {}),
    ("cupping-corpus", _chk_cupping_corpus, {"bundles": 10, "nmax": 2},
     {"bundles": 100, "nmax": 3}),
    ("traceable", _chk_traceable, {"runs": 5, "horizon": 4},
     {"runs": 100, "horizon": 8}),
    ("traceable-identity", _chk_factorial_identity, {"nmax": 8},
     {"nmax": 8}),
    ("trace-size-bound", _chk_trace_size_bound, {"count": 20},
     {"count": 100}),
    ("thin-from-trace", _chk_thin_from_trace, {"count": 30, "depth": 8},
     {"count": 1000, "depth": 12}),
    ("kraft-four-ninths", _chk_spacing_bound, {}, {}),
    ("rescale-size-bound", _chk_rescale_sizes, {"count": 20},
     {"count": 100}),
    ("sd-roundtrip", _chk_selfdelim, {"top": 16}, {"top": 64}),
    ("split-thin", _chk_split_thin, {"count": 100}, {"count": 1000}),
    ("split-mutant-detect", _chk_split_mutant, {"tries": 40},
     {"tries": 120}),
    ("select-twostar", _chk_selection_twostar, {}, {}),
    ("select-random", _chk_selection_random, {"count": 10}, {"count": 50}),
    ("theta-roundtrip", _chk_theta_roundtrip, {"count": 5}, {"count": 50}),
    ("pullback-image", _chk_pullback_image, {"count": 100}, {"count": 1000}),
    ("pi6-chain", _chk_pi6_chain, {}, {}),
    ("smc-driver", _chk_smc_driver, {"count": 10}, {"count": 30}),
    ("report-determinism", _chk_determinism, {}, {}),
)


def run_suite(level: str, seed: int = 0, mutate: int = 0) -> Report:
    """Run the registered checks for a level; lines sorted by check id."""
    if level not in ("fast", "full"):
        raise ScenarioError(f"unknown suite level {level!r}")
    lines: list[ReportLine] = []
    for name, fn, fast_kw, full_kw in _CHECKS:
        kwargs = fast_kw if level == "fast" else full_kw
        if kwargs is None:
            continue
        rng = random.Random(f"{seed}:{name}")
        try:
            lines.extend(fn(rng, **kwargs))
        except (ValueError, RuntimeError) as e:
            lines.append(errored(name, _clean(e)))
    if mutate:
        lines.extend(_chk_twocol_mutant(random.Random(f"{seed}:mutant")))
    lines.sort(key=lambda ln: ln.check_id)
    return Report(seed, tuple(lines))
