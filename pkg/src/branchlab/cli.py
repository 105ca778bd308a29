"""Command-line front end: scenario-driven checks, tab-separated reports.

Every command prints a report whose first line records the seed; the
process exits 0 exactly when no line is FAIL or ERROR.
"""

from __future__ import annotations

import argparse
import random
import shlex
import sys
from typing import Optional

from .colorings import (EVEN_SHAPE, GRADED_SHAPE, Coloring,
                        bushy_level_strings, extract_nice, extract_twocol,
                        kappa, ncol, verify_extraction)
from .cupping import bundle, find_pi_member
from .errors import BudgetError, ProtocolError, ScenarioError
from .functionals import (FunctionalTable, build_weak_splitting_tree,
                          splitting_violation, weak_splitting_violation)
from .gen import random_kappa_tree
from .report import Report, ReportLine, errored, failed, passed
from .scenario import (Scenario, empty_scenario, parse_scenario,
                       scenario_with_seed)
from .smc import (OmegaContext, build_tprime, enumerate_pi, omega_level,
                  oplus_tree, smc_driver_stage, t_of, theta_decode)
from .strings import (is_proper_prefix, nat_to_string, parse_string,
                      show_string, sort_lenlex)
from .thin import (TraceSystem, dnr_trace, hat_level_stages, rescale_trace,
                   selfdelim_decode, selfdelim_encode, thin_violation,
                   trace_from_bounded_splitting, trace_from_thin)
from .traceable import (declared_counts, extract_trace, frontier, init_state,
                        node_count_bound, run_stage, trace_bound_pair,
                        verify_final_nodes)
from .trees import successors


def _clean(x) -> str:
    return " ".join(str(x).split())


# -- scenario name resolution ------------------------------------------------

def _functional(sc: Scenario, name: str) -> FunctionalTable:
    if name not in sc.functionals:
        raise ScenarioError(
            f"no functional named {name!r} (have: "
            f"{sorted(sc.functionals) or 'none'})")
    return sc.functionals[name]


def _any_tree(sc: Scenario, name: str) -> frozenset[str]:
    if name in sc.trees:
        return sc.trees[name]
    if name in sc.staged:
        return sc.staged[name].final
    raise ScenarioError(
        f"no tree named {name!r} (have: "
        f"{sorted(sc.trees) + sorted(sc.staged) or 'none'})")


def _staged(sc: Scenario, name: str):
    if name not in sc.staged:
        raise ScenarioError(
            f"no staged tree named {name!r} (have: "
            f"{sorted(sc.staged) or 'none'})")
    return sc.staged[name]


def _param(flag: Optional[int], sc: Scenario, key: str, default: int) -> int:
    if flag is not None:
        return flag
    return sc.params.get(key, default)


# -- verify ------------------------------------------------------------------

def _twocol_once(n: int, colors: dict[str, int], check_id: str) -> ReportLine:
    c = Coloring(colors, 2)
    try:
        d, sub = extract_twocol(EVEN_SHAPE, n, c)
    except ValueError as e:
        return failed(check_id, _clean(e))
    if verify_extraction(EVEN_SHAPE, lambda k: 2, n, c, d, sub):
        return passed(check_id, f"d={d}")
    return failed(check_id, "".join(str(colors[s])
                                    for s in sorted(colors)))


def _h_verify_twocol(ns, sc, rng):
    lvs = bushy_level_strings(EVEN_SHAPE, ns.n)
    lines = []
    if ns.exhaustive:
        if len(lvs) > 16:
            raise BudgetError(f"{len(lvs)} leaves is too many to "
                              "enumerate exhaustively")
        width = len(str((1 << len(lvs)) - 1))
        for idx in range(1 << len(lvs)):
            colors = {s: (idx >> k) & 1 for k, s in enumerate(lvs)}
            lines.append(_twocol_once(ns.n, colors,
                                      f"twocol-exh-{idx:0{width}d}"))
    else:
        width = len(str(ns.count - 1)) if ns.count > 1 else 1
        for i in range(ns.count):
            colors = {s: rng.getrandbits(1) for s in lvs}
            lines.append(_twocol_once(ns.n, colors,
                                      f"twocol-rand-{i:0{width}d}"))
    return lines


def _h_verify_nice(ns, sc, rng):
    from .trees import leaves as tree_leaves
    t0 = random_kappa_tree(rng, ns.i, ns.n)
    lines = []
    width = len(str(ns.count - 1)) if ns.count > 1 else 1
    for k in range(ns.count):
        check_id = f"nice-i{ns.i}-n{ns.n}-{k:0{width}d}"
        c = Coloring({s: rng.randrange(ncol(ns.i))
                      for s in tree_leaves(t0)}, ncol(ns.i))
        try:
            d, t1 = extract_nice(GRADED_SHAPE, ns.i, t0, c)
        except ValueError as e:
            lines.append(failed(check_id, _clean(e)))
            continue
        ok = verify_extraction(GRADED_SHAPE,
                               lambda lv: kappa(ns.i + 1, lv),
                               ns.n, c, d, t1)
        lines.append(passed(check_id, f"d={d}") if ok
                     else failed(check_id, f"d={d}"))
    return lines


def _h_verify_kappa(ns, sc, rng):
    lines = []
    for i in range(ns.imax + 1):
        for n in range(i, ns.nmax + 1):
            got = kappa(i, n)
            want = 1 << (n - i + 2)
            check_id = f"kappa-{i}-{n}"
            lines.append(passed(check_id, str(got)) if got == want
                         else failed(check_id, f"{got} != {want}"))
    return lines


# -- run ---------------------------------------------------------------------

def _bundle_of(sc: Scenario):
    return bundle(sc.functionals[k] for k in sorted(sc.functionals))


def _h_run_cupping(ns, sc, rng):
    adv = _bundle_of(sc)
    lines = []
    for k in range(ns.n + 1):
        check_id = f"cupping-n{k}"
        try:
            node = find_pi_member(k, adv)
        except (ValueError, ProtocolError, BudgetError) as e:
            lines.append(failed(check_id, _clean(e)))
            continue
        lines.append(passed(check_id, show_string(node.tau)))
    return lines


def _h_run_traceable(ns, sc, rng):
    adv = _bundle_of(sc)
    st = init_state()
    stalled = None
    for s in range(ns.horizon):
        st = run_stage(st, adv)
        if not frontier(st):
            stalled = s + 1
            break
    lines = [passed("traceable-frontier", f"stages={ns.horizon}")
             if stalled is None
             else failed("traceable-frontier", f"empty at stage {stalled}")]
    counts = declared_counts(st)
    bad = [(n, c) for n, c in sorted(counts.items())
           if n <= 4 and c > node_count_bound(n)]
    lines.append(passed("traceable-counts",
                        " ".join(f"{n}:{c}" for n, c in sorted(counts.items())))
                 if not bad else
                 failed("traceable-counts", f"level {bad[0][0]} has "
                        f"{bad[0][1]} > {node_count_bound(bad[0][0])}"))
    sizes_ok = all(len(ds) <= trace_bound_pair(i, n)[1]
                   for i, by_n in extract_trace(st).per_i.items()
                   for n, ds in by_n.items())
    lines.append(passed("traceable-tracesize") if sizes_ok
                 else failed("traceable-tracesize"))
    lines.append(passed("traceable-final") if verify_final_nodes(st, adv)
                 else failed("traceable-final"))
    return lines


def _h_run_smc(ns, sc, rng):
    psi = _functional(sc, ns.psi)
    a = nat_to_string(_param(ns.oracle, sc, "oracle", 0))
    budget = _param(ns.budget, sc, "budget", 8)
    dagger = _any_tree(sc, ns.dagger) if ns.dagger else None
    try:
        res = smc_driver_stage(("", oplus_tree(a)), psi, budget, dagger)
    except BudgetError as e:
        return [failed("smc-driver", _clean(e))]
    return [passed("smc-driver",
                   f"{res.branch} b={show_string(res.b_next)} "
                   f"tree={len(res.t_next)}")]


def _h_run_pi6(ns, sc, rng):
    phi = _functional(sc, ns.phi)
    flen = _param(ns.flen, sc, "flen", 9)
    a = nat_to_string(_param(ns.oracle, sc, "oracle", 0))
    stages = _param(ns.stages, sc, "stages", 3)
    ctx = OmegaContext(phi, tuple(range(flen)), a)
    res = enumerate_pi(ctx, stages)
    lines = []
    for m in sort_lenlex(res.final):
        s = next(k for k, snap in enumerate(res.stages) if m in snap)
        lines.append(passed(f"pi6-admit-{show_string(m)}",
                            f"stage={s} level={omega_level(ctx, m)}"))
    bad = [m for m in res.final if m != ""
           and omega_level(ctx, m) < 2 + max(
               omega_level(ctx, p) for p in res.final
               if is_proper_prefix(p, m))]
    lines.append(passed("pi6-gap") if not bad
                 else failed("pi6-gap", show_string(sort_lenlex(bad)[0])))
    return lines


# -- check -------------------------------------------------------------------

def _h_check_thin(ns, sc, rng):
    t = _any_tree(sc, ns.tree)
    sub = _any_tree(sc, ns.sub)
    v = thin_violation(t, sub)
    check_id = f"thin-{ns.tree}-{ns.sub}"
    return [passed(check_id) if v is None else failed(check_id, _clean(v))]


def _h_check_split(ns, sc, rng):
    psi = _functional(sc, ns.psi)
    t = _any_tree(sc, ns.tree)
    v = splitting_violation(psi, t, delayed=ns.delayed, hat=ns.hat)
    check_id = f"split-{ns.psi}-{ns.tree}"
    if v is None:
        return [passed(check_id)]
    return [failed(check_id,
                   f"{show_string(v[0])},{show_string(v[1])}")]


def _h_check_weaksplit(ns, sc, rng):
    psi = _functional(sc, ns.psi)
    phi = _functional(sc, ns.phi)
    w = build_weak_splitting_tree(psi, phi, ns.budget)
    v = weak_splitting_violation(w, psi, parse_string(ns.path))
    check_id = f"weaksplit-{ns.psi}-{ns.phi}"
    return [passed(check_id, f"members={len(w.tree)}") if v is None
            else failed(check_id, _clean(v))]


def _h_check_theta(ns, sc, rng):
    phi = _functional(sc, ns.phi)
    st = _staged(sc, ns.staging)
    flen = _param(ns.flen, sc, "flen", 9)
    a = nat_to_string(_param(ns.oracle, sc, "oracle", 0))
    ctx = OmegaContext(phi, tuple(range(flen)), a)
    succ = {m: frozenset(successors(st.final, m)) for m in st.final}
    tp, theta = build_tprime(ctx, st, succ)
    lines = [passed("theta-consistency", f"axioms={len(theta.axioms)}")]
    from .trees import leaves as tree_leaves
    for x in sort_lenlex(st.final):
        if x == "":
            continue
        chain = tuple(sorted((p for p in st.final
                              if p != "" and x.startswith(p)), key=len))
        ok = all(theta_decode(theta, leaf) == chain
                 for leaf in tree_leaves(tp[x]))
        check_id = f"theta-{show_string(x)}"
        witness = ",".join(show_string(p) for p in chain)
        lines.append(passed(check_id, witness) if ok
                     else failed(check_id, witness))
    return lines


# -- trace -------------------------------------------------------------------

def _trace_lines(ts: TraceSystem, prefix: str) -> list[ReportLine]:
    lines = []
    for n in range(len(ts.p)):
        vals = ",".join(map(str, sorted(ts.values_at(n)))) or "-"
        lines.append(passed(f"{prefix}-{n:02d}",
                            f"p={ts.p[n]} values={vals}"))
    return lines


def _h_trace_from_thin(ns, sc, rng):
    psi = _functional(sc, ns.psi)
    sub = _any_tree(sc, ns.sub)
    ts = trace_from_thin(psi, hat_level_stages(psi, ns.maxlen), sub)
    return _trace_lines(ts, "trace")


def _h_trace_rescale(ns, sc, rng):
    psi = _functional(sc, ns.psi)
    sub = _any_tree(sc, ns.sub)
    ts = trace_from_thin(psi, hat_level_stages(psi, ns.maxlen), sub)
    target = tuple(range(ns.target)) if ns.target is not None else None
    return _trace_lines(rescale_trace(ts, target), "rescale")


def _h_trace_from_split(ns, sc, rng):
    psi = _functional(sc, ns.psi)
    t = _any_tree(sc, ns.tree)
    return _trace_lines(trace_from_bounded_splitting(psi, t, ns.m),
                        "tracesplit")


def _h_trace_dnr(ns, sc, rng):
    tables = [sc.functionals[k] for k in sorted(sc.functionals)]
    if not tables:
        raise ScenarioError("dnr needs at least one functional")
    return _trace_lines(dnr_trace(tables), "dnr")


# -- encode / suite ------------------------------------------------------------

def _h_encode_sd(ns, sc, rng):
    code = selfdelim_encode(ns.n, ns.m)
    check_id = f"sd-{ns.n}-{ns.m}"
    ok = (selfdelim_decode(code) == (ns.n, ns.m)
          and len(code) == 2 * ns.n.bit_length() + ns.m.bit_length())
    return [passed(check_id, code) if ok else failed(check_id, code)]


def _h_suite(ns, sc, rng):
    from .suite import run_suite
    return list(run_suite(ns.level, sc.seed,
                          sc.params.get("mutate", 0)).lines)


# -- parser ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ScenarioError(message)


def _common(p):
    p.add_argument("--scenario", metavar="FILE",
                   help="scenario file providing named objects")
    p.add_argument("--seed", type=int, default=None,
                   help="override the scenario seed")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="branchlab", description=__doc__)
    groups = top.add_subparsers(dest="group", required=True)

    def leaf(group, name, handler, **kwargs):
        p = group.add_parser(name, **kwargs)
        p.set_defaults(handler=handler, key=f"{group_name[id(group)]}:{name}")
        _common(p)
        return p

    group_name: dict[int, str] = {}

    def make_group(name):
        g = groups.add_parser(name).add_subparsers(dest="sub", required=True)
        group_name[id(g)] = name
        return g

    verify = make_group("verify")
    p = leaf(verify, "twocol", _h_verify_twocol)
    p.add_argument("--n", type=int, default=1)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--count", type=int, default=100)

    p = leaf(verify, "nice", _h_verify_nice)
    p.add_argument("--i", type=int, default=0)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--count", type=int, default=100)

    p = leaf(verify, "kappa", _h_verify_kappa)
    p.add_argument("--imax", type=int, default=6)
    p.add_argument("--nmax", type=int, default=10)

    run = make_group("run")
    p = leaf(run, "cupping", _h_run_cupping)
    p.add_argument("--n", type=int, default=2)

    p = leaf(run, "traceable", _h_run_traceable)
    p.add_argument("--horizon", type=int, default=6)

    p = leaf(run, "smc", _h_run_smc)
    p.add_argument("--psi", default="psi")
    p.add_argument("--dagger", default=None)
    p.add_argument("--oracle", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)

    p = leaf(run, "pi6", _h_run_pi6)
    p.add_argument("--phi", default="phi")
    p.add_argument("--stages", type=int, default=None)
    p.add_argument("--flen", type=int, default=None)
    p.add_argument("--oracle", type=int, default=None)

    check = make_group("check")
    p = leaf(check, "thin", _h_check_thin)
    p.add_argument("--tree", required=True)
    p.add_argument("--sub", required=True)

    p = leaf(check, "split", _h_check_split)
    p.add_argument("--psi", default="psi")
    p.add_argument("--tree", required=True)
    p.add_argument("--delayed", action="store_true")
    p.add_argument("--hat", action="store_true")

    p = leaf(check, "weaksplit", _h_check_weaksplit)
    p.add_argument("--psi", default="psi")
    p.add_argument("--phi", default="phi")
    p.add_argument("--budget", type=int, default=6)
    p.add_argument("--path", default="e")

    p = leaf(check, "theta", _h_check_theta)
    p.add_argument("--phi", default="phi")
    p.add_argument("--staging", required=True)
    p.add_argument("--flen", type=int, default=None)
    p.add_argument("--oracle", type=int, default=None)

    trace = make_group("trace")
    p = leaf(trace, "from-thin", _h_trace_from_thin)
    p.add_argument("--psi", default="psi")
    p.add_argument("--sub", required=True)
    p.add_argument("--maxlen", type=int, default=6)

    p = leaf(trace, "rescale", _h_trace_rescale)
    p.add_argument("--psi", default="psi")
    p.add_argument("--sub", required=True)
    p.add_argument("--maxlen", type=int, default=6)
    p.add_argument("--target", type=int, default=None)

    p = leaf(trace, "from-split", _h_trace_from_split)
    p.add_argument("--psi", default="psi")
    p.add_argument("--tree", required=True)
    p.add_argument("--m", type=int, default=2)

    leaf(trace, "dnr", _h_trace_dnr)

    encode = make_group("encode")
    p = leaf(encode, "sd", _h_encode_sd)
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)

    suite = make_group("suite")
    p = leaf(suite, "fast", _h_suite)
    p.set_defaults(level="fast")
    p = leaf(suite, "full", _h_suite)
    p.set_defaults(level="full")

    return top


_PARSER = None


def _parser():
    global _PARSER
    if _PARSER is None:
        _PARSER = build_parser()
    return _PARSER


def run_command(cmd, scenario: Scenario) -> Report:
    """Dispatch one command string (or token list) against a scenario."""
    tokens = shlex.split(cmd) if isinstance(cmd, str) else list(cmd)
    ns = _parser().parse_args(tokens)
    sc = scenario
    if getattr(ns, "scenario", None):
        with open(ns.scenario, "rb") as fh:
            sc = parse_scenario(fh.read())
    if ns.seed is not None:
        sc = scenario_with_seed(sc, ns.seed)
    rng = random.Random(f"{sc.seed}:{ns.key}")
    try:
        lines = ns.handler(ns, sc, rng)
    except (ValueError, RuntimeError) as e:
        lines = [errored(ns.key.replace(":", "-") + "-error", _clean(e))]
    return Report(sc.seed, tuple(lines))


def main(argv=None) -> int:
    args = sys.argv[1:] if argv is None else list(argv)
    try:
        report = run_command(args, empty_scenario())
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(report.render())
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
