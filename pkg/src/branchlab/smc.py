"""Finite-extension cover driver and the packing combinatorics behind it.

A two-place table phi names, for each oracle prefix tau, a tree
T(tau) of candidate strings.  The omega predicate certifies that
T(tau) looks healthy up to a level, pi collects the prefixes whose
certified level jumps by two over everything seen before, and the
selection routine packs pairwise incompatible picks for a prefix-free
family, paying for each settled member out of an exact budget r_m.
The driver consumes the resulting trees one stage at a time.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import BudgetError, MemberError, ProtocolError, ShapeError
from .functionals import (FunctionalTable, _require_two_branching, eval_at,
                          is_splitting_pair, is_splitting_tree, min_steps,
                          pullback_tree)
from .strings import (check_bits, compatible, is_prefix, is_proper_prefix,
                      lenlex_key, show_string, sort_lenlex, string_to_nat)
from .trees import (StagedTree, branching_stats, is_prefix_free, leaves,
                    level_of, level_map, max_level, successors)


# -- oracle-indexed trees --------------------------------------------------

@dataclass(frozen=True)
class OmegaContext:
    """A two-place table, a finite majorant, and an oracle stand-in."""

    phi: FunctionalTable
    f: tuple[int, ...]
    a_prefix: str = ""

    def __post_init__(self):
        check_bits(self.a_prefix)
        if any(b <= a for a, b in zip(self.f, self.f[1:])):
            raise ShapeError("majorant must be strictly increasing")


@lru_cache(maxsize=None)
def t_of(phi: FunctionalTable, tau: str) -> frozenset[str]:
    """The tree named by tau: strings phi values 1 within |tau| steps.

    A string only counts once every shorter string has settled, so the
    result is cut at the first length where some value is still out.
    The tree must branch at most two ways and root at the empty
    string; anything else is a malformed table.
    """
    members = []
    length = 0
    while True:
        layer = []
        for bits in product("01", repeat=length):
            s = "".join(bits)
            steps = min_steps(phi, tau, string_to_nat(s))
            if steps is None or steps > len(tau):
                layer = None
                break
            if eval_at(phi, tau, string_to_nat(s)) == 1:
                layer.append(s)
        if layer is None:
            break
        members.extend(layer)
        length += 1
    t = frozenset(members)
    for m in t:
        if level_of(t, m) == 0 and m != "":
            raise ShapeError(f"level-0 member {show_string(m)} of the tree "
                             f"at {show_string(tau)} is not the empty string")
        if len(successors(t, m)) > 2:
            raise ShapeError(f"{show_string(m)} has more than two successors "
                             f"in the tree at {show_string(tau)}")
    return t


def is_a_oplus_compatible(tau: str, a_prefix: str) -> bool:
    """Even positions of tau must copy the oracle prefix."""
    check_bits(tau)
    check_bits(a_prefix)
    if len(tau) > 2 * len(a_prefix):
        raise MemberError(f"need {-(-len(tau) // 2)} oracle bits, "
                          f"have {len(a_prefix)}")
    return all(tau[2 * n] == a_prefix[n] for n in range(-(-len(tau) // 2)))


def oplus_tree(a_prefix: str) -> frozenset[str]:
    """All even-length strings compatible with the oracle prefix."""
    check_bits(a_prefix)
    members = [""]
    layer = [""]
    for bit in a_prefix:
        layer = [s + bit + b for s in layer for b in "01"]
        members.extend(layer)
    return frozenset(members)


def compute_majorant(phi: FunctionalTable, a_prefix: str,
                     depth: int) -> tuple[int, ...]:
    """Once the widths g(n) of the oracle's own tree are known, pad
    them into a strictly increasing bound: f(n) = max g(k<=n) + n."""
    t = t_of(phi, a_prefix)
    if not t or max_level(t) < depth:
        raise ShapeError(f"tree at {show_string(a_prefix)} does not "
                         f"reach level {depth}")
    buckets = level_map(t)
    g = [max(len(s) for s in buckets[n]) for n in range(depth + 1)]
    out = []
    for n in range(depth + 1):
        out.append(max(g[:n + 1]) + n)
    return tuple(out)


def omega(ctx: OmegaContext, tau: str, n: int) -> bool:
    """Certificate that the tree at tau is trustworthy up to level n.

    Levels must reach n, branch exactly two ways below n, and every
    level up to n must stay within the majorant.  Levels beyond the
    finite majorant can never be certified.
    """
    if n == 0:
        return True
    if n >= len(ctx.f):
        return False
    t = t_of(ctx.phi, tau)
    if not t or max_level(t) < n:
        return False
    if branching_stats(t)[2] < n:
        return False
    buckets = level_map(t)
    return all(max(len(s) for s in buckets[k]) <= ctx.f[k]
               for k in range(n + 1))


@lru_cache(maxsize=None)
def omega_level(ctx: OmegaContext, tau: str) -> int:
    for n in range(len(ctx.f) - 1, 0, -1):
        if omega(ctx, tau, n):
            return n
    return 0


def enumerate_pi(ctx: OmegaContext, max_stage: int) -> StagedTree:
    """Stage s admits the length-s strings whose certified level beats
    every admitted prefix by two, with the new levels long enough."""
    pi = [""]
    snaps = [frozenset(pi)]
    for s in range(1, max_stage + 1):
        for bits in product("01", repeat=s):
            tau = "".join(bits)
            n = max(omega_level(ctx, p) for p in pi
                    if is_proper_prefix(p, tau))
            if n + 2 >= len(ctx.f):
                continue
            t = t_of(ctx.phi, tau)
            floor = ctx.f[n + 2]
            buckets = level_map(t) if t else {}
            for nn in range(n + 2, len(ctx.f)):
                if omega(ctx, tau, nn) and all(len(s2) >= floor
                                               for s2 in buckets[nn]):
                    pi.append(tau)
                    break
        snaps.append(frozenset(pi))
    return StagedTree(tuple(snaps))


# -- packing pairwise incompatible picks -----------------------------------

@dataclass(frozen=True)
class SelectionResult:
    """Settled pairs per family member, the pool each drew from, and
    the running budget."""

    sigma_pairs: dict[int, tuple[str, str]]
    psi_pool: dict[int, frozenset[str]]
    r: tuple[Fraction, ...] = ()


def _state_dump(settled, pools, m):
    return (f"at step {m}: settled={sorted(settled.items())} "
            f"pools={ {i: sorted(p) for i, p in sorted(pools.items())} }")


def select_extensions(ctx: OmegaContext, tau: str,
                      lambda_nodes: Sequence[tuple[str, int]],
                      sigma: str) -> SelectionResult:
    """Pick two certified-level picks per family member, all pairwise
    incompatible, above a common base.

    lambda_nodes lists (tau_i, d_i) with d_i >= 1 the depth of tau_i
    below tau in the enumeration order; members of depth m settle at
    step m out of pools that deepen two tree levels per step.  Settled
    picks knock at most one string out of each pool, and the exact
    budget r_m = sum 2^-m' |settled at m'| must never pass 1.
    """
    if not lambda_nodes:
        raise ShapeError("empty family")
    names = [p[0] for p in lambda_nodes]
    if not is_prefix_free(names) or len(set(names)) != len(names):
        raise ShapeError("family must be prefix-free")
    t_tau = t_of(ctx.phi, tau)
    n_tau = omega_level(ctx, tau)
    # the empty base is always admissible at certificate level 0, even
    # when the tree at tau has not yet produced anything
    if not (sigma == "" and n_tau == 0):
        if sigma not in t_tau or level_of(t_tau, sigma) != n_tau:
            raise ShapeError(f"base {show_string(sigma)} is not at the "
                             f"certified level {n_tau} of the tree at "
                             f"{show_string(tau)}")
    trees: dict[int, frozenset[str]] = {}
    n_i: dict[int, int] = {}
    for i, (tau_i, d) in enumerate(lambda_nodes):
        if d < 1 or not is_proper_prefix(tau, tau_i):
            raise ShapeError(f"{show_string(tau_i)} must properly extend "
                             f"{show_string(tau)} at depth >= 1")
        trees[i] = t_of(ctx.phi, tau_i)
        n_i[i] = omega_level(ctx, tau_i)
        if n_i[i] < n_tau + 2 * d:
            raise ShapeError(f"certified level {n_i[i]} of "
                             f"{show_string(tau_i)} falls short of the "
                             f"depth-{d} gap")

    settled: dict[int, tuple[str, str]] = {}
    settled_pool: dict[int, frozenset[str]] = {}
    pools: dict[int, list[str]] = {i: [sigma] for i in range(len(names))}
    r = Fraction(0)
    r_seq = []
    depth = max(d for _, d in lambda_nodes)

    def prune(pick: str, m: int) -> None:
        for i, pool in pools.items():
            hits = [p for p in pool if compatible(p, pick)]
            if len(hits) > 1:
                raise ShapeError(
                    f"{len(hits)} pool strings compatible with "
                    f"{show_string(pick)}; the length discipline is broken")
            if hits:
                pool.remove(hits[0])

    for m in range(1, depth + 1):
        level = n_tau + 2 * m
        for i, pool in pools.items():
            grown = []
            for psi in pool:
                ext = sort_lenlex(x for x in trees[i]
                                  if level_of(trees[i], x) == level
                                  and is_prefix(psi, x))
                if len(ext) != 4:
                    raise ShapeError(
                        f"{show_string(psi)} has {len(ext)} level-{level} "
                        f"extensions in the tree at {show_string(names[i])}; "
                        "need exactly four")
                grown.extend(ext)
            pools[i] = grown
        stars = sorted((i for i, (_, d) in enumerate(lambda_nodes) if d == m),
                       key=lambda i: lenlex_key(names[i]))
        r += Fraction(len(stars), 1 << m)
        if r > 1:
            raise ShapeError(f"budget r_{m} = {r} exceeds 1: the family is "
                             "too crowded to be thin")
        for i in stars:
            cands = sort_lenlex(
                x for x in trees[i]
                if level_of(trees[i], x) == n_i[i]
                and any(is_prefix(p, x) for p in pools[i]))
            first = next(iter(cands), None)
            second = next((x for x in cands
                           if first is not None
                           and not compatible(x, first)), None)
            if first is None or second is None:
                raise ProtocolError("pool exhausted picking for "
                                    f"{show_string(names[i])}; "
                                    + _state_dump(settled, pools, m))
            settled[i] = (first, second)
            settled_pool[i] = frozenset(pools.pop(i))
            prune(first, m)
            prune(second, m)
        floor = (1 - r) * (1 << (m + 1))
        for i, pool in pools.items():
            if len(pool) < floor:
                raise ProtocolError(
                    f"pool for {show_string(names[i])} fell to {len(pool)} "
                    f"below the floor {floor}; " + _state_dump(settled,
                                                               pools, m))
        r_seq.append(r)

    picks = [s for pair in settled.values() for s in pair]
    for a_i, a in enumerate(picks):
        for b in picks[a_i + 1:]:
            if compatible(a, b):
                raise ProtocolError(f"selected {show_string(a)} and "
                                    f"{show_string(b)} are compatible; "
                                    + _state_dump(settled, pools, depth))
    return SelectionResult(dict(sorted(settled.items())),
                           dict(sorted(settled_pool.items())),
                           tuple(r_seq))


# -- enumerating the cover tree -------------------------------------------

@dataclass(frozen=True)
class ThetaAxioms:
    """String-to-string axioms read off the cover tree's leaves.

    Nested sources must name nested targets, which is what makes the
    readback single-valued along any path.
    """

    axioms: dict[str, str]

    def __post_init__(self):
        for src, dst in self.axioms.items():
            check_bits(src)
            check_bits(dst)
        for a in self.axioms:
            for b in self.axioms:
                if is_proper_prefix(a, b) and not is_prefix(
                        self.axioms[a], self.axioms[b]):
                    raise ShapeError(
                        f"axioms at {show_string(a)} and {show_string(b)} "
                        "disagree along a path")


def theta_decode(theta: ThetaAxioms, c: str) -> tuple[str, ...]:
    """The chain of targets named along the prefixes of c."""
    hits = sorted((src for src in theta.axioms if is_prefix(src, c)), key=len)
    return tuple(theta.axioms[src] for src in hits)


def build_tprime(ctx: OmegaContext, pistar_stages: StagedTree,
                 succ_codes: dict[str, frozenset[str]],
                 ) -> tuple[dict[str, frozenset[str]], ThetaAxioms]:
    """Grow one packed tree per enumerated prefix, plus the readback.

    Each stage hangs the new prefixes' picks under every leaf of the
    parent's tree; the readback theta names the prefix that owns each
    new leaf.
    """
    stages = pistar_stages.stages
    if not stages or stages[0] != frozenset({""}):
        raise ShapeError("enumeration must start from the empty string")
    final = pistar_stages.final
    for tau in final:
        if succ_codes.get(tau) != frozenset(successors(final, tau)):
            raise ShapeError(f"successor code for {show_string(tau)} does "
                             "not match the enumeration")
    if set(succ_codes) != set(final):
        raise ShapeError("successor codes name strings outside the "
                         "enumeration")
    pi_final = enumerate_pi(ctx, max(len(m) for m in final)).final
    for tau in final:
        if tau not in pi_final:
            raise ShapeError(f"{show_string(tau)} was never admitted by "
                             "the ambient enumeration")

    tprime: dict[str, frozenset[str]] = {"": frozenset({""})}
    theta: dict[str, str] = {}
    for s in range(1, len(stages)):
        new = sort_lenlex(stages[s] - stages[s - 1])
        if not new:
            continue
        owners = {x: max((p for p in stages[s - 1] if is_proper_prefix(p, x)),
                         key=len, default=None) for x in new}
        tau = owners[new[0]]
        if tau is None or any(o != tau for o in owners.values()):
            raise ShapeError(f"stage {s} must extend exactly one leaf")
        if successors(stages[s - 1], tau):
            raise ShapeError(f"stage {s} extends {show_string(tau)} which "
                             "is not a leaf")
        for a_i, a in enumerate(new):
            for b in new[a_i + 1:]:
                if compatible(a, b):
                    raise ShapeError(f"stage {s} additions {show_string(a)} "
                                     f"and {show_string(b)} are compatible")
        base = tprime[tau]
        depths = [level_of(pi_final, x) - level_of(pi_final, tau)
                  for x in new]
        nodes = list(zip(new, depths))
        grown: dict[str, set[str]] = {x: set(base) for x in new}
        for leaf in sort_lenlex(leaves(base)):
            res = select_extensions(ctx, tau, nodes, leaf)
            for idx, x in enumerate(new):
                a, b = res.sigma_pairs[idx]
                grown[x].update((a, b))
                for pick in (a, b):
                    if pick in theta:
                        raise ProtocolError(f"{show_string(pick)} selected "
                                            "twice")
                    theta[pick] = x
        m1 = level_of(final, new[0])
        for x in new:
            t_new = frozenset(grown[x])
            if branching_stats(t_new)[2] < m1:
                raise ProtocolError(f"tree for {show_string(x)} is not "
                                    f"two-branching below level {m1}")
            t_x = t_of(ctx.phi, x)
            n_x = omega_level(ctx, x)
            for leaf in leaves(t_new):
                if level_of(t_x, leaf) != n_x:
                    raise ProtocolError(f"leaf {show_string(leaf)} of the "
                                        f"tree for {show_string(x)} misses "
                                        f"the certified level {n_x}")
            tprime[x] = t_new
    return tprime, ThetaAxioms(theta)


# -- one driver stage -------------------------------------------------------

class DriverResult(NamedTuple):
    b_next: str
    t_next: frozenset[str]
    branch: str


def _extensions(t: frozenset[str], tau: str) -> list[str]:
    return [x for x in t if is_prefix(tau, x)]


def smc_driver_stage(state: tuple[str, Iterable[str]],
                     psi_s: FunctionalTable, dagger_budget: int,
                     dagger_subtree: Optional[Iterable[str]] = None,
                     ) -> DriverResult:
    """Advance the finite-extension construction by one stage.

    First hunt for a base above which nothing splits the functional
    (only bases with genuinely two incomparable extensions count as
    witnesses); failing that, grow a two-branching splitting subtree
    greedily, refine it through the supplied readback tree if given,
    and move to its least leaf.  Guarded outputs are used throughout.
    Each leaf split spends one unit of budget.
    """
    b_s, t_s = state
    t_s = frozenset(t_s)
    _require_two_branching(t_s, "driver tree")
    if b_s not in t_s:
        raise MemberError(f"base {show_string(b_s)} is not on the tree")

    for tau in sort_lenlex(_extensions(t_s, b_s)):
        above = _extensions(t_s, tau)
        pairs = [(a, b) for a_i, a in enumerate(above)
                 for b in above[a_i + 1:] if not compatible(a, b)]
        if not pairs:
            continue
        if not any(is_splitting_pair(psi_s, a, b, hat=True)
                   for a, b in pairs):
            ups = sort_lenlex(x for x in t_s if is_proper_prefix(tau, x))
            return DriverResult(ups[0] if ups else tau, t_s, "no-splittings")

    ops = 0
    built = {b_s}
    frontier = [b_s]
    while frontier:
        frontier.sort(key=lenlex_key)
        x = frontier.pop(0)
        exts = sort_lenlex(_extensions(t_s, x))
        picked = None
        for a in exts:
            for b in exts:
                if (not compatible(a, b)
                        and is_splitting_pair(psi_s, a, b, hat=True)):
                    picked = (a, b)
                    break
            if picked:
                break
        if picked is None:
            continue
        ops += 1
        if ops > dagger_budget:
            raise BudgetError(f"needed more than {dagger_budget} splits")
        built.update(picked)
        frontier.extend(picked)
    t_built = frozenset(built)
    if not is_splitting_tree(psi_s, t_built, hat=True):
        raise ProtocolError("greedy subtree fails its own splitting check")
    if dagger_subtree is not None:
        t_next = pullback_tree(psi_s, t_built, frozenset(dagger_subtree),
                               hat=True)
    else:
        t_next = t_built
    b_next = min(leaves(t_next), key=lenlex_key)
    return DriverResult(b_next, t_next, "splitting-subtree")
