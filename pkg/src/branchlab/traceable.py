"""Stagewise pruning construction with a tuple trace.

A binary tree grows one length per stage.  Certain strings are nodes
and carry modules: a C(i, n) module waits for the i-th adversary
functional to converge at argument n somewhere above its node, then
reshapes the tree below the node around two incompatible witnesses
and enumerates the computed value into the trace; a P(i) module
watches the i-th functional's output at the empty oracle and kills
the successor branch that output follows.  Terminal strings never
grow again.  The surviving frontier stays nonempty, avoids every
total adversary output, and the trace stays small: one value per
node generation.

Stage numbering: a state with stage S has completed S growth steps,
so strings present have length at most S.  The next run_stage call
works with search length S and step bound S, then grows the tree to
length S+1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import product
from typing import Optional

from .cupping import AdversaryBundle, EMPTY_BUNDLE
from .errors import ProtocolError
from .functionals import EMPTY_TABLE, FunctionalTable, applicable
from .strings import bits_of_values, compatible, is_prefix, lenlex_key
from .trees import sort_lenlex


@dataclass(frozen=True)
class ModuleId:
    """C(i, n) waits for a convergence; P(i) guards a successor pair."""

    kind: str
    i: int
    n: int = 0

    def __post_init__(self):
        if self.kind not in ("C", "P"):
            raise ProtocolError(f"unknown module kind {self.kind!r}")
        if self.i < 0 or self.n < 0:
            raise ProtocolError("negative module index")

    def __str__(self) -> str:
        if self.kind == "C":
            return f"C({self.i},{self.n})"
        return f"P({self.i})"


def c_module(i: int, n: int) -> ModuleId:
    return ModuleId("C", i, n)


def p_module(i: int) -> ModuleId:
    return ModuleId("P", i)


def _module_key(m: ModuleId):
    # C modules in (i, n) order, then the P module
    return (0, m.i, m.n) if m.kind == "C" else (1, m.i, 0)


def module_set(level: int) -> frozenset[ModuleId]:
    mods = {c_module(j, level - j) for j in range(level + 1)}
    mods.add(p_module(level))
    return frozenset(mods)


@dataclass(frozen=True)
class NodeInfo:
    level: int
    modules: frozenset[ModuleId]
    generation: int
    declared_stage: int


@dataclass(frozen=True)
class ConstructionState:
    stage: int
    pi: frozenset[str]
    nodes: dict[str, NodeInfo]
    terminal: frozenset[str]
    tuples: frozenset[tuple[int, int, int]]
    acted: frozenset[tuple[str, ModuleId, int]]
    next_generation: int
    declared_log: tuple[tuple[int, str, int, int], ...]  # (level, tau, gen, stage)
    tuple_log: tuple[tuple[int, int, int, str, int, int], ...] = ()
    # tuple_log rows: (i, n, value, node, node level, node generation)


def init_state() -> ConstructionState:
    root = NodeInfo(0, module_set(0), 1, 0)
    return ConstructionState(
        stage=0,
        pi=frozenset([""]),
        nodes={"": root},
        terminal=frozenset(),
        tuples=frozenset(),
        acted=frozenset(),
        next_generation=2,
        declared_log=((0, "", 1, 0),),
    )


def is_terminal(st: ConstructionState, s: str) -> bool:
    return any(s.startswith(m) for m in st.terminal)


def successor_nodes(st: ConstructionState, tau: str) -> tuple[str, ...]:
    """Minimal node strings properly extending tau."""
    above = [x for x in st.nodes if x != tau and x.startswith(tau)]
    return sort_lenlex([x for x in above
                        if not any(x != o and x.startswith(o)
                                   for o in above)])


def frontier(st: ConstructionState, length: Optional[int] = None) -> tuple[str, ...]:
    """Non-terminal strings of the given length (default: the stage)."""
    n = st.stage if length is None else length
    return tuple("".join(bits) for bits in product("01", repeat=n)
                 if not is_terminal(st, "".join(bits)))


def _adversary_table(adv: AdversaryBundle, i: int) -> FunctionalTable:
    return adv.psi_i[i] if i < len(adv.psi_i) else EMPTY_TABLE


def bounded_value(f: FunctionalTable, tau: str, n: int,
                  steps: int) -> Optional[int]:
    """Value of the quickest applicable axiom within the step budget."""
    axs = [ax for ax in applicable(f, tau, n) if ax[3] <= steps]
    if not axs:
        return None
    return min(axs, key=lambda ax: (ax[3], len(ax[0]), ax[0]))[2]


def oracle_output_bits(f: FunctionalTable, steps: int) -> str:
    """Argwise output at the empty oracle, truncated at the first
    missing or non-bit value."""
    vals = []
    k = 0
    while True:
        v = bounded_value(f, "", k, steps)
        if v is None:
            break
        vals.append(v)
        k += 1
    return bits_of_values(vals)


def _check_allocated(st: ConstructionState, tau: str, mid: ModuleId) -> NodeInfo:
    info = st.nodes.get(tau)
    if info is None or mid not in info.modules:
        raise ProtocolError(f"{mid} is not allocated to {tau!r}")
    if (tau, mid, info.generation) in st.acted:
        raise ProtocolError(f"{mid} at {tau!r} has already acted")
    return info


def _nearest_node_level(nodes: dict[str, NodeInfo], s: str) -> int:
    for k in range(len(s) - 1, -1, -1):
        info = nodes.get(s[:k])
        if info is not None:
            return info.level
    raise ProtocolError(f"no node below {s!r}")


def _declare(nodes: dict[str, NodeInfo], log: list, tau: str, level: int,
             gen: int, stage: int) -> None:
    nodes[tau] = NodeInfo(level, module_set(level), gen, stage)
    log.append((level, tau, gen, stage))


def act_c_module(st: ConstructionState, tau: str, mid: ModuleId,
                 adv: AdversaryBundle) -> Optional[ConstructionState]:
    """Fire a C module if its convergence search succeeds.

    The search scans pi above the node, length-lex, for a non-terminal
    tau' where the adversary converges within the stage's step budget
    and which still has two incompatible non-terminal extensions of
    the search length.  Acting reshapes everything below the node.
    """
    info = _check_allocated(st, tau, mid)
    if mid.kind != "C":
        raise ProtocolError("expected a C module")
    table = _adversary_table(adv, mid.i)
    s = st.stage
    found = None
    for cand in sort_lenlex(x for x in st.pi if x.startswith(tau)):
        if len(cand) >= s or is_terminal(st, cand):
            continue
        axs = [ax for ax in applicable(table, cand, mid.n) if ax[3] <= s]
        if not axs:
            continue
        ext = [cand + "".join(b) for b in product("01", repeat=s - len(cand))]
        live = [e for e in ext if not is_terminal(st, e)]
        if len(live) >= 2:
            found = (cand, sort_lenlex(live)[:2])
            break
    if found is None:
        return None
    cand, (t0, t1) = found
    value = bounded_value(table, cand, mid.n, s)
    assert value is not None  # the search required a qualifying axiom

    nodes = {x: nf for x, nf in st.nodes.items()
             if not (x != tau and x.startswith(tau))}
    newly_terminal = {p for p in st.pi
                      if p.startswith(tau)
                      and not compatible(p, t0) and not compatible(p, t1)}
    log: list = []
    gen = st.next_generation
    j = info.level + 1
    _declare(nodes, log, t0, j, gen, s + 1)
    _declare(nodes, log, t1, j, gen + 1, s + 1)
    return replace(
        st,
        nodes=nodes,
        terminal=st.terminal | newly_terminal,
        tuples=st.tuples | {(mid.i, mid.n, value)},
        acted=st.acted | {(tau, mid, info.generation)},
        next_generation=gen + 2,
        declared_log=st.declared_log + tuple(log),
        tuple_log=st.tuple_log + ((mid.i, mid.n, value, tau, info.level,
                                   info.generation),),
    )


def act_p_module(st: ConstructionState, tau: str, mid: ModuleId,
                 adv: AdversaryBundle) -> Optional[ConstructionState]:
    """Fire a P module if the adversary's output follows a successor.

    The module waits two stages after its node was declared, needs
    exactly two successor nodes, and when the output at the empty
    oracle extends one of them it terminates that whole side.
    """
    info = _check_allocated(st, tau, mid)
    if mid.kind != "P":
        raise ProtocolError("expected a P module")
    s = st.stage
    if s + 1 < info.declared_stage + 2:
        return None
    succ = successor_nodes(st, tau)
    if len(succ) != 2:
        return None
    out = oracle_output_bits(_adversary_table(adv, mid.i), s)
    if is_prefix(succ[0], out):
        keep = succ[1]
    elif is_prefix(succ[1], out):
        keep = succ[0]
    else:
        return None
    doomed = {p for p in st.pi
              if p.startswith(tau) and not compatible(p, keep)}
    nodes = {x: nf for x, nf in st.nodes.items() if x not in doomed}
    return replace(
        st,
        nodes=nodes,
        terminal=st.terminal | doomed,
        acted=st.acted | {(tau, mid, info.generation)},
    )


def run_stage(st: ConstructionState,
              adv: AdversaryBundle = EMPTY_BUNDLE) -> ConstructionState:
    """One full stage: run modules node by node, then grow the tree."""
    s = st.stage
    snapshot = sorted(((nf.level, lenlex_key(tau), tau, nf.generation)
                       for tau, nf in st.nodes.items()
                       if nf.declared_stage <= s))
    cur = st
    for _, _, tau, gen in snapshot:
        nf = cur.nodes.get(tau)
        if nf is None or nf.generation != gen:
            continue  # reshaped away earlier in this stage
        for mid in sorted(nf.modules, key=_module_key):
            if (tau, mid, gen) in cur.acted:
                continue
            if mid.kind == "C":
                res = act_c_module(cur, tau, mid, adv)
            else:
                res = act_p_module(cur, tau, mid, adv)
            if res is not None:
                cur = res
                break  # one action per node per stage
    nodes = dict(cur.nodes)
    pi = set(cur.pi)
    log: list = []
    gen = cur.next_generation
    for bits in product("01", repeat=s + 1):
        tau = "".join(bits)
        if is_terminal(cur, tau):
            continue
        pi.add(tau)
        level = _nearest_node_level(nodes, tau) + 1
        _declare(nodes, log, tau, level, gen, s + 1)
        gen += 1
    return replace(
        cur,
        stage=s + 1,
        pi=frozenset(pi),
        nodes=nodes,
        next_generation=gen,
        declared_log=cur.declared_log + tuple(log),
    )


def run_to_horizon(adv: AdversaryBundle, horizon: int,
                   start: Optional[ConstructionState] = None) -> ConstructionState:
    st = init_state() if start is None else start
    while st.stage < horizon:
        st = run_stage(st, adv)
    return st


@dataclass(frozen=True)
class TraceReport:
    per_i: dict[int, dict[int, frozenset[int]]]


def extract_trace(st: ConstructionState) -> TraceReport:
    per_i: dict[int, dict[int, set[int]]] = {}
    for i, n, d in st.tuples:
        per_i.setdefault(i, {}).setdefault(n, set()).add(d)
    return TraceReport({i: {n: frozenset(ds) for n, ds in by_n.items()}
                        for i, by_n in per_i.items()})


def declared_counts(st: ConstructionState) -> dict[int, int]:
    out: dict[int, int] = {}
    for level, _, _, _ in st.declared_log:
        out[level] = out.get(level, 0) + 1
    return out


def node_count_bound(n: int) -> int:
    return (1 << n) * math.factorial(n + 1)


def trace_bound_pair(i: int, n: int) -> tuple[int, int]:
    """Nominal and safe ceilings for the number of traced values."""
    return ((1 << (n + i)) * math.factorial(n + i),
            (1 << (n + i)) * math.factorial(n + i + 1))


def final_node_violation(st: ConstructionState,
                         adv: AdversaryBundle) -> Optional[str]:
    """Check the horizon conditions on every node short of the frontier.

    Each such node must keep a surviving successor node, no successor
    may sit inside the adversary output watched by the node's P
    module, and every live frontier string above the node must pass
    through a successor.  Only meaningful once the adversary has no
    convergences pending.
    """
    horizon = st.stage
    for tau, info in sorted(st.nodes.items(), key=lambda kv: lenlex_key(kv[0])):
        if len(tau) >= horizon or is_terminal(st, tau):
            continue
        succ = successor_nodes(st, tau)
        if not succ:
            return f"node {tau!r} has no surviving successor node"
        out = oracle_output_bits(_adversary_table(adv, info.level), horizon)
        for x in succ:
            if is_prefix(x, out):
                return f"successor {x!r} of {tau!r} sits inside the output"
        for leaf in frontier(st, horizon):
            if leaf.startswith(tau) and not any(
                    leaf.startswith(x) for x in succ):
                return f"frontier string {leaf!r} misses the successors of {tau!r}"
    return None


def verify_final_nodes(st: ConstructionState, adv: AdversaryBundle) -> bool:
    return final_node_violation(st, adv) is None
