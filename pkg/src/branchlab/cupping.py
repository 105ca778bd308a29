"""Witness search on the doubly indexed branching class.

Nodes of an abstract recursion tree carry a two-branching subtree of
the graded shape together with a colour vector.  Each node of level n
has one successor per (extension tree, colour) pair: extension trees
are the ways of growing every leaf by two of its shape successors,
enumerated per leaf in length-lex order with pairs in lexicographic
order, and colours run below ncol(n).  A stage filter knocks out nodes
whose trees already agree with an adversary's guarded computations,
and find_pi_member hunts down a node that survives the filter along
its whole ancestor chain by thinning the full graded tree one colour
index at a time.

Node labels are prefix-free codes of the successor index j: binary of
j+1 preceded by one zero per following bit.  These are pairwise
incompatible and length-lex increasing in j, and they stay short even
when the successor count runs into the billions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Iterator, Optional, Sequence

from .colorings import (Coloring, GRADED_SHAPE, bushy_level_strings,
                        is_compatible, ncol, extract_nice)
from .errors import BudgetError, ProtocolError, ShapeError
from .functionals import FunctionalTable, hat_eval
from .strings import check_bits, is_prefix, show_string, sort_lenlex
from .trees import (leaves, restrict_to_level, successors,
                    tree_uniform_level)


def gamma_code(j: int) -> str:
    """Prefix-free label of the natural j."""
    if j < 0:
        raise ShapeError("negative label index")
    b = bin(j + 1)[2:]
    return "0" * (len(b) - 1) + b


def gamma_split(s: str) -> tuple[int, str]:
    """Peel one label off the front; returns (index, remainder)."""
    z = 0
    while z < len(s) and s[z] == "0":
        z += 1
    if z == len(s) or len(s) < 2 * z + 1:
        raise ShapeError(f"{show_string(s)} does not start with a label")
    return int(s[z:2 * z + 1], 2) - 1, s[2 * z + 1:]


def gamma_decode(s: str) -> tuple[int, ...]:
    """Split a concatenation of labels into its index sequence."""
    out = []
    while s:
        j, s = gamma_split(s)
        out.append(j)
    return tuple(out)


def full_graded_tree(n: int) -> frozenset[str]:
    members: set[str] = set()
    for k in range(n + 1):
        members.update(bushy_level_strings(GRADED_SHAPE, k))
    return frozenset(members)


def _two_branching(t: frozenset[str]) -> bool:
    return is_compatible(GRADED_SHAPE, t, lambda k: 2)


@dataclass(frozen=True)
class PiStarNode:
    """A recursion-tree node: label, tree, and colour vector."""

    tau: str
    level: int
    t_tau: frozenset[str]
    psi_values: tuple[int, ...]

    def __post_init__(self):
        check_bits(self.tau)
        if len(gamma_decode(self.tau)) != self.level:
            raise ShapeError("label does not decode to the node level")
        if len(self.psi_values) != self.level:
            raise ShapeError("colour vector length must equal the level")
        for i, v in enumerate(self.psi_values):
            if not 0 <= v < ncol(i):
                raise ShapeError(f"colour {v} out of range at index {i}")
        if not _two_branching(self.t_tau):
            raise ShapeError("node tree is not two-branching in the shape")
        if tree_uniform_level(self.t_tau) != self.level:
            raise ShapeError("node tree level does not match the node level")


ROOT_NODE = PiStarNode("", 0, frozenset([""]), ())


def count_extension_trees(t: frozenset[str]) -> int:
    n = tree_uniform_level(t)
    if n is None:
        raise ShapeError("leaves sit at mixed levels")
    per_leaf = math.comb(GRADED_SHAPE.branching(n), 2)
    return per_leaf ** len(leaves(t))


def enumerate_extension_trees(t: frozenset[str]) -> Iterator[frozenset[str]]:
    """All one-level growths of t, two fresh successors per leaf.

    Trees come out in rank order: leaves length-lex, pair choices
    lexicographic, first leaf most significant.
    """
    lvs = sort_lenlex(leaves(t))
    pair_lists = [list(combinations(GRADED_SHAPE.successor_strings(lf), 2))
                  for lf in lvs]
    for choice in product(*pair_lists):
        grown = set(t)
        for a, b in choice:
            grown.add(a)
            grown.add(b)
        yield frozenset(grown)


def extension_rank(t: frozenset[str], grown: frozenset[str]) -> int:
    """Position of grown in the enumeration order of t's extensions."""
    n = tree_uniform_level(t)
    if n is None:
        raise ShapeError("leaves sit at mixed levels")
    big = GRADED_SHAPE.branching(n)
    radix = math.comb(big, 2)
    rank = 0
    for lf in sort_lenlex(leaves(t)):
        succ = GRADED_SHAPE.successor_strings(lf)
        kids = sorted(x for x in succ if x in grown)
        if len(kids) != 2:
            raise ShapeError(f"{show_string(lf)} does not grow by a pair")
        ia, ib = succ.index(kids[0]), succ.index(kids[1])
        rank = rank * radix + ia * big - ia * (ia + 1) // 2 + (ib - ia - 1)
    return rank


def pi_star_successors(node: PiStarNode,
                       max_successors: int = 100_000) -> tuple[PiStarNode, ...]:
    """All (tree, colour) successors of a node, in label order."""
    m = count_extension_trees(node.t_tau)
    cols = ncol(node.level)
    if m * cols > max_successors:
        raise BudgetError(f"{m * cols} successors exceed the budget")
    out = []
    j = 0
    for grown in enumerate_extension_trees(node.t_tau):
        for c in range(cols):
            out.append(PiStarNode(node.tau + gamma_code(j),
                                  node.level + 1, grown,
                                  node.psi_values + (c,)))
            j += 1
    return tuple(out)


def realize(n: int, f: Sequence[int], t: Iterable[str]) -> PiStarNode:
    """The unique node with tree t and colour vector f.

    Replays the successor labeling level by level, ranking each
    restriction of t among the extensions of the previous one.
    """
    t = frozenset(t)
    f = tuple(f)
    if len(f) != n:
        raise ShapeError("colour vector length must equal the level")
    for i, v in enumerate(f):
        if not 0 <= v < ncol(i):
            raise ShapeError(f"colour {v} out of range at index {i}")
    if not _two_branching(t) or tree_uniform_level(t) != n:
        raise ShapeError("tree is not two-branching of the stated level")
    tau = ""
    for k in range(n):
        below = restrict_to_level(t, k)
        grown = restrict_to_level(t, k + 1)
        j = ncol(k) * extension_rank(below, grown) + f[k]
        tau += gamma_code(j)
    return PiStarNode(tau, n, t, f)


@dataclass(frozen=True)
class AdversaryBundle:
    """A finite list of opposing functionals, one per colour index."""

    psi_i: tuple[FunctionalTable, ...]

    def __len__(self) -> int:
        return len(self.psi_i)


EMPTY_BUNDLE = AdversaryBundle(())


def bundle(tables: Iterable[FunctionalTable]) -> AdversaryBundle:
    return AdversaryBundle(tuple(tables))


def stage_filter(node: PiStarNode, adv: AdversaryBundle, s: int) -> bool:
    """True when no guarded adversary value pins the node's colours.

    A value at index i only counts when it is defined on some member
    of the node's tree, lies below ncol(i), and equals the node's
    colour there; out-of-range values are treated as non-convergent.
    """
    if node.level != s:
        raise ShapeError("stage must equal the node level")
    for i in range(min(s, len(adv.psi_i))):
        table = adv.psi_i[i]
        memo: dict = {}
        for sigma in node.t_tau:
            v = hat_eval(table, sigma, i, memo)
            if v is not None and v < ncol(i) and v == node.psi_values[i]:
                return False
    return True


def adversary_coloring(adv: AdversaryBundle, i: int,
                       leaf_strings: Iterable[str]) -> Coloring:
    """Colour leaves by the i-th guarded value where it lands in range."""
    assignment: dict[str, int] = {}
    if i < len(adv.psi_i):
        table = adv.psi_i[i]
        memo: dict = {}
        for lf in leaf_strings:
            v = hat_eval(table, lf, i, memo)
            if v is not None and v < ncol(i):
                assignment[lf] = v
    return Coloring(assignment, ncol(i))


def ancestor_chain(node: PiStarNode) -> tuple[PiStarNode, ...]:
    """The node's ancestors from the root up to the node itself."""
    return tuple(realize(k, node.psi_values[:k],
                         restrict_to_level(node.t_tau, k))
                 for k in range(node.level + 1))


def pi_membership_violation(node: PiStarNode,
                            adv: AdversaryBundle) -> Optional[str]:
    for anc in ancestor_chain(node):
        if not stage_filter(anc, adv, anc.level):
            return (f"stage {anc.level} filter rejects "
                    f"{show_string(anc.tau)}")
    return None


def find_pi_member(n: int, adv: AdversaryBundle,
                   max_level: int = 4) -> PiStarNode:
    """A level-n node surviving the stage filter along its whole chain.

    Thins the full graded tree once per colour index: leaves are
    coloured by the i-th guarded adversary values, one colour d_i is
    extracted as unrealized, and the surviving subtree moves on.  The
    final tree is two-branching and realize turns it into a node.
    """
    if n > max_level:
        raise BudgetError(f"level {n} exceeds the search budget")
    t = full_graded_tree(n)
    ds = []
    for i in range(n):
        c = adversary_coloring(adv, i, leaves(t))
        d, t = extract_nice(GRADED_SHAPE, i, t, c)
        ds.append(d)
    node = realize(n, ds, t)
    bad = pi_membership_violation(node, adv)
    if bad is not None:
        raise ProtocolError(f"witness self-check failed: {bad}")
    return node


def materialize_pi_star(n: int,
                        max_nodes: int = 100_000) -> tuple[PiStarNode, ...]:
    """Every level-n node, by exhaustive recursion.  Small n only."""
    frontier = [ROOT_NODE]
    for _ in range(n):
        nxt: list[PiStarNode] = []
        for node in frontier:
            nxt.extend(pi_star_successors(node, max_nodes))
            if len(nxt) > max_nodes:
                raise BudgetError("node frontier exceeds the budget")
        frontier = nxt
    return tuple(frontier)


def pi_survivors(n: int, adv: AdversaryBundle,
                 max_nodes: int = 100_000) -> tuple[PiStarNode, ...]:
    """Level-n nodes passing the stage filter at every level so far."""
    frontier = [ROOT_NODE]
    for s in range(n):
        nxt: list[PiStarNode] = []
        for node in frontier:
            if stage_filter(node, adv, s):
                nxt.extend(pi_star_successors(node, max_nodes))
            if len(nxt) > max_nodes:
                raise BudgetError("node frontier exceeds the budget")
        frontier = nxt
    return tuple(node for node in frontier if stage_filter(node, adv, n))


def join_code(t: Iterable[str], b: str) -> str:
    """Walk b through a two-branching tree; 0 goes low, 1 goes high."""
    t = frozenset(t)
    check_bits(b)
    roots = [m for m in t
             if not any(is_prefix(o, m) for o in t if o != m)]
    if len(roots) != 1:
        raise ShapeError("walk needs a single root")
    cur = roots[0]
    for bit in b:
        succ = successors(t, cur)
        if len(succ) != 2:
            raise ShapeError(f"no branching below {show_string(cur)}")
        cur = succ[1] if bit == "1" else succ[0]
    return cur


def join_decode(t: Iterable[str], sigma: str) -> str:
    """Recover the bit string whose walk through t ends at sigma."""
    t = frozenset(t)
    roots = [m for m in t
             if not any(is_prefix(o, m) for o in t if o != m)]
    if len(roots) != 1:
        raise ShapeError("walk needs a single root")
    cur = roots[0]
    bits = []
    while cur != sigma:
        succ = successors(t, cur)
        if len(succ) != 2:
            raise ShapeError(f"no branching below {show_string(cur)}")
        if is_prefix(succ[1], sigma):
            bits.append("1")
            cur = succ[1]
        elif is_prefix(succ[0], sigma):
            bits.append("0")
            cur = succ[0]
        else:
            raise ShapeError(f"{show_string(sigma)} is off the walk")
    return "".join(bits)
