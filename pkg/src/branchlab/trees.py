"""Finite trees of binary strings.

A tree is a plain frozenset of members; nothing requires the root or
downward closure to be present.  The level of a member is the number
of its proper initial segments inside the tree, successors are minimal
proper extensions inside the tree, and leaves are members with no
proper extension.  All of that is computed on demand rather than
stored, so any set of strings can be treated as a tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import MemberError, ShapeError
from .strings import check_bits, is_proper_prefix, lenlex_key, sort_lenlex

FiniteTree = frozenset


def as_tree(members: Iterable[str]) -> frozenset[str]:
    t = frozenset(members)
    for m in t:
        check_bits(m)
    return t


def level_of(t: Iterable[str], tau: str) -> int:
    """Number of proper initial segments of tau inside t."""
    t = frozenset(t)
    if tau not in t:
        raise MemberError(f"{tau!r} not in tree")
    return sum(1 for m in t if is_proper_prefix(m, tau))


def successors(t: Iterable[str], tau: str) -> tuple[str, ...]:
    """Minimal proper extensions of tau inside t, length-lex sorted."""
    t = frozenset(t)
    if tau not in t:
        raise MemberError(f"{tau!r} not in tree")
    above = [m for m in t if is_proper_prefix(tau, m)]
    succ = [m for m in above
            if not any(is_proper_prefix(o, m) for o in above)]
    return sort_lenlex(succ)


def leaves_and_successors(t: Iterable[str], tau: str) -> tuple[bool, tuple[str, ...]]:
    succ = successors(t, tau)
    return (len(succ) == 0, succ)


def is_leaf(t: Iterable[str], tau: str) -> bool:
    return leaves_and_successors(t, tau)[0]


def leaves(t: Iterable[str]) -> tuple[str, ...]:
    t = frozenset(t)
    return sort_lenlex(m for m in t
                       if not any(is_proper_prefix(m, o) for o in t))


def tree_uniform_level(t: Iterable[str]) -> Optional[int]:
    """The common level of all leaves, or None if leaves disagree.

    A tree "of level n" has every leaf at level n.
    """
    t = frozenset(t)
    if not t:
        raise ShapeError("empty tree has no level")
    lv = {level_of(t, m) for m in leaves(t)}
    if len(lv) != 1:
        return None
    return lv.pop()


def max_level(t: Iterable[str]) -> int:
    t = frozenset(t)
    if not t:
        raise ShapeError("empty tree has no level")
    return max(level_of(t, m) for m in t)


def restrict_to_level(t: Iterable[str], n: int) -> frozenset[str]:
    """Members of level at most n."""
    t = frozenset(t)
    return frozenset(m for m in t if level_of(t, m) <= n)


def is_prefix_free(strings: Iterable[str]) -> bool:
    ss = sort_lenlex(set(strings))
    for i, a in enumerate(ss):
        for b in ss[i + 1:]:
            if b.startswith(a):
                return False
    return True


def downward_closure(strings: Iterable[str]) -> frozenset[str]:
    """All initial segments of the given strings, including the strings."""
    out: set[str] = set()
    for s in strings:
        check_bits(s)
        for k in range(len(s) + 1):
            out.add(s[:k])
    return frozenset(out)


def branching_stats(t: Iterable[str]) -> tuple[int, bool, int]:
    """(max successor count, perfect?, two-branching-below level).

    perfect: every non-leaf member has at least two successors (a tree
    with no non-leaves counts as perfect).  The third component is the
    largest n such that every member of level < n has exactly two
    successors.
    """
    t = frozenset(t)
    if not t:
        raise ShapeError("empty tree")
    succ = {m: successors(t, m) for m in t}
    levels = {m: level_of(t, m) for m in t}
    max_succ = max(len(s) for s in succ.values())
    perfect = all(len(s) >= 2 for m, s in succ.items() if len(s) > 0)
    top = max(levels.values())
    two_below = 0
    for n in range(1, top + 2):
        if all(len(succ[m]) == 2 for m in t if levels[m] == n - 1):
            two_below = n
        else:
            break
    return (max_succ, perfect, two_below)


@dataclass(frozen=True)
class StagedTree:
    """A tree given by cumulative enumeration snapshots."""

    stages: tuple[frozenset[str], ...]

    def __post_init__(self):
        object.__setattr__(self, "stages",
                           tuple(frozenset(s) for s in self.stages))

    @property
    def final(self) -> frozenset[str]:
        if not self.stages:
            raise ShapeError("staged tree with no stages")
        return self.stages[-1]


def staged_ce_violation(st: StagedTree, weak: bool = False) -> Optional[str]:
    """First violation of the enumeration discipline, or None.

    Plain mode: one string at stage 0 and every later string extends a
    leaf of the previous snapshot.  Weak mode: stage 0 is exactly the
    root, at most one string arrives per stage, and each arrival is a
    leaf of the snapshot it joins.
    """
    stages = st.stages
    if not stages:
        return "no stages"
    if weak:
        if stages[0] != frozenset({""}):
            return "stage 0 must be exactly the empty string"
    else:
        if len(stages[0]) != 1:
            return "stage 0 must hold exactly one string"
    for s in range(1, len(stages)):
        prev, cur = stages[s - 1], stages[s]
        if not prev <= cur:
            gone = sort_lenlex(prev - cur)[0]
            return f"stage {s} dropped {gone!r}"
        new = cur - prev
        if weak and len(new) > 1:
            return f"stage {s} added {len(new)} strings"
        for tau in sort_lenlex(new):
            if weak:
                if any(is_proper_prefix(tau, m) for m in cur):
                    return f"stage {s}: {tau!r} is not a leaf of its snapshot"
            else:
                prev_leaves = leaves(prev) if prev else ()
                if not any(tau.startswith(lf) and tau != lf for lf in prev_leaves):
                    return f"stage {s}: {tau!r} extends no leaf of the previous snapshot"
    return None


def validate_staged_ce_tree(st: StagedTree, weak: bool = False) -> bool:
    return staged_ce_violation(st, weak) is None


def merge_to_two_stages(st: StagedTree) -> StagedTree:
    """Collapse an enumeration to (first snapshot, final snapshot)."""
    return StagedTree((st.stages[0], st.final))


def sorted_members(t: Iterable[str]) -> tuple[str, ...]:
    return sort_lenlex(frozenset(t))


def level_map(t: Iterable[str]) -> dict[int, tuple[str, ...]]:
    t = frozenset(t)
    out: dict[int, list[str]] = {}
    for m in t:
        out.setdefault(level_of(t, m), []).append(m)
    return {n: sort_lenlex(ms) for n, ms in out.items()}
