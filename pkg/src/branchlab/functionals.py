"""Oracle functionals as finite axiom tables.

An axiom (sigma, arg, value, steps) says: on any oracle extending
sigma, the computation at argument arg converges to value after steps
steps.  Tables must be consistent: axioms whose oracles are comparable
and whose arguments agree must carry the same value.  The convergence
time of a computation is the least steps field among applicable
axioms.

hat_eval is the guarded variant: defined at (tau, n) only when the
computation beats the oracle length (steps < len(tau)) and the guarded
value at every smaller argument is already defined on tau minus its
last bit.  This makes definedness monotone in the oracle and downward
closed in the argument, which the property tests pin down.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import ConsistencyError, ShapeError
from .strings import bits_of_values, check_bits, compatible, is_prefix
from .trees import level_of, sorted_members, successors

Axiom = tuple[str, int, int, int]  # (sigma, arg, value, steps)


def _axiom_key(ax: Axiom):
    sigma, arg, value, steps = ax
    return (arg, len(sigma), sigma, steps, value)


@dataclass(frozen=True)
class FunctionalTable:
    axioms: tuple[Axiom, ...]

    def __post_init__(self):
        axs = tuple(sorted(set(self.axioms), key=_axiom_key))
        for sigma, arg, value, steps in axs:
            check_bits(sigma)
            if arg < 0 or value < 0:
                raise ShapeError(f"axiom {(sigma, arg, value, steps)}: "
                                 "argument and value must be naturals")
            if steps < 1:
                raise ShapeError(f"axiom {(sigma, arg, value, steps)}: "
                                 "steps must be at least 1")
        by_arg: dict[int, list[Axiom]] = {}
        for ax in axs:
            by_arg.setdefault(ax[1], []).append(ax)
        for group in by_arg.values():
            for i, a in enumerate(group):
                for b in group[i + 1:]:
                    if compatible(a[0], b[0]) and a[2] != b[2]:
                        raise ConsistencyError(
                            f"axioms {a} and {b} clash", first=a, second=b)
        object.__setattr__(self, "axioms", axs)

    @property
    def max_arg(self) -> int:
        return max((ax[1] for ax in self.axioms), default=-1)


EMPTY_TABLE = FunctionalTable(())


def table(axioms: Iterable[Axiom]) -> FunctionalTable:
    return FunctionalTable(tuple(axioms))


def applicable(f: FunctionalTable, tau: str, n: int) -> tuple[Axiom, ...]:
    return tuple(ax for ax in f.axioms
                 if ax[1] == n and is_prefix(ax[0], tau))


def eval_at(f: FunctionalTable, tau: str, n: int) -> Optional[int]:
    """Converged value at (tau, n), or None."""
    for ax in f.axioms:
        if ax[1] == n and is_prefix(ax[0], tau):
            return ax[2]
    return None


def min_steps(f: FunctionalTable, tau: str, n: int) -> Optional[int]:
    """Convergence time at (tau, n): least steps among applicable axioms."""
    best = None
    for ax in applicable(f, tau, n):
        if best is None or ax[3] < best:
            best = ax[3]
    return best


def effective_axiom(f: FunctionalTable, tau: str, n: int) -> Optional[Axiom]:
    """The axiom that fires first: least (steps, oracle length)."""
    cands = applicable(f, tau, n)
    if not cands:
        return None
    return min(cands, key=lambda ax: (ax[3], len(ax[0]), ax[0]))


def hat_eval(f: FunctionalTable, tau: str, n: int,
             _memo: Optional[dict] = None) -> Optional[int]:
    if _memo is None:
        _memo = {}
    key = (tau, n)
    if key in _memo:
        return _memo[key]
    _memo[key] = None  # guard; the recursion only ever shortens tau
    steps = min_steps(f, tau, n)
    if steps is None or steps >= len(tau):
        return None
    parent = tau[:-1]
    for k in range(n):
        if hat_eval(f, parent, k, _memo) is None:
            return None
    val = eval_at(f, tau, n)
    _memo[key] = val
    return val


def output_prefix(f: FunctionalTable, tau: str, hat: bool = False) -> tuple[int, ...]:
    """Values at arguments 0, 1, ... while defined."""
    out = []
    memo: dict = {}
    n = 0
    limit = f.max_arg + 1
    while n <= limit:
        v = hat_eval(f, tau, n, memo) if hat else eval_at(f, tau, n)
        if v is None:
            break
        out.append(v)
        n += 1
    return tuple(out)


def output_bits(f: FunctionalTable, tau: str, hat: bool = False) -> str:
    return bits_of_values(output_prefix(f, tau, hat=hat))


def outputs_split(a_out: tuple[int, ...], b_out: tuple[int, ...]) -> bool:
    return any(x != y for x, y in zip(a_out, b_out))


def is_splitting_pair(f: FunctionalTable, a: str, b: str,
                      hat: bool = False) -> bool:
    """True iff the outputs on a and b disagree at a common argument.

    Only incompatible strings can form a splitting pair.
    """
    if compatible(a, b):
        raise ShapeError(f"{a!r} and {b!r} are compatible")
    return outputs_split(output_prefix(f, a, hat=hat),
                         output_prefix(f, b, hat=hat))


def splitting_violation(f: FunctionalTable, t: Iterable[str],
                        delayed: bool = False,
                        hat: bool = False) -> Optional[tuple[str, str]]:
    """First incompatible pair whose outputs fail to split, or None.

    delayed mode only inspects pairs lying strictly above their longest
    common initial segment's successors... in plain mode every
    incompatible pair of members must split; in delayed mode a pair
    must split only if each member properly extends some member that
    already extends the branch point, i.e. the split may arrive one
    tree step late.
    """
    t = frozenset(t)
    mems = sorted_members(t)
    outs = {m: output_prefix(f, m, hat=hat) for m in mems}
    for i, a in enumerate(mems):
        for b in mems[i + 1:]:
            if compatible(a, b):
                continue
            if delayed:
                # a pair is exempt while either member is a successor of
                # the branch point itself: only "grandchildren" must split
                k = 0
                while k < min(len(a), len(b)) and a[k] == b[k]:
                    k += 1
                stem = a[:k]
                if not any(is_prefix(m, a) and len(stem) < len(m) < len(a)
                           for m in mems):
                    continue
                if not any(is_prefix(m, b) and len(stem) < len(m) < len(b)
                           for m in mems):
                    continue
            if not outputs_split(outs[a], outs[b]):
                return (a, b)
    return None


def is_splitting_tree(f: FunctionalTable, t: Iterable[str],
                      delayed: bool = False, hat: bool = False) -> bool:
    return splitting_violation(f, t, delayed=delayed, hat=hat) is None


# ---------------------------------------------------------------------------
# weak splitting witnesses


@dataclass(frozen=True)
class WeakSplitWitness:
    """Tree of qualifying strings with agreement and use bookkeeping.

    phi[tau] is the largest argument up to which the composed
    computation reproduces tau; psi[tau] is the largest output argument
    the composition consulted while doing so.
    """

    tree: frozenset[str]
    phi: dict[str, int]
    psi: dict[str, int]

    def members(self) -> tuple[str, ...]:
        return sorted_members(self.tree)


def _axiom_use(ax: Axiom) -> int:
    return len(ax[0]) - 1  # highest oracle position read; -1 if none


def _agreement(phi_t: FunctionalTable, psi_t: FunctionalTable,
               tau: str) -> Optional[int]:
    """Greatest n with the composed guarded output matching tau on 0..n."""
    oracle = bits_of_values(output_prefix(psi_t, tau, hat=True))
    best = None
    memo: dict = {}
    for n in range(len(tau)):
        v = hat_eval(phi_t, oracle, n, memo)
        if v is None or v != int(tau[n]):
            break
        best = n
    return best


def build_weak_splitting_tree(psi: FunctionalTable, phi: FunctionalTable,
                              length_budget: int) -> WeakSplitWitness:
    """Scan all strings up to the length budget for qualifying members.

    A string enters the tree when its composed-agreement level strictly
    exceeds that of every proper initial segment; phi records that
    level and psi the largest oracle argument consulted below it.
    """
    agree: dict[str, int] = {}
    members: list[str] = []
    phi_map: dict[str, int] = {}
    psi_map: dict[str, int] = {}
    frontier = [""]
    for _ in range(length_budget + 1):
        nxt = []
        for tau in frontier:
            a = _agreement(phi, psi, tau)
            prev = max((agree.get(tau[:k], -1) for k in range(len(tau))),
                       default=-1)
            agree[tau] = max(a if a is not None else -1, prev)
            if a is not None and a > prev:
                members.append(tau)
                phi_map[tau] = a
                oracle = bits_of_values(output_prefix(psi, tau, hat=True))
                use = 0
                for n in range(a + 1):
                    ax = effective_axiom(phi, oracle, n)
                    if ax is not None:
                        use = max(use, _axiom_use(ax))
                psi_map[tau] = max(use, 0)
            if len(tau) < length_budget:
                nxt.extend((tau + "0", tau + "1"))
        frontier = nxt
    return WeakSplitWitness(frozenset(members), phi_map, psi_map)


def _disagree_upto(a: str, b: str, k: int) -> bool:
    """Some position <= k where both are defined and differ."""
    top = min(len(a), len(b), k + 1)
    return any(a[i] != b[i] for i in range(top))


def weak_splitting_violation(w: WeakSplitWitness, psi: FunctionalTable,
                             path_prefix: str) -> Optional[str]:
    mems = w.members()
    if set(w.phi) != set(w.tree) or set(w.psi) != set(w.tree):
        return "phi/psi domains differ from the tree"
    outs = {m: output_prefix(psi, m) for m in mems}
    for m in mems:
        if not 0 <= w.phi[m] < len(m):
            return f"phi out of range at {m!r}"
        if not 0 <= w.psi[m] < len(outs[m]):
            return f"psi out of range at {m!r}"
    for i, a in enumerate(mems):
        for b in mems[i + 1:]:
            if compatible(a, b):
                continue
            if _disagree_upto(a, b, min(w.phi[a], w.phi[b])):
                if not _disagree_upto(outs[a], outs[b],
                                      min(w.psi[a], w.psi[b])):
                    return f"pair {a!r},{b!r} fails to split under the use bound"
    chain = [m for m in mems if is_prefix(m, path_prefix)]
    for x, y in zip(chain, chain[1:]):
        if w.phi[x] >= w.phi[y]:
            return f"agreement levels not increasing along {x!r} -> {y!r}"
    return None


def check_weak_splitting(w: WeakSplitWitness, psi: FunctionalTable,
                         path_prefix: str) -> bool:
    return weak_splitting_violation(w, psi, path_prefix) is None


def decode_initial_segment(w: WeakSplitWitness, psi: FunctionalTable,
                           oracle_prefix: str, n: int) -> Optional[str]:
    """Recover the first n path bits from an output prefix.

    Scans members in enumeration order for one whose output agrees
    with the oracle prefix on every argument up to its use bound and
    whose agreement level reaches n-1; returns its first n bits.
    """
    check_bits(oracle_prefix)
    for tau in w.members():
        use = w.psi[tau]
        out = bits_of_values(output_prefix(psi, tau))
        if len(oracle_prefix) <= use or len(out) <= use:
            continue
        if any(out[i] != oracle_prefix[i] for i in range(use + 1)):
            continue
        if w.phi[tau] >= n - 1:
            return tau[:n]
    return None


# ---------------------------------------------------------------------------
# image and pullback trees


def _require_hat_closed(f: FunctionalTable, t: frozenset[str]) -> None:
    for m in t:
        if output_prefix(f, m) != output_prefix(f, m, hat=True):
            raise ShapeError(
                f"table is not its own guarded restriction at {m!r}")


def _require_two_branching(t: frozenset[str], what: str) -> None:
    if not t:
        raise ShapeError(f"{what}: empty tree")
    roots = [m for m in t if level_of(t, m) == 0]
    if len(roots) != 1:
        raise ShapeError(f"{what}: expected a single root")
    for m in t:
        s = successors(t, m)
        if len(s) not in (0, 2):
            raise ShapeError(f"{what}: {m!r} has {len(s)} successors")


def image_tree(f: FunctionalTable, t: Iterable[str],
               hat: bool = False) -> frozenset[str]:
    """Outputs of the members of a two-branching splitting tree.

    Unless evaluating in guarded mode, the table must agree with its
    own guarded restriction on the tree.  The result is checked to be
    two-branching again.
    """
    t = frozenset(t)
    if not hat:
        _require_hat_closed(f, t)
    _require_two_branching(t, "image input")
    if not is_splitting_tree(f, t, hat=hat):
        raise ShapeError("input tree is not a splitting tree")
    img = frozenset(bits_of_values(output_prefix(f, m, hat=hat)) for m in t)
    _require_two_branching(img, "image output")
    return img


def pullback_tree(f: FunctionalTable, t0: Iterable[str], t2: Iterable[str],
                  hat: bool = False) -> frozenset[str]:
    """Members of t0 whose outputs land in t2."""
    t0 = frozenset(t0)
    t2 = frozenset(t2)
    img = image_tree(f, t0, hat=hat)
    if not t2 <= img:
        raise ShapeError("refinement tree is not a subset of the image")
    _require_two_branching(t2, "refinement tree")
    t3 = frozenset(m for m in t0
                   if bits_of_values(output_prefix(f, m, hat=hat)) in t2)
    _require_two_branching(t3, "pullback output")
    return t3
