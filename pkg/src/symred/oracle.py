"""Explicit-state reference semantics.

Everything here works on :class:`~symred.model.State` tuples and
enumerates permutation groups literally. It is slow on purpose and
only meant for small instances, as ground truth for the symbolic code.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from .model import (COMPARATORS, And, BoolConst, Cond, ConstCmp, Count, Model, Or,
                    SelfEq, State)

MAX_GROUP_ORDER = math.factorial(10)
DEFAULT_STATE_LIMIT = 200_000


class OracleError(Exception):
    """Instance too large for brute force."""


class ConsistencyError(Exception):
    """An orbit without a unique sorted element; indicates a bug."""


def _type_index(model: Model) -> Dict[str, int]:
    return {t.name: i for i, t in enumerate(model.types)}


def check_capacity(model: Model) -> None:
    for t in model.types:
        if math.factorial(t.count) > MAX_GROUP_ORDER:
            raise OracleError(f"symmetric group of {t.name} ({t.count}!) exceeds 10!")


# ----------------------------------------------------------------------
# group actions


def apply_component_perm(model: Model, s: State,
                         perms: Mapping[str, Sequence[int]]) -> State:
    """Move the instance at 1-based position ``i`` of type ``t`` to
    position ``perms[t][i-1]``; id-sensitive values follow their instance.

    Types missing from ``perms`` are left alone.
    """
    locals_ = []
    for t, locs in zip(model.types, s.locals):
        pi = perms.get(t.name)
        if pi is None:
            locals_.append(locs)
            continue
        out = [0] * t.count
        for i, v in enumerate(locs):
            out[pi[i] - 1] = v
        locals_.append(tuple(out))
    gl = []
    for g, v in zip(model.globals, s.globals):
        pi = perms.get(g.target) if g.id_sensitive else None
        gl.append(pi[v - 1] if pi is not None else v)
    return State(tuple(gl), tuple(locals_))


def data_perm_action(model: Model, s: State,
                     perms: Mapping[str, Sequence[int]]) -> State:
    """Permute local-state values: instance value ``v`` of type ``t``
    becomes ``perms[t][v]`` at every position (0-based value indices)."""
    locals_ = []
    for t, locs in zip(model.types, s.locals):
        pi = perms.get(t.name)
        locals_.append(tuple(pi[v] for v in locs) if pi is not None else locs)
    return State(s.globals, tuple(locals_))


def group_elements(model: Model) -> Iterator[Dict[str, Tuple[int, ...]]]:
    """Every element of the product of the per-type symmetric groups."""
    check_capacity(model)
    names = [t.name for t in model.types]
    per_type = [list(itertools.permutations(range(1, t.count + 1))) for t in model.types]
    for combo in itertools.product(*per_type):
        yield dict(zip(names, combo))


def orbit(model: Model, s: State) -> Set[State]:
    return {apply_component_perm(model, s, pi) for pi in group_elements(model)}


# ----------------------------------------------------------------------
# representatives


def _key(model: Model, s: State, t_name: str, q: int) -> Tuple[int, ...]:
    return tuple(int(v == q) for g, v in zip(model.globals, s.globals)
                 if g.id_sensitive and g.target == t_name)


def is_sorted(model: Model, s: State) -> bool:
    """Every adjacent pair of every type is in ``<=_z`` order."""
    for t, locs in zip(model.types, s.locals):
        for p in range(1, t.count):
            a, b = locs[p - 1], locs[p]
            if a < b:
                continue
            if a > b or _key(model, s, t.name, p) > _key(model, s, t.name, p + 1):
                return False
    return True


def canonicalize_explicit(model: Model, s: State) -> State:
    """The unique sorted element of the orbit of ``s``."""
    found = {x for x in orbit(model, s) if is_sorted(model, x)}
    if len(found) != 1:
        raise ConsistencyError(f"orbit of {s} has {len(found)} sorted elements")
    return found.pop()


def canonical_map(model: Model, states: Iterable[State]) -> Dict[State, State]:
    """Canonical form of each state, enumerating each orbit only once."""
    out: Dict[State, State] = {}
    for s in states:
        if s in out:
            continue
        orb = orbit(model, s)
        found = {x for x in orb if is_sorted(model, x)}
        if len(found) != 1:
            raise ConsistencyError(f"orbit of {s} has {len(found)} sorted elements")
        rep = found.pop()
        for x in orb:
            out[x] = rep
    return out


def canonical_set(model: Model, states: Iterable[State]) -> Set[State]:
    states = list(states)
    cmap = canonical_map(model, states)
    return {cmap[s] for s in states}


# ----------------------------------------------------------------------
# concrete semantics


def _count(model: Model, s: State, a: Count, acting: Optional[Tuple[int, int]]) -> int:
    ti = _type_index(model)[a.type]
    idx = model.types[ti].local_index(a.local)
    n = sum(1 for v in s.locals[ti] if v == idx)
    if a.others and acting is not None and acting[0] == ti and s.locals[ti][acting[1]] == idx:
        n -= 1
    return n


def _global(model: Model, s: State, name: str) -> int:
    for g, v in zip(model.globals, s.globals):
        if g.name == name:
            return v
    raise KeyError(name)


def holds(model: Model, cond: Cond, s: State) -> bool:
    """Evaluate a property condition on an explicit state."""
    if isinstance(cond, BoolConst):
        return cond.value
    if isinstance(cond, Count):
        return COMPARATORS[cond.op](_count(model, s, cond, None), cond.value)
    if isinstance(cond, ConstCmp):
        return COMPARATORS[cond.op](_global(model, s, cond.var), cond.value)
    if isinstance(cond, And):
        return all(holds(model, c, s) for c in cond.items)
    if isinstance(cond, Or):
        return any(holds(model, c, s) for c in cond.items)
    raise TypeError(cond)


def initial_states(model: Model) -> List[State]:
    choices = [model.domain_values(g) if g.init is None else (g.init,)
               for g in model.globals]
    locs = tuple(tuple([t.local_index(t.init)] * t.count) for t in model.types)
    return [State(tuple(gv), locs) for gv in itertools.product(*choices)]


def successors(model: Model, s: State) -> Set[State]:
    out: Set[State] = set()
    ti = _type_index(model)
    for cmd in model.commands:
        k = ti[cmd.type]
        t = model.types[k]
        src, dst = t.local_index(cmd.src), t.local_index(cmd.dst)
        for j in range(t.count):
            if s.locals[k][j] != src:
                continue
            ok = True
            for a in cmd.guard:
                if isinstance(a, SelfEq):
                    ok = _global(model, s, a.var) == j + 1
                elif isinstance(a, ConstCmp):
                    ok = COMPARATORS[a.op](_global(model, s, a.var), a.value)
                else:
                    ok = COMPARATORS[a.op](_count(model, s, a, (k, j)), a.value)
                if not ok:
                    break
            if not ok:
                continue
            locs = list(s.locals)
            row = list(locs[k])
            row[j] = dst
            locs[k] = tuple(row)
            options = []
            for g, v in zip(model.globals, s.globals):
                upd = next((u for u in cmd.updates if u.var == g.name), None)
                if upd is None:
                    options.append((v,))
                elif upd.kind == "any":
                    options.append(tuple(model.domain_values(g)))
                elif upd.kind == "self":
                    options.append((j + 1,))
                else:
                    options.append((upd.value,))
            for gv in itertools.product(*options):
                out.add(State(tuple(gv), tuple(locs)))
    return out


def enumerate_reachable(model: Model, limit: int = DEFAULT_STATE_LIMIT) -> Set[State]:
    """All states reachable in the unreduced system (breadth first)."""
    init = sorted(initial_states(model))
    seen = set(init)
    if len(seen) > limit:
        raise OracleError(f"more than {limit} states")
    queue = deque(init)
    while queue:
        s = queue.popleft()
        for t in sorted(successors(model, s)):
            if t not in seen:
                seen.add(t)
                if len(seen) > limit:
                    raise OracleError(f"more than {limit} reachable states")
                queue.append(t)
    return seen


def all_states(model: Model) -> Iterator[State]:
    """Every well-typed state (the full product of domains)."""
    gdoms = [model.domain_values(g) for g in model.globals]
    ldoms = [itertools.product(range(len(t.locals)), repeat=t.count) for t in model.types]
    for locs in itertools.product(*ldoms):
        for gv in itertools.product(*gdoms):
            yield State(tuple(gv), tuple(locs))


def check_safety(model: Model, states: Iterable[State], cond: Cond) -> Optional[State]:
    """Least state satisfying ``cond``, or None."""
    bad = [s for s in states if holds(model, cond, s)]
    return min(bad) if bad else None
