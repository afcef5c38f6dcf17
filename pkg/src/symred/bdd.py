"""Reduced ordered binary decision diagrams.

A small hash-consed BDD package without complement edges. Variable
``i`` sits at level ``i``; there is no reordering. Nodes are integers
into parallel arrays, ``0`` is FALSE and ``1`` is TRUE.

User code holds :class:`Function` handles. A handle pins its root for
garbage collection, which only runs between operations (see
:meth:`BDD.collect` and :meth:`BDD.checkpoint`).
"""
from __future__ import annotations

import sys
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

FALSE = 0
TRUE = 1

_AND, _OR, _XOR, _DIFF, _NOT, _EX, _ANDEX, _ITEV, _REN = range(9)

# recursion depth is bounded by twice the number of variables
sys.setrecursionlimit(max(sys.getrecursionlimit(), 100_000))


class BDDError(Exception):
    """Misuse of the BDD package."""


class LayoutError(BDDError):
    """Variable index outside the manager's range."""


class BDD:
    """Manager holding the unique table and the operation cache.

    Parameters
    ----------
    nvars : int
        Number of variables, ``0..nvars-1``; index 0 is the top level.
    cache_limit : int
        The operation cache is flushed once it grows past this size.
    """

    def __init__(self, nvars: int, cache_limit: int = 1 << 21) -> None:
        if nvars < 0:
            raise LayoutError(f"negative variable count {nvars}")
        self.nvars = nvars
        # terminals live below every variable
        self._var: List[int] = [nvars, nvars]
        self._lo: List[int] = [0, 1]
        self._hi: List[int] = [0, 1]
        self._unique: Dict[Tuple[int, int, int], int] = {}
        self._free: List[int] = []
        self._cache: Dict[tuple, int] = {}
        self._cache_limit = cache_limit
        self._refs: Dict[int, int] = {}
        self._varsets: Dict[frozenset, int] = {}
        self.peak_live = 2
        self.last_live = 2
        self.collections = 0
        self._gc_floor = 200_000
        self._gc_next = self._gc_floor
        self._sample_next = 0
        self.false = Function(self, FALSE)
        self.true = Function(self, TRUE)

    # ------------------------------------------------------------------
    # node table

    def __len__(self) -> int:
        """Number of allocated nodes, terminals included (live or dead)."""
        return len(self._unique) + 2

    def _mk(self, v: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (v, lo, hi)
        u = self._unique.get(key)
        if u is not None:
            return u
        if self._free:
            u = self._free.pop()
            self._var[u] = v
            self._lo[u] = lo
            self._hi[u] = hi
        else:
            u = len(self._var)
            self._var.append(v)
            self._lo.append(lo)
            self._hi.append(hi)
        self._unique[key] = u
        return u

    def _wrap(self, u: int) -> "Function":
        return Function(self, u)

    def _check_var(self, i: int) -> None:
        if not 0 <= i < self.nvars:
            raise LayoutError(f"variable {i} out of range 0..{self.nvars - 1}")

    def _own(self, f: "Function") -> int:
        if not isinstance(f, Function) or f.bdd is not self:
            raise BDDError("operand belongs to a different manager")
        return f.node

    def _varset(self, vars: Iterable[int]) -> Tuple[int, frozenset]:
        s = frozenset(vars)
        for i in s:
            self._check_var(i)
        key = self._varsets.get(s)
        if key is None:
            key = len(self._varsets)
            self._varsets[s] = key
        return key, s

    def _maybe_flush(self) -> None:
        if len(self._cache) > self._cache_limit:
            self._cache.clear()

    # ------------------------------------------------------------------
    # terms

    def var(self, i: int) -> "Function":
        self._check_var(i)
        return self._wrap(self._mk(i, FALSE, TRUE))

    def nvar(self, i: int) -> "Function":
        self._check_var(i)
        return self._wrap(self._mk(i, TRUE, FALSE))

    def cube(self, assignment: Mapping[int, bool]) -> "Function":
        """Conjunction of literals, ``{index: value}``."""
        u = TRUE
        for i in sorted(assignment, reverse=True):
            self._check_var(i)
            u = self._mk(i, FALSE, u) if assignment[i] else self._mk(i, u, FALSE)
        return self._wrap(u)

    # ------------------------------------------------------------------
    # boolean operators on raw nodes

    def _and(self, u: int, v: int) -> int:
        if u == v or v == TRUE:
            return u
        if u == FALSE or v == FALSE:
            return FALSE
        if u == TRUE:
            return v
        if u > v:
            u, v = v, u
        key = (_AND, u, v)
        r = self._cache.get(key)
        if r is not None:
            return r
        var = self._var
        a, b = var[u], var[v]
        if a == b:
            r = self._mk(a, self._and(self._lo[u], self._lo[v]),
                         self._and(self._hi[u], self._hi[v]))
        elif a < b:
            r = self._mk(a, self._and(self._lo[u], v), self._and(self._hi[u], v))
        else:
            r = self._mk(b, self._and(u, self._lo[v]), self._and(u, self._hi[v]))
        self._cache[key] = r
        return r

    def _or(self, u: int, v: int) -> int:
        if u == v or v == FALSE:
            return u
        if u == TRUE or v == TRUE:
            return TRUE
        if u == FALSE:
            return v
        if u > v:
            u, v = v, u
        key = (_OR, u, v)
        r = self._cache.get(key)
        if r is not None:
            return r
        var = self._var
        a, b = var[u], var[v]
        if a == b:
            r = self._mk(a, self._or(self._lo[u], self._lo[v]),
                         self._or(self._hi[u], self._hi[v]))
        elif a < b:
            r = self._mk(a, self._or(self._lo[u], v), self._or(self._hi[u], v))
        else:
            r = self._mk(b, self._or(u, self._lo[v]), self._or(u, self._hi[v]))
        self._cache[key] = r
        return r

    def _not(self, u: int) -> int:
        if u <= TRUE:
            return 1 - u
        key = (_NOT, u)
        r = self._cache.get(key)
        if r is not None:
            return r
        r = self._mk(self._var[u], self._not(self._lo[u]), self._not(self._hi[u]))
        self._cache[key] = r
        return r

    def _xor(self, u: int, v: int) -> int:
        if u == v:
            return FALSE
        if u == FALSE:
            return v
        if v == FALSE:
            return u
        if u == TRUE:
            return self._not(v)
        if v == TRUE:
            return self._not(u)
        if u > v:
            u, v = v, u
        key = (_XOR, u, v)
        r = self._cache.get(key)
        if r is not None:
            return r
        var = self._var
        a, b = var[u], var[v]
        if a == b:
            r = self._mk(a, self._xor(self._lo[u], self._lo[v]),
                         self._xor(self._hi[u], self._hi[v]))
        elif a < b:
            r = self._mk(a, self._xor(self._lo[u], v), self._xor(self._hi[u], v))
        else:
            r = self._mk(b, self._xor(u, self._lo[v]), self._xor(u, self._hi[v]))
        self._cache[key] = r
        return r

    def _diff(self, u: int, v: int) -> int:
        """u AND NOT v."""
        if u == FALSE or v == TRUE or u == v:
            return FALSE
        if v == FALSE:
            return u
        if u == TRUE:
            return self._not(v)
        key = (_DIFF, u, v)
        r = self._cache.get(key)
        if r is not None:
            return r
        var = self._var
        a, b = var[u], var[v]
        if a == b:
            r = self._mk(a, self._diff(self._lo[u], self._lo[v]),
                         self._diff(self._hi[u], self._hi[v]))
        elif a < b:
            r = self._mk(a, self._diff(self._lo[u], v), self._diff(self._hi[u], v))
        else:
            r = self._mk(b, self._diff(u, self._lo[v]), self._diff(u, self._hi[v]))
        self._cache[key] = r
        return r

    def _exists(self, u: int, vs: frozenset, vid: int, top: int) -> int:
        if u <= TRUE:
            return u
        a = self._var[u]
        if a > top:
            return u
        key = (_EX, u, vid)
        r = self._cache.get(key)
        if r is not None:
            return r
        lo = self._exists(self._lo[u], vs, vid, top)
        if a in vs:
            r = TRUE if lo == TRUE else self._or(lo, self._exists(self._hi[u], vs, vid, top))
        else:
            r = self._mk(a, lo, self._exists(self._hi[u], vs, vid, top))
        self._cache[key] = r
        return r

    def _and_exists(self, u: int, v: int, vs: frozenset, vid: int, top: int) -> int:
        if u == FALSE or v == FALSE:
            return FALSE
        if u == TRUE and v == TRUE:
            return TRUE
        if u == TRUE or u == v:
            return self._exists(v, vs, vid, top)
        if v == TRUE:
            return self._exists(u, vs, vid, top)
        if u > v:
            u, v = v, u
        var = self._var
        a, b = var[u], var[v]
        if a > top and b > top:
            return self._and(u, v)
        key = (_ANDEX, u, v, vid)
        r = self._cache.get(key)
        if r is not None:
            return r
        if a == b:
            m, u0, u1, v0, v1 = a, self._lo[u], self._hi[u], self._lo[v], self._hi[v]
        elif a < b:
            m, u0, u1, v0, v1 = a, self._lo[u], self._hi[u], v, v
        else:
            m, u0, u1, v0, v1 = b, u, u, self._lo[v], self._hi[v]
        lo = self._and_exists(u0, v0, vs, vid, top)
        if m in vs:
            if lo == TRUE:
                r = TRUE
            else:
                r = self._or(lo, self._and_exists(u1, v1, vs, vid, top))
        else:
            r = self._mk(m, lo, self._and_exists(u1, v1, vs, vid, top))
        self._cache[key] = r
        return r

    def _ite_var(self, x: int, h: int, l: int) -> int:
        """(x AND h) OR (NOT x AND l) for variable ``x``; h, l arbitrary."""
        if h == l:
            return h
        var = self._var
        a, b = var[h], var[l]
        if x < a and x < b:
            return self._mk(x, l, h)
        key = (_ITEV, x, h, l)
        r = self._cache.get(key)
        if r is not None:
            return r
        m = min(a, b)
        if m == x:
            # the cofactors of h and l with respect to x itself
            h1 = self._hi[h] if a == x else h
            l0 = self._lo[l] if b == x else l
            r = self._mk(x, l0, h1)
        else:
            h0, h1 = (self._lo[h], self._hi[h]) if a == m else (h, h)
            l0, l1 = (self._lo[l], self._hi[l]) if b == m else (l, l)
            r = self._mk(m, self._ite_var(x, h0, l0), self._ite_var(x, h1, l1))
        self._cache[key] = r
        return r

    def _rename(self, u: int, mapping: Mapping[int, int], mid: int,
                memo: Dict[int, int], monotone: bool, last: int) -> int:
        if u <= TRUE:
            return u
        a = self._var[u]
        if a > last:
            return u
        r = memo.get(u)
        if r is not None:
            return r
        key = (_REN, u, mid)
        r = self._cache.get(key)
        if r is None:
            lo = self._rename(self._lo[u], mapping, mid, memo, monotone, last)
            hi = self._rename(self._hi[u], mapping, mid, memo, monotone, last)
            b = mapping.get(a, a)
            r = self._mk(b, lo, hi) if monotone else self._ite_var(b, hi, lo)
            self._cache[key] = r
        memo[u] = r
        return r

    def _support(self, u: int) -> set:
        seen = set()
        sup = set()
        stack = [u]
        var, lo, hi = self._var, self._lo, self._hi
        while stack:
            w = stack.pop()
            if w <= TRUE or w in seen:
                continue
            seen.add(w)
            sup.add(var[w])
            stack.append(lo[w])
            stack.append(hi[w])
        return sup

    # ------------------------------------------------------------------
    # public operations on handles

    def apply(self, op: str, f: "Function", g: "Function") -> "Function":
        """Binary boolean operator: ``and``, ``or``, ``xor`` or ``diff``."""
        u, v = self._own(f), self._own(g)
        self._maybe_flush()
        if op == "and":
            r = self._and(u, v)
        elif op == "or":
            r = self._or(u, v)
        elif op == "xor":
            r = self._xor(u, v)
        elif op == "diff":
            r = self._diff(u, v)
        else:
            raise BDDError(f"unknown operator {op!r}")
        return self._wrap(r)

    def negate(self, f: "Function") -> "Function":
        u = self._own(f)
        self._maybe_flush()
        return self._wrap(self._not(u))

    def ite(self, f: "Function", g: "Function", h: "Function") -> "Function":
        u, v, w = self._own(f), self._own(g), self._own(h)
        self._maybe_flush()
        return self._wrap(self._or(self._and(u, v), self._diff(w, u)))

    def exists(self, f: "Function", vars: Iterable[int]) -> "Function":
        u = self._own(f)
        vid, vs = self._varset(vars)
        if not vs:
            return f
        self._maybe_flush()
        return self._wrap(self._exists(u, vs, vid, max(vs)))

    def forall(self, f: "Function", vars: Iterable[int]) -> "Function":
        return ~self.exists(~f, vars)

    def and_exists(self, f: "Function", g: "Function", vars: Iterable[int]) -> "Function":
        """``exists(f AND g, vars)`` in one pass (relational product)."""
        u, v = self._own(f), self._own(g)
        vid, vs = self._varset(vars)
        self._maybe_flush()
        if not vs:
            return self._wrap(self._and(u, v))
        return self._wrap(self._and_exists(u, v, vs, vid, max(vs)))

    def permute(self, f: "Function", mapping: Mapping[int, int],
                monotone: Optional[bool] = None) -> "Function":
        """Rename variables: the result at ``x`` equals ``f`` at ``x``
        with position ``mapping[i]`` read in place of position ``i``.

        ``mapping`` must be a bijection on its own domain; unlisted
        variables stay fixed. Pass ``monotone=False`` to skip checking
        whether the mapping preserves the order of the support.
        """
        u = self._own(f)
        mapping = {int(k): int(v) for k, v in mapping.items() if k != v}
        if set(mapping) != set(mapping.values()):
            raise BDDError("mapping is not a bijection on its domain")
        for i in mapping:
            self._check_var(i)
        if not mapping or u <= TRUE:
            return f
        self._maybe_flush()
        if monotone is None:
            sup = sorted(self._support(u))
            image = [mapping.get(i, i) for i in sup]
            monotone = all(x < y for x, y in zip(image, image[1:]))
        mid = self._varset_key_for_mapping(mapping)
        return self._wrap(self._rename(u, mapping, mid, {}, monotone, max(mapping)))

    def rename_monotone(self, f: "Function", mapping: Mapping[int, int]) -> "Function":
        """Rename without the bijection and order checks.

        The caller guarantees that ``mapping`` preserves the relative
        order of every variable in the support of ``f`` and that the
        targets are outside that support.
        """
        u = self._own(f)
        if u <= TRUE:
            return f
        self._maybe_flush()
        mid = self._varset_key_for_mapping(mapping)
        return self._wrap(self._rename(u, mapping, mid, {}, True, max(mapping)))

    def _varset_key_for_mapping(self, mapping: Mapping[int, int]) -> int:
        s = frozenset(("map", k, v) for k, v in mapping.items())
        key = self._varsets.get(s)
        if key is None:
            key = len(self._varsets)
            self._varsets[s] = key
        return key

    def support(self, f: "Function") -> set:
        return self._support(self._own(f))

    def count(self, f: "Function", over: Iterable[int]) -> int:
        """Number of satisfying assignments over exactly ``over``."""
        u = self._own(f)
        levels = sorted(set(over))
        for i in levels:
            self._check_var(i)
        rank = {v: k for k, v in enumerate(levels)}
        n = len(levels)
        var, lo, hi = self._var, self._lo, self._hi
        memo: Dict[int, int] = {}

        def pos(w: int) -> int:
            if w <= TRUE:
                return n
            try:
                return rank[var[w]]
            except KeyError:
                raise BDDError(f"support variable {var[w]} not among counted variables")

        def cnt(w: int) -> int:
            if w == FALSE:
                return 0
            if w == TRUE:
                return 1
            r = memo.get(w)
            if r is not None:
                return r
            k = pos(w)
            l, h = lo[w], hi[w]
            r = (cnt(l) << (pos(l) - k - 1)) + (cnt(h) << (pos(h) - k - 1))
            memo[w] = r
            return r

        return cnt(u) << pos(u)

    def pick(self, f: "Function") -> Optional[Dict[int, bool]]:
        """Lexicographically least satisfying assignment on the support.

        Variables not on the chosen path are unassigned (read them as 0).
        """
        u = self._own(f)
        if u == FALSE:
            return None
        out = {}
        while u != TRUE:
            if self._lo[u] != FALSE:
                out[self._var[u]] = False
                u = self._lo[u]
            else:
                out[self._var[u]] = True
                u = self._hi[u]
        return out

    def iter_sat(self, f: "Function", over: Iterable[int]) -> Iterator[Dict[int, bool]]:
        """All satisfying assignments over ``over``, don't-cares expanded."""
        u = self._own(f)
        levels = sorted(set(over))
        sup = self._support(u)
        if not sup <= set(levels):
            raise BDDError("support escapes the enumeration variables")
        var, lo, hi = self._var, self._lo, self._hi

        def rec(w: int, k: int, acc: Dict[int, bool]) -> Iterator[Dict[int, bool]]:
            if w == FALSE:
                return
            if k == len(levels):
                yield dict(acc)
                return
            x = levels[k]
            if w != TRUE and var[w] == x:
                branches = ((False, lo[w]), (True, hi[w]))
            else:
                branches = ((False, w), (True, w))
            for val, child in branches:
                acc[x] = val
                yield from rec(child, k + 1, acc)
            del acc[x]

        yield from rec(u, 0, {})

    def eval(self, f: "Function", assignment: Mapping[int, bool]) -> bool:
        u = self._own(f)
        while u > TRUE:
            u = self._hi[u] if assignment.get(self._var[u], False) else self._lo[u]
        return u == TRUE

    def dag_size(self, f: "Function") -> int:
        u = self._own(f)
        seen = set()
        stack = [u]
        while stack:
            w = stack.pop()
            if w in seen:
                continue
            seen.add(w)
            if w > TRUE:
                stack.append(self._lo[w])
                stack.append(self._hi[w])
        return len(seen)

    # ------------------------------------------------------------------
    # reference counting and garbage collection

    def _incref(self, u: int) -> None:
        self._refs[u] = self._refs.get(u, 0) + 1

    def _decref(self, u: int) -> None:
        c = self._refs.get(u, 0) - 1
        if c <= 0:
            self._refs.pop(u, None)
        else:
            self._refs[u] = c

    def _mark(self) -> bytearray:
        marked = bytearray(len(self._var))
        marked[FALSE] = marked[TRUE] = 1
        lo, hi = self._lo, self._hi
        stack = list(self._refs)
        while stack:
            w = stack.pop()
            if marked[w]:
                continue
            marked[w] = 1
            stack.append(lo[w])
            stack.append(hi[w])
        return marked

    def live_nodes(self) -> int:
        """Nodes reachable from handles still held, terminals included."""
        live = sum(self._mark())
        self._note_live(live)
        return live

    def _note_live(self, live: int) -> None:
        self.last_live = live
        if live > self.peak_live:
            self.peak_live = live

    def collect(self) -> int:
        """Free every node unreachable from a held handle.

        Returns the number of live nodes afterwards. Clears the cache.
        """
        marked = self._mark()
        var, lo, hi = self._var, self._lo, self._hi
        unique = self._unique
        free = self._free
        dead = self.nvars + 1
        for u in range(2, len(var)):
            if not marked[u] and var[u] != dead:
                del unique[(var[u], lo[u], hi[u])]
                var[u] = dead
                free.append(u)
        self._cache.clear()
        self.collections += 1
        live = len(unique) + 2
        self._note_live(live)
        self._gc_next = max(self._gc_floor, 2 * live)
        self._sample_next = live + self._slack()
        return live

    def checkpoint(self) -> int:
        """Sample the live-node count between operations.

        Collects garbage once the table has doubled since the last
        collection. Otherwise the live nodes are counted (without
        freeing anything) whenever the table has grown by more than an
        eighth of the peak since the last count, so the recorded peak
        trails the true peak at checkpoints by at most that margin.
        Returns the current table size.
        """
        size = len(self)
        if size > self._gc_next:
            self.collect()
        elif size > self._sample_next:
            self.live_nodes()
            self._sample_next = size + self._slack()
        return len(self)

    def _slack(self) -> int:
        return max(1000, self.peak_live >> 3)


class Function:
    """Handle to a rooted diagram; pins its root against collection."""

    __slots__ = ("bdd", "node", "__weakref__")

    def __init__(self, bdd: BDD, node: int) -> None:
        self.bdd = bdd
        self.node = node
        bdd._incref(node)

    def __del__(self) -> None:
        try:
            self.bdd._decref(self.node)
        except AttributeError:
            pass

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Function):
            return NotImplemented
        return self.bdd is other.bdd and self.node == other.node

    def __ne__(self, other: object) -> bool:
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self) -> int:
        return hash((id(self.bdd), self.node))

    def __repr__(self) -> str:
        return f"Function(node={self.node})"

    def __and__(self, other: "Function") -> "Function":
        return self.bdd.apply("and", self, other)

    def __or__(self, other: "Function") -> "Function":
        return self.bdd.apply("or", self, other)

    def __xor__(self, other: "Function") -> "Function":
        return self.bdd.apply("xor", self, other)

    def __sub__(self, other: "Function") -> "Function":
        return self.bdd.apply("diff", self, other)

    def __invert__(self) -> "Function":
        return self.bdd.negate(self)

    def implies(self, other: "Function") -> bool:
        """True when ``self`` is contained in ``other``."""
        return self.bdd.apply("diff", self, other).node == FALSE

    @property
    def is_false(self) -> bool:
        return self.node == FALSE

    @property
    def is_true(self) -> bool:
        return self.node == TRUE

    def __bool__(self) -> bool:
        raise BDDError("use .is_false / .is_true instead of truth value of a BDD")
