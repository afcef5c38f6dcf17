"""Dynamic symmetry reduction under full component symmetry.

Representatives are computed by symbolic bubble sort: for each adjacent
instance pair of a component type, the states where the pair is out of
order are swapped as one set. The order between positions ``p`` and
``p+1`` of a state ``z`` is::

    l_p < l_{p+1}, or l_p == l_{p+1} and key_p <=lex key_{p+1}

where ``key_q`` lists, for each id-sensitive variable targeting the type
in declaration order, whether it currently points at ``q``. With one
id-sensitive variable this picks the representative in which the
variable holds the largest index among equal local states.
"""
from __future__ import annotations

from typing import Dict, List, Tuple

from .bdd import Function
from .model import Encoder


class SymmetryError(Exception):
    """The sorting fixpoint failed to converge (a bug, never expected)."""


class SymContext:
    """Cached sorting predicates and swap maps for one encoded model."""

    def __init__(self, enc: Encoder) -> None:
        self.enc = enc
        self.model = enc.model
        self.layout = enc.layout
        self.bdd = enc.bdd
        self._leq: Dict[Tuple[str, int], Function] = {}
        self._bad: Dict[Tuple[str, int], Function] = {}
        self._eq: Dict[Tuple[str, int, int], Function] = {}
        self._swap: Dict[Tuple[str, int], Dict[int, int]] = {}
        self.tau_passes = 0
        n_max = max(t.count for t in self.model.types)
        self.pass_limit = max(4, n_max * n_max * len(self.model.types))

    def _check_pair(self, t: str, p: int) -> int:
        n = self.model.type(t).count
        if not 1 <= p <= n - 1:
            raise ValueError(f"pair index {p} outside 1..{n - 1} for type {t}")
        return n

    # block comparisons ------------------------------------------------

    def equal_locals(self, t: str, a: int, b: int) -> Function:
        """Instances ``a`` and ``b`` (1-based) have the same local state."""
        key = (t, a, b)
        f = self._eq.get(key)
        if f is None:
            bdd = self.bdd
            f = bdd.true
            pairs = zip(self.layout.block(t, a - 1), self.layout.block(t, b - 1))
            for x, y in reversed(list(pairs)):
                f = f & ~(bdd.var(x) ^ bdd.var(y))
            self._eq[key] = f
        return f

    def less_locals(self, t: str, a: int, b: int) -> Function:
        """Local state of instance ``a`` is below that of ``b`` (1-based)."""
        bdd = self.bdd
        lt = bdd.false
        pairs = list(zip(self.layout.block(t, a - 1), self.layout.block(t, b - 1)))
        # least significant bit first
        for x, y in reversed(pairs):
            vx, vy = bdd.var(x), bdd.var(y)
            lt = (~vx & vy) | (~(vx ^ vy) & lt)
        return lt

    def key_leq(self, t: str, p: int) -> Function:
        """``key_p <=lex key_{p+1}`` over the id-sensitive variables of ``t``."""
        le = self.bdd.true
        for g in reversed(self.model.id_vars_for(t)):
            a = self.enc.var_eq(g.name, p)
            b = self.enc.var_eq(g.name, p + 1)
            le = (~a & b) | (~(a ^ b) & le)
        return le

    # sorting primitives -----------------------------------------------

    def leq_pred(self, t: str, p: int) -> Function:
        """States ``z`` with ``p <=_z p+1`` for type ``t``, ``p`` 1-based."""
        self._check_pair(t, p)
        key = (t, p)
        f = self._leq.get(key)
        if f is None:
            f = self.less_locals(t, p, p + 1) | (
                self.equal_locals(t, p, p + 1) & self.key_leq(t, p))
            self._leq[key] = f
        return f

    def _violations(self, t: str, p: int) -> Function:
        key = (t, p)
        f = self._bad.get(key)
        if f is None:
            f = ~self.leq_pred(t, p)
            self._bad[key] = f
        return f

    def swap_mapping(self, t: str, p: int) -> Dict[int, int]:
        key = (t, p)
        m = self._swap.get(key)
        if m is None:
            a = self.layout.block(t, p - 1)
            b = self.layout.block(t, p)
            m = {}
            for x, y in zip(a, b):
                m[x] = y
                m[y] = x
            self._swap[key] = m
        return m

    def swap_adjacent(self, t: str, p: int, z: Function) -> Function:
        """Image of ``z`` under the transposition of instances ``p`` and ``p+1``.

        Exchanges the two local-state blocks and, for every id-sensitive
        variable targeting ``t``, the values ``p`` and ``p+1``.
        """
        self._check_pair(t, p)
        bdd = self.bdd
        z = bdd.permute(z, self.swap_mapping(t, p), monotone=False)
        for g in self.model.id_vars_for(t):
            bits = self.layout.globals[g.name]
            at_p = self.enc.var_eq(g.name, p)
            at_q = self.enc.var_eq(g.name, p + 1)
            rest = z - (at_p | at_q)
            moved_up = bdd.and_exists(z, at_p, bits) & at_q
            moved_down = bdd.and_exists(z, at_q, bits) & at_p
            z = rest | moved_up | moved_down
        return z

    def tau_pass(self, t: str, z: Function) -> Function:
        """One bubble-sort sweep over the adjacent pairs of type ``t``."""
        n = self.model.type(t).count
        for p in range(1, n):
            bad = z & self._violations(t, p)
            if not bad.is_false:
                z = (z - bad) | self.swap_adjacent(t, p, bad)
        self.tau_passes += 1
        return z

    def alpha(self, states: Function) -> Function:
        """Map a set of states to the set of their orbit representatives."""
        z = states
        types = [t.name for t in self.model.types if t.count > 1]
        if not types:
            return z
        for _ in range(self.pass_limit):
            prev = z
            for t in types:
                z = self.tau_pass(t, z)
            if z == prev:
                return z
        raise SymmetryError(f"representative sort did not converge in {self.pass_limit} passes")

    def representatives(self) -> Function:
        """Intersection of all ``leq_pred``: the sorted states."""
        f = self.bdd.true
        for t in self.model.types:
            for p in range(1, t.count):
                f = f & self.leq_pred(t.name, p)
        return f

    def pairs(self) -> List[Tuple[str, int]]:
        return [(t.name, p) for t in self.model.types for p in range(1, t.count)]
