"""Forward reachability with dynamic symmetry reduction."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .bdd import BDD, Function
from .model import Encoder, Model, State
from .symmetry import SymContext

COMPLETE = "complete"
EXHAUSTED = "resource-exhausted"
DEFAULT_NODE_CAP = 3_000_000


class ResourceExhausted(Exception):
    pass


@dataclass
class Limits:
    time_limit: Optional[float] = None  # seconds
    node_cap: Optional[int] = DEFAULT_NODE_CAP


@dataclass
class ReachResult:
    algorithm: str
    state_symmetries: bool
    reached: Function
    representatives: int
    status: str = COMPLETE
    reason: str = ""
    rounds: int = 0
    images: int = 0
    alpha_calls: int = 0
    tau_passes: int = 0
    relations_built: int = 0
    filtered: int = 0
    peak_live: int = 0
    wall_ms: float = 0.0
    phase_ms: Dict[str, float] = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return self.status == COMPLETE


class _Run:
    """Counters, phase timers and resource checks for one run."""

    def __init__(self, ctx: SymContext, limits: Optional[Limits]) -> None:
        self.ctx = ctx
        self.bdd = ctx.bdd
        self.limits = limits or Limits()
        self.start = time.perf_counter()
        self.phase = {"image": 0.0, "alpha": 0.0, "filter": 0.0, "relation": 0.0}
        self.images = 0
        self.alpha_calls = 0
        self.relations = 0
        self.filtered = 0
        self.passes0 = ctx.tau_passes

    def check(self) -> None:
        lim = self.limits
        if lim.time_limit is not None and time.perf_counter() - self.start > lim.time_limit:
            raise ResourceExhausted(f"time limit of {lim.time_limit:g} s exceeded")
        size = self.bdd.checkpoint()
        if lim.node_cap is not None and size > lim.node_cap:
            if self.bdd.collect() > lim.node_cap:
                raise ResourceExhausted(f"node cap of {lim.node_cap} exceeded")

    def image(self, rel: Function, states: Function) -> Function:
        t0 = time.perf_counter()
        r = image(self.ctx.enc, rel, states)
        self.phase["image"] += time.perf_counter() - t0
        self.images += 1
        return r

    def alpha(self, states: Function) -> Function:
        t0 = time.perf_counter()
        r = self.ctx.alpha(states)
        self.phase["alpha"] += time.perf_counter() - t0
        self.alpha_calls += 1
        return r

    def relation(self, type_name: str, j: int) -> Function:
        t0 = time.perf_counter()
        r = self.ctx.enc.relation(type_name, j)
        self.phase["relation"] += time.perf_counter() - t0
        self.relations += 1
        return r

    def result(self, algorithm: str, sym: bool, reached: Function, rounds: int,
               status: str = COMPLETE, reason: str = "") -> ReachResult:
        self.bdd.live_nodes()
        return ReachResult(
            algorithm=algorithm, state_symmetries=sym, reached=reached,
            representatives=self.ctx.enc.count(reached), status=status, reason=reason,
            rounds=rounds, images=self.images, alpha_calls=self.alpha_calls,
            tau_passes=self.ctx.tau_passes - self.passes0,
            relations_built=self.relations, filtered=self.filtered,
            peak_live=self.bdd.peak_live,
            wall_ms=(time.perf_counter() - self.start) * 1000.0,
            phase_ms={k: v * 1000.0 for k, v in self.phase.items()})


def image(enc: Encoder, rel: Function, states: Function) -> Function:
    """Successors of ``states`` under ``rel``, over the current variables."""
    bdd = enc.bdd
    nxt = bdd.and_exists(states, rel, enc.layout.current)
    return bdd.rename_monotone(nxt, enc.layout.next_to_current())


def _context(model_or_ctx, bdd: Optional[BDD] = None) -> SymContext:
    if isinstance(model_or_ctx, SymContext):
        return model_or_ctx
    return SymContext(Encoder(model_or_ctx, bdd=bdd))


def reach_monolithic(model, limits: Optional[Limits] = None) -> ReachResult:
    """Fixpoint of ``Z = alpha(Init) | alpha(Image(Z))`` with one relation
    holding every transition of every instance.

    ``model`` is a :class:`Model` or a prepared :class:`SymContext`.
    The image is taken of the newly added representatives only, which
    yields the same iterates since image and alpha distribute over union.
    """
    ctx = _context(model)
    run = _Run(ctx, limits)
    init = run.alpha(ctx.enc.initial())
    reached = init
    rounds = 0
    try:
        t0 = time.perf_counter()
        rel = ctx.enc.full_relation()
        run.phase["relation"] += time.perf_counter() - t0
        run.relations += 1
        run.check()
        frontier = init
        while not frontier.is_false:
            rounds += 1
            succ = run.alpha(run.image(rel, frontier))
            frontier = succ - reached
            reached = reached | frontier
            run.check()
    except ResourceExhausted as e:
        return run.result("mono", False, reached, rounds, EXHAUSTED, str(e))
    return run.result("mono", False, reached, rounds)


def state_symmetry_filter(ctx: SymContext, to_explore: List[List[Function]],
                          i: int, j: int) -> int:
    """Drop from ``to_explore[i][j-1]`` the states in which instances
    ``j-1`` and ``j`` (0-based) of type ``i`` share a local state and no
    id-sensitive variable of that type points at either.

    Returns 1 if anything was removed, else 0.
    """
    if j == 0:
        return 0
    t = ctx.model.types[i].name
    enc = ctx.enc
    pointed = ctx.bdd.false
    for g in ctx.model.id_vars_for(t):
        pointed = pointed | enc.var_eq(g.name, j + 1) | enc.var_eq(g.name, j)
    before = to_explore[i][j - 1]
    symm = (before - pointed) & ctx.equal_locals(t, j, j + 1)
    if symm.is_false:
        return 0
    to_explore[i][j - 1] = before - symm
    return 1


def reach_componentwise(model, use_state_symmetries: bool = False,
                        limits: Optional[Limits] = None,
                        on_round=None) -> ReachResult:
    """Component-wise exploration with on-the-fly instance relations.

    Each instance fully explores its pending states before the next
    instance runs; only one instance relation is alive at a time. New
    representatives are handed to every other instance afterwards.
    ``on_round`` is called with the reached set after every round.
    """
    ctx = _context(model)
    run = _Run(ctx, limits)
    types = ctx.model.types
    init = run.alpha(ctx.enc.initial())
    reached = init
    empty = ctx.bdd.false
    to_explore = [[init] * t.count for t in types]
    rounds = 0
    try:
        finish = False
        while not finish:
            rounds += 1
            for i, t in enumerate(types):
                for j in range(t.count - 1, -1, -1):
                    succ = to_explore[i][j]
                    if not succ.is_false:
                        # an empty frontier makes the build and the
                        # distribution below no-ops, so both are skipped
                        rel = run.relation(t.name, j)
                        new = empty
                        while not succ.is_false:
                            succ = run.image(rel, succ)
                            succ = run.alpha(succ) - new - reached
                            new = new | succ
                            run.check()
                        del rel
                        reached = reached | new
                        for z, tz in enumerate(types):
                            for k in range(tz.count - 1, -1, -1):
                                if k != j or z != i:
                                    to_explore[z][k] = to_explore[z][k] | new
                                else:
                                    to_explore[z][k] = empty
                        del new
                    if use_state_symmetries:
                        t0 = time.perf_counter()
                        run.filtered += state_symmetry_filter(ctx, to_explore, i, j)
                        run.phase["filter"] += time.perf_counter() - t0
                    run.check()
            if on_round is not None:
                on_round(reached)
            finish = all(f.is_false for row in to_explore for f in row)
    except ResourceExhausted as e:
        return run.result("comp", use_state_symmetries, reached, rounds, EXHAUSTED, str(e))
    return run.result("comp", use_state_symmetries, reached, rounds)


@dataclass
class Verdict:
    holds: bool
    witness: Optional[State] = None
    witness_text: str = ""


def check_invariant(enc: Encoder, reached: Function, bad: Function) -> Verdict:
    """Safety check on the representatives; the witness is the
    lexicographically least violating representative."""
    hit = reached & bad
    if hit.is_false:
        return Verdict(True)
    s = enc.decode(enc.bdd.pick(hit))
    return Verdict(False, s, enc.describe(s))
