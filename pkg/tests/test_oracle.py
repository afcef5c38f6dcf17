import math
from collections import Counter

import pytest

from symred import gen_mutex, gen_readers_writers, oracle
from symred.model import State, parse_model

from conftest import mstate

PAIR = parse_model("model pair\ntype P count 2 locals a b init a\n")
ABC = parse_model("model abc\ntype P count 3 locals A B C init A\n"
                  "global tok idsensitive P init any\n")
ABC_PLAIN = parse_model("model abc_plain\ntype P count 3 locals A B C init A\n")


class TestComponentPerm:
    def test_equal_locals_fixed(self):
        s = State((), ((0, 0),))
        assert oracle.apply_component_perm(PAIR, s, {"P": (2, 1)}) == s

    def test_identity(self):
        m = gen_mutex(3)
        s = mstate("TCN", 2)
        assert oracle.apply_component_perm(m, s, {"Proc": (1, 2, 3)}) == s
        assert oracle.apply_component_perm(m, s, {}) == s

    def test_swap_moves_id(self):
        m = gen_mutex(2)
        assert oracle.apply_component_perm(m, mstate("TN", 1), {"Proc": (2, 1)}) == mstate("NT", 2)

    def test_cycle(self):
        m = gen_mutex(3)
        # instance 1 -> 2, 2 -> 3, 3 -> 1
        got = oracle.apply_component_perm(m, mstate("NTC", 3), {"Proc": (2, 3, 1)})
        assert got == mstate("CNT", 1)

    def test_composition(self):
        m = gen_mutex(3)
        s = mstate("NTC", 2)
        p, q = (2, 3, 1), (1, 3, 2)
        pq = tuple(p[q[i] - 1] for i in range(3))
        step = oracle.apply_component_perm(m, s, {"Proc": q})
        assert oracle.apply_component_perm(m, step, {"Proc": p}) == \
            oracle.apply_component_perm(m, s, {"Proc": pq})


class TestDataPerm:
    def test_contrast_with_component(self):
        s = State((), ((0, 0),))
        assert oracle.data_perm_action(PAIR, s, {"P": (1, 0)}) == State((), ((1, 1),))

    def test_identity(self):
        s = State((), ((0, 1),))
        assert oracle.data_perm_action(PAIR, s, {"P": (0, 1)}) == s

    def test_involution(self):
        for s in oracle.all_states(PAIR):
            once = oracle.data_perm_action(PAIR, s, {"P": (1, 0)})
            assert oracle.data_perm_action(PAIR, once, {"P": (1, 0)}) == s


class TestCanonicalize:
    def test_max_value_rule(self):
        s = State((2,), ((0, 1, 1),))
        assert oracle.canonicalize_explicit(ABC, s) == State((3,), ((0, 1, 1),))

    def test_canonical_is_fixed(self):
        s = State((3,), ((0, 1, 1),))
        assert oracle.canonicalize_explicit(ABC, s) == s

    def test_distinct_locals(self):
        assert oracle.canonicalize_explicit(ABC_PLAIN, State((), ((2, 0, 1),))) == \
            State((), ((0, 1, 2),))

    def test_unique_sorted_element(self, synth):
        # the refined tie-break gives every orbit exactly one sorted member
        for s in oracle.all_states(synth):
            assert sum(oracle.is_sorted(synth, x) for x in oracle.orbit(synth, s)) == 1

    def test_literal_rule_is_ambiguous_with_two_ids(self, synth):
        # with the unrefined rule both orders of (A,A) with g=1, h=2 would count as sorted
        s = State((1, 2), ((0, 0, 1, 2),))
        t = oracle.apply_component_perm(synth, s, {"P": (2, 1, 3, 4)})
        assert t == State((2, 1), ((0, 0, 1, 2),))
        assert oracle.is_sorted(synth, s) != oracle.is_sorted(synth, t)

    def test_capacity_refusal(self):
        with pytest.raises(oracle.OracleError):
            oracle.check_capacity(gen_mutex(11))
        oracle.check_capacity(gen_mutex(10))


class TestEnumerate:
    def test_mutex2_has_asymmetric_pairs(self):
        full = oracle.enumerate_reachable(gen_mutex(2))
        assert mstate("TN", 1) in full and mstate("NT", 1) in full
        assert len(full) == 12

    def test_no_commands(self):
        m = parse_model("model idle\ntype P count 2 locals A B init A\n"
                        "global tok idsensitive P init any\n")
        assert oracle.enumerate_reachable(m) == set(oracle.initial_states(m))
        assert len(oracle.initial_states(m)) == 2

    def test_readers_writers_exclusive(self):
        m = gen_readers_writers(1, 1)
        full = oracle.enumerate_reachable(m)
        assert State((), ((2,), (2,))) not in full
        assert oracle.check_safety(m, full, m.properties[0].bad) is None

    def test_limit(self):
        with pytest.raises(oracle.OracleError):
            oracle.enumerate_reachable(gen_mutex(4), limit=50)

    def test_unguarded_mutant_violates(self):
        m = gen_mutex(3, enter_guard=False)
        bad = oracle.check_safety(m, oracle.enumerate_reachable(m), m.properties[0].bad)
        assert bad is not None and bad.locals[0].count(2) >= 2

    def test_single_process(self):
        # N, T, C with the only possible token value
        assert oracle.enumerate_reachable(gen_mutex(1)) == {
            mstate("N", 1), mstate("T", 1), mstate("C", 1)}


@pytest.mark.parametrize("model", [gen_mutex(3), gen_readers_writers(2, 2)],
                         ids=["mutex3", "rw22"])
def test_orbit_partition(model):
    full = oracle.enumerate_reachable(model)
    cmap = oracle.canonical_map(model, full)
    order = model.group_order()
    sizes = Counter(cmap[s] for s in full)
    for rep, k in sizes.items():
        orb = oracle.orbit(model, rep)
        assert orb <= full  # reachable sets are symmetric
        assert k == len(orb)
        assert order % k == 0
    assert sum(sizes.values()) == len(full)


@pytest.mark.parametrize("model", [gen_mutex(n) for n in (2, 3, 4)]
                         + [gen_readers_writers(2, 2), gen_readers_writers(3, 2)],
                         ids=["mutex2", "mutex3", "mutex4", "rw22", "rw32"])
def test_quotient_bound(model):
    full = oracle.enumerate_reachable(model)
    canon = oracle.canonical_set(model, full)
    assert len(canon) * model.group_order() >= len(full)
    assert len(canon) <= len(full)


def test_group_order():
    assert gen_readers_writers(3, 2).group_order() == math.factorial(3) * math.factorial(2)
