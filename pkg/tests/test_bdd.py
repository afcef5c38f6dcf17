import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symred.bdd import BDD, BDDError, LayoutError

NV = 6


def random_tree(rng, depth):
    if depth == 0 or rng.random() < 0.2:
        k = rng.randrange(NV + 2)
        if k == NV:
            return ("const", rng.random() < 0.5)
        if k == NV + 1:
            return ("nvar", rng.randrange(NV))
        return ("var", k)
    op = rng.choice(["and", "or", "xor", "diff", "not"])
    if op == "not":
        return ("not", random_tree(rng, depth - 1))
    return (op, random_tree(rng, depth - 1), random_tree(rng, depth - 1))


def evaluate(tree, x):
    kind = tree[0]
    if kind == "const":
        return tree[1]
    if kind == "var":
        return x[tree[1]]
    if kind == "nvar":
        return not x[tree[1]]
    if kind == "not":
        return not evaluate(tree[1], x)
    a, b = evaluate(tree[1], x), evaluate(tree[2], x)
    return {"and": a and b, "or": a or b, "xor": a != b, "diff": a and not b}[kind]


def build(bdd, tree):
    kind = tree[0]
    if kind == "const":
        return bdd.true if tree[1] else bdd.false
    if kind == "var":
        return bdd.var(tree[1])
    if kind == "nvar":
        return bdd.nvar(tree[1])
    if kind == "not":
        return ~build(bdd, tree[1])
    return bdd.apply(kind, build(bdd, tree[1]), build(bdd, tree[2]))


def table(bdd, f, n=NV):
    return tuple(bdd.eval(f, dict(enumerate(x)))
                 for x in itertools.product((False, True), repeat=n))


def tree_table(tree):
    return tuple(evaluate(tree, x) for x in itertools.product((False, True), repeat=NV))


def random_function(bdd, rng, n=NV):
    """A random function given by its truth table (minterm disjunction)."""
    f = bdd.false
    for x in itertools.product((False, True), repeat=n):
        if rng.random() < 0.4:
            f = f | bdd.cube(dict(enumerate(x)))
    return f


class TestTerms:
    def test_true_and_false(self, mgr):
        assert mgr.apply("and", mgr.true, mgr.false) == mgr.false

    def test_var_is_canonical(self, mgr):
        assert mgr.var(3) == mgr.var(3)
        assert mgr.var(3).node == mgr.var(3).node

    def test_excluded_middle(self, mgr):
        assert (mgr.nvar(0) | mgr.var(0)) == mgr.true

    def test_out_of_range(self, mgr):
        with pytest.raises(LayoutError):
            mgr.var(8)
        with pytest.raises(LayoutError):
            mgr.nvar(-1)


class TestApply:
    def test_contradiction(self, mgr):
        f = mgr.var(1) ^ mgr.var(4)
        assert mgr.apply("and", f, mgr.negate(f)) == mgr.false

    def test_or_identity(self, mgr):
        f = mgr.var(1) & mgr.nvar(2)
        assert mgr.apply("or", f, mgr.false) == f

    def test_self_difference(self, mgr):
        f = mgr.var(0) | mgr.var(5)
        assert mgr.apply("diff", f, f) == mgr.false

    def test_diff_is_and_not(self, mgr):
        f, g = mgr.var(0) | mgr.var(3), mgr.var(3) ^ mgr.var(5)
        assert (f - g) == (f & ~g)

    def test_cross_manager(self, mgr):
        other = BDD(8)
        with pytest.raises(BDDError):
            mgr.apply("and", mgr.var(0), other.var(0))

    def test_unknown_operator(self, mgr):
        with pytest.raises(BDDError):
            mgr.apply("nand", mgr.var(0), mgr.var(1))

    def test_no_truth_value(self, mgr):
        with pytest.raises(BDDError):
            bool(mgr.var(0))


class TestQuantify:
    def test_exists_single(self, mgr):
        assert mgr.exists(mgr.var(2), {2}) == mgr.true

    def test_exists_empty(self, mgr):
        f = mgr.var(1) ^ mgr.var(2)
        assert mgr.exists(f, set()) == f

    def test_exists_independent_conjunct(self, mgr):
        assert mgr.exists(mgr.var(1) & mgr.var(2), {2}) == mgr.var(1)

    def test_exists_support_disjoint(self):
        bdd = BDD(NV)
        rng = random.Random(3)
        for _ in range(30):
            f = random_function(bdd, rng)
            vs = set(rng.sample(range(NV), rng.randrange(NV + 1)))
            assert not (bdd.support(bdd.exists(f, vs)) & vs)

    def test_and_exists_trivial(self, mgr):
        f = mgr.var(0) | mgr.var(6)
        assert mgr.and_exists(f, mgr.true, set()) == f
        assert mgr.and_exists(mgr.var(0), mgr.var(0), {0}) == mgr.true

    def test_and_exists_matches_two_steps(self):
        bdd = BDD(NV)
        rng = random.Random(11)
        for _ in range(60):
            f, g = random_function(bdd, rng), random_function(bdd, rng)
            vs = set(rng.sample(range(NV), rng.randrange(NV + 1)))
            assert bdd.and_exists(f, g, vs) == bdd.exists(f & g, vs)

    def test_and_exists_brute_force(self):
        # semantics of exists, checked against enumeration of the witnesses
        bdd = BDD(4)
        rng = random.Random(5)
        for _ in range(20):
            f, g = random_function(bdd, rng, 4), random_function(bdd, rng, 4)
            r = bdd.and_exists(f, g, {1, 3})
            for x in itertools.product((False, True), repeat=4):
                want = False
                for b1, b3 in itertools.product((False, True), repeat=2):
                    y = {0: x[0], 1: b1, 2: x[2], 3: b3}
                    want = want or (bdd.eval(f, y) and bdd.eval(g, y))
                assert bdd.eval(r, dict(enumerate(x))) == want


class TestPermute:
    def test_single_rename(self, mgr):
        assert mgr.permute(mgr.var(0), {0: 1, 1: 0}) == mgr.var(1)

    def test_identity(self, mgr):
        f = mgr.var(0) & mgr.var(3) | mgr.nvar(7)
        assert mgr.permute(f, {}) == f
        assert mgr.permute(f, {2: 2, 5: 5}) == f

    def test_inverse_restores(self):
        bdd = BDD(NV)
        rng = random.Random(7)
        for _ in range(30):
            perm = list(range(NV))
            rng.shuffle(perm)
            m = dict(enumerate(perm))
            inv = {v: k for k, v in m.items()}
            f = random_function(bdd, rng)
            assert bdd.permute(bdd.permute(f, m), inv) == f

    def test_semantics(self):
        bdd = BDD(NV)
        rng = random.Random(8)
        for _ in range(20):
            perm = list(range(NV))
            rng.shuffle(perm)
            m = dict(enumerate(perm))
            f = random_function(bdd, rng)
            g = bdd.permute(f, m)
            for x in itertools.product((False, True), repeat=NV):
                xs = dict(enumerate(x))
                # g reads position m[i] where f read position i
                assert bdd.eval(g, xs) == bdd.eval(f, {i: xs[m[i]] for i in range(NV)})

    def test_group_action(self):
        bdd = BDD(NV)
        rng = random.Random(9)
        for _ in range(20):
            p1, p2 = list(range(NV)), list(range(NV))
            rng.shuffle(p1)
            rng.shuffle(p2)
            m1, m2 = dict(enumerate(p1)), dict(enumerate(p2))
            comp = {i: m1[m2[i]] for i in range(NV)}
            f = random_function(bdd, rng)
            assert bdd.permute(f, comp) == bdd.permute(bdd.permute(f, m2), m1)

    def test_rejects_non_bijection(self, mgr):
        with pytest.raises(BDDError):
            mgr.permute(mgr.var(0), {0: 1, 1: 1})


class TestCount:
    def test_full_cube(self, mgr):
        assert mgr.count(mgr.true, {0, 1}) == 4

    def test_false(self, mgr):
        assert mgr.count(mgr.false, {0, 1, 5}) == 0

    def test_half(self, mgr):
        assert mgr.count(mgr.var(0), {0, 1, 2}) == 4

    def test_support_escapes(self, mgr):
        with pytest.raises(BDDError):
            mgr.count(mgr.var(4), {0, 1})

    def test_matches_enumeration(self):
        bdd = BDD(NV)
        rng = random.Random(12)
        for _ in range(20):
            f = random_function(bdd, rng)
            assert bdd.count(f, range(NV)) == sum(table(bdd, f))
            assert bdd.count(f, range(NV)) == len(list(bdd.iter_sat(f, range(NV))))


class TestCanonicity:
    def test_random_term_trees(self):
        bdd = BDD(NV)
        rng = random.Random(2024)
        by_table = {}
        for _ in range(1000):
            tree = random_tree(rng, 5)
            f = build(bdd, tree)
            tt = tree_table(tree)
            assert table(bdd, f) == tt
            if tt in by_table:
                assert by_table[tt] == f.node
            else:
                by_table[tt] = f.node
        # distinct functions never share a handle
        assert len(set(by_table.values())) == len(by_table)

    def test_table_invariants(self):
        bdd = BDD(NV)
        rng = random.Random(1)
        keep = [build(bdd, random_tree(rng, 4)) for _ in range(200)]
        seen = set()
        for u in range(2, len(bdd._var)):
            key = (bdd._var[u], bdd._lo[u], bdd._hi[u])
            if bdd._var[u] == bdd.nvars + 1:
                continue
            assert bdd._lo[u] != bdd._hi[u]
            assert key not in seen
            seen.add(key)
        assert keep

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.booleans(), min_size=16, max_size=16),
           st.lists(st.booleans(), min_size=16, max_size=16))
    def test_equal_tables_equal_handles(self, t1, t2):
        bdd = BDD(4)

        def from_table(t):
            f = bdd.false
            for i, x in enumerate(itertools.product((False, True), repeat=4)):
                if t[i]:
                    f = f | bdd.cube(dict(enumerate(x)))
            return f

        f, g = from_table(t1), from_table(t2)
        assert (f == g) == (t1 == t2)


class TestGarbage:
    def test_baseline_after_release(self):
        bdd = BDD(NV)
        rng = random.Random(4)
        fs = [build(bdd, random_tree(rng, 5)) for _ in range(100)]
        assert bdd.live_nodes() > 2
        del fs
        assert bdd.collect() == 2
        assert bdd.live_nodes() == 2

    def test_handles_survive_collection(self):
        bdd = BDD(NV)
        rng = random.Random(6)
        trees = [random_tree(rng, 5) for _ in range(50)]
        fs = [build(bdd, t) for t in trees]
        junk = [build(bdd, random_tree(rng, 5)) for _ in range(50)]
        del junk
        bdd.collect()
        for t, f in zip(trees, fs):
            assert table(bdd, f) == tree_table(t)
        # rebuilding after collection yields the same handles
        for t, f in zip(trees, fs):
            assert build(bdd, t) == f

    def test_peak_monotone(self):
        bdd = BDD(NV)
        rng = random.Random(10)
        peaks = []
        for _ in range(20):
            fs = [build(bdd, random_tree(rng, 5)) for _ in range(rng.randrange(1, 40))]
            bdd.checkpoint()
            bdd.live_nodes()
            peaks.append(bdd.peak_live)
            del fs
            bdd.collect()
            peaks.append(bdd.peak_live)
        assert peaks == sorted(peaks)


def test_pick_is_lexicographically_least():
    bdd = BDD(4)
    rng = random.Random(13)
    for _ in range(30):
        f = random_function(bdd, rng, 4)
        sat = [x for x in itertools.product((False, True), repeat=4)
               if bdd.eval(f, dict(enumerate(x)))]
        a = bdd.pick(f)
        if not sat:
            assert a is None
            continue
        got = tuple(a.get(i, False) for i in range(4))
        assert got == min(sat)
