import pytest

from symred import BDD, Encoder, SymContext, gen_mutex, gen_readers_writers
from symred.model import parse_model

SYNTH_SOURCE = """\
model synth
type P count 4 locals A B C init A
global g idsensitive P init any
global h idsensitive P init any
command P a from A to B update g := self
command P b from B to C guard h == self update h := any
command P c from C to A guard g == self update g := any, h := self
property no_two_c bad count(P, C) >= 2
"""


@pytest.fixture
def mgr():
    return BDD(8)


@pytest.fixture(scope="session")
def synth():
    return parse_model(SYNTH_SOURCE)


def context(model):
    return SymContext(Encoder(model))


@pytest.fixture
def mutex3_ctx():
    return context(gen_mutex(3))


@pytest.fixture
def mutex2_ctx():
    return context(gen_mutex(2))


@pytest.fixture
def rw22_ctx():
    return context(gen_readers_writers(2, 2))


MUTEX = {"N": 0, "T": 1, "C": 2}


def mstate(locs, tok):
    """Mutex state from a local-state string such as "TNC"."""
    from symred.model import State
    return State((tok,), (tuple(MUTEX[c] for c in locs),))


def transitions(enc, rel):
    """Decoded (source, target) pairs of a relation over current+next bits."""
    lay = enc.layout
    out = set()
    for a in enc.bdd.iter_sat(rel, range(lay.nvars)):
        nxt = {b: a[b + 1] for b in lay.current}
        out.add((enc.decode(a), enc.decode(nxt)))
    return out
