"""Built-in benchmark families."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from .model import Model, parse_model

FAMILIES = ("mutex", "readers_writers")


@dataclass(frozen=True)
class BenchSpec:
    family: str
    sizes: Tuple[int, ...]

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown benchmark family {self.family!r}")
        want = 1 if self.family == "mutex" else 2
        if len(self.sizes) != want:
            raise ValueError(f"{self.family} takes {want} size parameter(s)")
        if any(k < 1 for k in self.sizes):
            raise ValueError("benchmark sizes must be at least 1")

    @classmethod
    def parse(cls, text: str) -> "BenchSpec":
        """``mutex:5``, ``readers_writers:3`` (3 readers, 3 writers) or
        ``readers_writers:2,4``. ``rw`` abbreviates ``readers_writers``."""
        family, _, arg = text.partition(":")
        family = family.strip().replace("-", "_")
        if family == "rw":
            family = "readers_writers"
        if not arg:
            raise ValueError(f"missing size in {text!r}")
        try:
            sizes = tuple(int(x) for x in arg.split(","))
        except ValueError:
            raise ValueError(f"bad size in {text!r}") from None
        if family == "readers_writers" and len(sizes) == 1:
            sizes = sizes * 2
        return cls(family, sizes)

    def label(self) -> str:
        return f"{self.family}:{','.join(map(str, self.sizes))}"

    def source(self) -> str:
        if self.family == "mutex":
            return mutex_source(*self.sizes)
        return readers_writers_source(*self.sizes)

    def model(self) -> Model:
        return parse_model(self.source())


def mutex_source(n: int, enter_guard: bool = True) -> str:
    if n < 1:
        raise ValueError("n must be at least 1")
    guard = " guard tok == self" if enter_guard else ""
    name = "mutex" if enter_guard else "mutex_unguarded"
    return (
        f"model {name}\n"
        f"type Proc count {n} locals N T C init N\n"
        "global tok idsensitive Proc init any\n"
        "command Proc try from N to T\n"
        f"command Proc enter from T to C{guard}\n"
        "command Proc leave from C to N update tok := any\n"
        "property mutex_safe bad count(Proc, C) >= 2\n"
    )


def readers_writers_source(r: int, w: int) -> str:
    if r < 1 or w < 1:
        raise ValueError("r and w must be at least 1")
    return (
        "model readers_writers\n"
        f"type Reader count {r} locals idle trying reading init idle\n"
        f"type Writer count {w} locals idle trying writing init idle\n"
        "command Reader try from idle to trying\n"
        "command Reader read from trying to reading guard count(Writer, writing) == 0\n"
        "command Reader done from reading to idle\n"
        "command Writer try from idle to trying\n"
        "command Writer write from trying to writing"
        " guard count(Reader, reading) == 0 && count_others(Writer, writing) == 0\n"
        "command Writer done from writing to idle\n"
        "property exclusive bad count(Writer, writing) >= 1"
        " && (count(Reader, reading) >= 1 || count(Writer, writing) >= 2)\n"
    )


def gen_mutex(n: int, enter_guard: bool = True) -> Model:
    """Processes N -> T -> C -> N; entering needs the token, leaving
    hands it to an arbitrary process."""
    return parse_model(mutex_source(n, enter_guard))


def gen_readers_writers(r: int, w: int) -> Model:
    return parse_model(readers_writers_source(r, w))
