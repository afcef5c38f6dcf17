"""Symbolic reachability with dynamic symmetry reduction."""
from .bdd import BDD, Function
from .bench import BenchSpec, gen_mutex, gen_readers_writers
from .model import Encoder, Model, State, encode_layout, format_model, parse_model
from .reach import (Limits, ReachResult, check_invariant, image, reach_componentwise,
                    reach_monolithic, state_symmetry_filter)
from .symmetry import SymContext

__version__ = "0.1.0"
