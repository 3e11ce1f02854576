"""Worked example models, kept as model-format text."""

from __future__ import annotations

from functools import lru_cache

from src.formats.model_format import ModelFile, parse_model
from src.models.gst import SymbolicGst
from src.models.kripke import KripkeStructure

G_UNIT = """\
# the unit interval: one dense a-trajectory from the root
gst unit {
  labels a;
  root r;
  edge e1: r -> t [dense a];
}
"""

G_UNIT_TWO = """\
gst unit_two {
  labels a;
  root r;
  edge e1: r -> m [dense a];
  edge e2: m -> t [dense a];
}
"""

G_UNIT_B = """\
gst unit_b {
  labels a, b;
  root r;
  edge e1: r -> t [dense b];
}
"""

G_DENSE = """\
# point-b leaves branching off a dense, co-dense set of the trunk
gst denseattach {
  labels a, b;
  root r;
  edge e1: r -> t [dense a];
  attach e1 {
    edge f1: @ -> u [point b];
  }
}
"""

G_DENSE_ALT = """\
gst denseattach_alt {
  labels a, b;
  root x;
  edge d1: x -> y [dense a];
  attach d1 {
    edge g1: @ -> leaf [point b];
  }
  attach d1 {
    edge g2: @ -> other [point b];
  }
}
"""

G_POINT = """\
gst point {
  labels a;
  root r;
  edge e1: r -> t [point a];
}
"""

G_CHAIN = """\
gst chain {
  labels a, b;
  root r;
  edge e1: r -> v [point a];
  edge e2: v -> w [point b];
}
"""

M = """\
kripke m {
  labels a;
  state s0 init;
  state s1;
  trans s0 -> s0 [D a];
  trans s0 -> s1 [D a];
}
"""

DEADLOCK = """\
kripke deadlock {
  labels a;
  state d init;
}
"""

NO_COMPOSITE = """\
kripke no_composite {
  labels x, y;
  state a init;
  state b;
  state c;
  trans a -> b [P x];
  trans b -> c [P y];
}
"""

NO_INTERMEDIATE = """\
kripke no_intermediate {
  labels x, y;
  state a init;
  state b;
  trans a -> b [P x, P y];
}
"""

MODELS: dict[str, str] = {
    "unit": G_UNIT,
    "unit_two": G_UNIT_TWO,
    "unit_b": G_UNIT_B,
    "denseattach": G_DENSE,
    "denseattach_alt": G_DENSE_ALT,
    "point": G_POINT,
    "chain": G_CHAIN,
    "m": M,
    "deadlock": DEADLOCK,
    "no_composite": NO_COMPOSITE,
    "no_intermediate": NO_INTERMEDIATE,
}

GST_NAMES = ("unit", "unit_two", "unit_b", "denseattach", "denseattach_alt", "point", "chain")


@lru_cache(maxsize=None)
def load(name: str) -> ModelFile:
    return parse_model(MODELS[name])


def gst(name: str) -> SymbolicGst:
    model = load(name).gst
    if model is None:
        raise KeyError(f"{name} is not a gst")
    return model


def kripke(name: str) -> KripkeStructure:
    model = load(name).kripke
    if model is None:
        raise KeyError(f"{name} is not a kripke structure")
    return model
