"""Small models shipped with the package, in the model text format."""

from __future__ import annotations

from .dsl import parse_model
from .model import SpinModel

__all__ = ["BUNDLED", "bundled_model", "bundled_names"]

BUNDLED = {
    "triangle": """\
# three spins on a triangle
site a spin; site b spin; site c spin
term {a b} 0.3+0.2i
term {b c} -0.4+0.1i
term {a c} 0.25-0.3i
""",
    "strip": """\
# two triangles sharing the edge b-c
site a spin; site b spin; site c spin; site d spin
term {a b} 0.3+0.1i
term {a c} -0.2+0.25i
term {b c} 0.15-0.2i
term {b d} 0.4
term {c d} -0.1-0.35i
""",
    "hexagon": """\
# six spins on a ring
site a spin; site b spin; site c spin; site d spin; site e spin; site f spin
term {a b} 0.3+0.1i
term {b c} -0.2+0.2i
term {c d} 0.1-0.3i
term {d e} 0.25
term {e f} -0.15-0.1i
term {f a} 0.2+0.4i
""",
    "star3": """\
# three-spin interactions on the six triangles around a centre spin
site o spin
site a spin; site b spin; site c spin; site d spin; site e spin; site f spin
term {o a b} 0.2+0.1i
term {o b c} -0.3+0.2i
term {o c d} 0.1-0.25i
term {o d e} 0.35
term {o e f} -0.2-0.1i
term {o f a} 0.15+0.3i
""",
    "potts4-chain": """\
# three four-state Potts sites in a chain
site p potts4; site q potts4; site r potts4
term delta {p q} 0.5+0.2i
term delta {q r} -0.3+0.4i
""",
    "potts3-chain": """\
# three three-state Potts sites in a chain
site p potts3; site q potts3; site r potts3
term delta {p q} 0.4-0.3i
term delta {q r} 0.2+0.5i
""",
}


def bundled_names() -> list[str]:
    return list(BUNDLED)


def bundled_model(name: str) -> SpinModel:
    return parse_model(BUNDLED[name])
