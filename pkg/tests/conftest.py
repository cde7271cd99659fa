import cmath
import itertools
import math
import random

import pytest

from isingforge.fields import ComplexField
from isingforge.graph import IsingGraph


def naive_z(g: IsingGraph) -> complex:
    """Reference partition function by direct enumeration."""
    free = g.free_vertices()
    total = 0j
    for spins in itertools.product((1, -1), repeat=len(free)):
        s = dict(zip(free, spins))
        for v in g.pinned_vertices():
            s[v] = g.pinned(v)
        e = sum(g.field(v).value * s[v] for v in g.vertices)
        e += sum(1j * math.pi / 4 * s[u] * s[v] for u, v in g.edges())
        total += cmath.exp(e)
    return total


def random_field(rng: random.Random, scale: float = 0.6) -> ComplexField:
    return ComplexField(rng.uniform(-scale, scale), rng.randint(-3, 4), rng.uniform(-0.4, 0.4))


def random_graph(rng: random.Random, n: int, density: float = 0.3) -> IsingGraph:
    g = IsingGraph()
    for i in range(n):
        g.add_vertex(f"v{i}", random_field(rng))
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < density:
            g.add_edge(f"v{i}", f"v{j}")
    return g


def rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


@pytest.fixture
def rng():
    return random.Random(12345)
