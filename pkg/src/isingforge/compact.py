"""Pin-free embeddings of small graphs by Clifford elimination.

Put the target vertices on a set D of grid cells and let every other
cell r be summed out with a quarter-turn field chosen so that its linear
phase is 1 ("X" cells) or i ("Y" cells). Summing out such cells is a
Gauss sum: with Gamma the grid adjacency over GF(2) and M = Gamma_RR +
diag(y) invertible, the surviving couplings on D are

    Gamma_DD + Gamma_DR M^{-1} Gamma_RD   (off-diagonal part)

plus quarter-turn fields and a constant. The search below tries small
rectangles, cell sets D and X/Y labels until that graph is isomorphic to
the target, then fits the fields and the constant by enumeration.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from itertools import combinations

import networkx as nx
import numpy as np

from . import gf2
from .fields import QUARTER, ComplexField, Prefactor
from .graph import GridIsing, IsingGraph

__all__ = ["CompactEmbedding", "find_compact_embedding", "compact_grid"]


@dataclass(frozen=True)
class CompactEmbedding:
    width: int
    height: int
    cell_of: dict           # target vertex -> (x, y)
    labels: dict            # summed cell (x, y) -> 0 (X) or 1 (Y)


def _grid_adjacency(W: int, H: int) -> list[int]:
    adj = [0] * (W * H)
    for y in range(H):
        for x in range(W):
            i = y * W + x
            if x + 1 < W:
                adj[i] |= 1 << (i + 1)
                adj[i + 1] |= 1 << i
            if y + 1 < H:
                adj[i] |= 1 << (i + W)
                adj[i + W] |= 1 << i
    return adj


def _reduced_graph(adj: list[int], D: tuple[int, ...], R: tuple[int, ...], y: int):
    """Edges among D after summing R with labels y, or None if M is singular."""
    r_index = {c: k for k, c in enumerate(R)}

    def r_bits(mask: int) -> int:
        out = 0
        for c, k in r_index.items():
            if mask >> c & 1:
                out |= 1 << k
        return out

    rows = [r_bits(adj[c]) | ((y >> k & 1) << k) for k, c in enumerate(R)]
    inv = gf2.inverse(rows, len(R)) if R else []
    if inv is None:
        return None
    dr = [r_bits(adj[d]) for d in D]
    vec = []
    for bits in dr:
        acc = 0
        k = 0
        b = bits
        while b:
            if b & 1:
                acc ^= inv[k]
            b >>= 1
            k += 1
        vec.append(acc)
    edges = []
    for a in range(len(D)):
        for b in range(a + 1, len(D)):
            direct = adj[D[a]] >> D[b] & 1
            q = bin(vec[a] & dr[b]).count("1") & 1
            if direct ^ q:
                edges.append((a, b))
    return edges


def _shapes(n: int, max_cells: int):
    out = []
    for W in range(1, max_cells + 1):
        for H in range(W, max_cells + 1):
            if n <= W * H <= max_cells:
                out.append((W * H, W, H))
    return sorted(out)


def find_compact_embedding(g: IsingGraph, max_cells: int = 12, budget: int = 50_000
                           ) -> CompactEmbedding | None:
    """Smallest rectangle (by area) found that realises g pin-free, or None."""
    verts = g.vertices
    n = len(verts)
    if n == 0:
        return None
    target = nx.Graph()
    target.add_nodes_from(range(n))
    pos = {v: i for i, v in enumerate(verts)}
    target.add_edges_from((pos[u], pos[v]) for u, v in g.edges())
    degs = sorted(d for _, d in target.degree())
    m = target.number_of_edges()
    tried = 0
    for _, W, H in _shapes(n, max_cells):
        adj = _grid_adjacency(W, H)
        cells = range(W * H)
        for D in combinations(cells, n):
            R = tuple(c for c in cells if c not in D)
            for y in range(1 << len(R)):
                tried += 1
                if tried > budget:
                    return None
                edges = _reduced_graph(adj, D, R, y)
                if edges is None or len(edges) != m:
                    continue
                cand = nx.Graph()
                cand.add_nodes_from(range(n))
                cand.add_edges_from(edges)
                if sorted(d for _, d in cand.degree()) != degs:
                    continue
                matcher = nx.algorithms.isomorphism.GraphMatcher(cand, target)
                if not matcher.is_isomorphic():
                    continue
                mapping = matcher.mapping  # cand index -> target index
                cell_of = {}
                for a, t in mapping.items():
                    c = D[a]
                    cell_of[verts[t]] = (c % W, c // W)
                labels = {(c % W, c // W): (y >> k & 1) for k, c in enumerate(R)}
                return CompactEmbedding(W, H, cell_of, labels)
    return None


def _small_quarter(k: int, period: int = 4) -> int:
    """Representative of k modulo ``period`` with the smallest magnitude (ties positive).

    Moving a summed cell's field by i*pi only flips the sign of its sum.
    """
    k %= period
    return k - period if k > period // 2 else k


def compact_grid(g: IsingGraph, emb: CompactEmbedding) -> tuple[GridIsing, Prefactor]:
    """Build the grid for an embedding and fit fields and constant exactly.

    Returns (grid, P) with Z(g) = P * Z(grid) as a pure grid partition
    function; the grid's own prefactor is left at one.
    """
    W, H = emb.width, emb.height
    n_cells = W * H
    deg = [0] * n_cells
    adj = _grid_adjacency(W, H)
    for c in range(n_cells):
        deg[c] = bin(adj[c]).count("1")
    quarter = [0] * n_cells
    summed = {}
    for (x, y), label in emb.labels.items():
        c = y * W + x
        quarter[c] = _small_quarter(-deg[c] - label)
        summed[c] = True
    verts = g.vertices
    d_cells = [emb.cell_of[v][1] * W + emb.cell_of[v][0] for v in verts]
    r_cells = [c for c in range(n_cells) if c in summed]

    # Enumerate all 2^(|D|+|R|) configurations: D fields zero, R fields fixed.
    n_d, n_r = len(d_cells), len(r_cells)
    order = d_cells + r_cells
    idx = np.arange(1 << (n_d + n_r), dtype=np.int64)
    spins = 1 - 2 * ((idx[:, None] >> np.arange(n_d + n_r)) & 1)
    col = {c: k for k, c in enumerate(order)}
    energy = np.zeros(len(idx), dtype=np.complex128)
    for c in r_cells:
        energy += 1j * QUARTER * quarter[c] * spins[:, col[c]]
    for c in range(n_cells):
        for nb in range(c + 1, n_cells):
            if adj[c] >> nb & 1:
                energy += 1j * QUARTER * spins[:, col[c]] * spins[:, col[nb]]
    weights = np.exp(energy).reshape(1 << n_r, 1 << n_d).sum(axis=0)
    d_spins = spins[: 1 << n_d, :n_d]
    pos = {v: i for i, v in enumerate(verts)}
    target_e = np.zeros(1 << n_d, dtype=np.complex128)
    for u, v in g.edges():
        target_e += 1j * QUARTER * d_spins[:, pos[u]] * d_spins[:, pos[v]]
    rho = weights / np.exp(target_e)
    base = rho[0]
    if abs(base) < 1e-9:
        raise ValueError("degenerate compact embedding")
    shifts = []
    for k in range(n_d):
        ratio = rho[1 << k] / base  # = e^{-2 a_k}
        a = -0.5 * cmath.log(ratio)
        q = a.imag / QUARTER
        if abs(a.real) > 1e-9 or abs(q - round(q)) > 1e-9:
            raise ValueError("compact embedding fields are not quarter turns")
        shifts.append(int(round(q)))
    model = np.exp(1j * QUARTER * (d_spins @ np.array(shifts, dtype=np.float64)))
    c_const = base / model[0]
    if not np.allclose(rho, c_const * model, rtol=1e-12, atol=1e-12 * abs(c_const)):
        raise ValueError("compact embedding does not factor")

    fields = [[ComplexField() for _ in range(W)] for _ in range(H)]
    for c in r_cells:
        fields[c // W][c % W] = ComplexField.quarter(quarter[c]).canonical()
    for v, c, k in zip(verts, d_cells, shifts):
        fields[c // W][c % W] = g.field(v).shift(-k).canonical()
    grid = GridIsing(W, H, fields)
    return grid, Prefactor.from_complex(1 / c_const)
