"""Exact complex partition functions by enumeration and by row transfer.

Every enumeration is cut into fixed blocks of 2^16 configurations. Blocks
may be evaluated on several threads, but their partial sums are always
combined in block-index order, so the result does not depend on how the
work was scheduled.
"""

from __future__ import annotations

import cmath
import heapq
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import gf2
from .errors import CapExceededError
from .fields import QUARTER, Prefactor
from .graph import ConstraintSystem, GridIsing, IsingGraph
from .model import SpinModel

__all__ = [
    "DEFAULT_CAP",
    "BLOCK_BITS",
    "ZReport",
    "Verdict",
    "exact_z_model",
    "exact_z_ising",
    "exact_z_constrained",
    "transfer_z",
    "eliminate_z",
    "ELIMINATION_WIDTH_CAP",
    "check_equivalence",
]

DEFAULT_CAP = 28
BLOCK_BITS = 16
TRANSFER_WIDTH_CAP = 24
ELIMINATION_WIDTH_CAP = 22

# (-i)^d for d = 0..3: phase of an edge pattern with d disagreeing bonds.
_MINUS_I_POWERS = np.array([1, -1j, -1, 1j], dtype=np.complex128)


@dataclass(frozen=True)
class ZReport:
    """A partition function stored as log|Z| and arg Z."""

    log_abs: float
    phase: float
    n_configs: int
    method: str
    elapsed: float = 0.0

    @classmethod
    def from_parts(cls, total: complex, log_scale: complex, n_configs: int, method: str,
                   elapsed: float = 0.0) -> "ZReport":
        """Z = total * exp(log_scale)."""
        if total == 0:
            return cls(-math.inf, 0.0, n_configs, method, elapsed)
        log_abs = math.log(abs(total)) + log_scale.real
        phase = math.remainder(cmath.phase(total) + log_scale.imag, 2 * math.pi)
        return cls(log_abs, phase, n_configs, method, elapsed)

    @property
    def value(self) -> complex:
        if self.log_abs == -math.inf:
            return 0j
        return cmath.rect(math.exp(self.log_abs), self.phase)

    @property
    def is_zero(self) -> bool:
        return self.log_abs == -math.inf

    def __str__(self) -> str:
        z = self.value
        n = self.n_configs
        count = str(n) if n < 1 << 63 else f"2^{n.bit_length() - 1}"
        return f"{z.real!r} {z.imag!r} {count} {self.method} {self.elapsed * 1e3:.3f}"


@dataclass(frozen=True)
class Verdict:
    passed: bool
    rel_error: float

    def __bool__(self) -> bool:
        return self.passed


def _threads(threads: int | None) -> int:
    if threads is None:
        return min(8, os.cpu_count() or 1)
    return max(1, int(threads))


def _run_blocks(fn, n_blocks: int, threads: int | None) -> complex:
    """Evaluate fn(b) for every block and sum the results in block order."""
    if n_blocks == 1:
        return complex(fn(0))
    workers = _threads(threads)
    if workers == 1:
        values = [fn(b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(fn, range(n_blocks)))
    return complex(np.sum(np.asarray(values, dtype=np.complex128)))


def _popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a).astype(np.int64)


def _absorb_pins(g: IsingGraph, index: dict) -> tuple[dict, complex]:
    """Free-spin fields with pinned neighbours folded in, and the constant.

    Quarter turns in the constant are counted as an integer and reduced
    mod 8 before conversion, so large frozen regions cost no precision.
    """
    h = {v: g.field(v).value for v in index}
    turns = 0
    rest = 0j
    for v in g.pinned_vertices():
        s = g.pinned(v)
        f = g.field(v)
        turns += f.quarter_turns * s
        rest += complex(f.real_part, f.residual_imag) * s
        for u in g.neighbors(v):
            if u in index:
                h[u] += 1j * QUARTER * s
            elif g.rank_of(u) > g.rank_of(v):
                turns += s * g.pinned(u)
    return h, rest + 1j * QUARTER * (turns % 8)


# ---------------------------------------------------------------- IsingGraph


def exact_z_ising(g: IsingGraph, cap: int = DEFAULT_CAP, threads: int | None = None) -> ZReport:
    """Sum e^{sum h S + i*pi/4 sum_edges S S'} over all free spins.

    Pinned spins are held at their value. Each configuration's edge factor
    is e^{i*pi/4*|E|} (-i)^d with d the number of disagreeing edges, so the
    kernel only needs integer disagreement counts and one lookup.
    """
    t0 = time.perf_counter()
    free = g.free_vertices()
    n = len(free)
    if n > cap:
        raise CapExceededError(f"{n} free spins exceed the cap of {cap}")
    index = {v: i for i, v in enumerate(free)}

    h, const = _absorb_pins(g, index)
    fields = np.array([h[v] for v in free], dtype=np.complex128)
    edges = [(index[u], index[v]) for u, v in g.edges() if u in index and v in index]

    scale = float(np.sum(np.abs(fields.real)))
    w_plus = np.exp(fields - np.abs(fields.real))
    w_minus = np.exp(-fields - np.abs(fields.real))

    n_low = min(n, BLOCK_BITS)
    n_high = n - n_low
    low_w = np.ones(1, dtype=np.complex128)
    for j in range(n_low):
        low_w = np.concatenate([low_w * w_plus[j], low_w * w_minus[j]])
    x = np.arange(1 << n_low, dtype=np.int64)

    base = np.zeros(1 << n_low, dtype=np.int64)
    high_masks = [0] * n_high
    high_high = []
    for a, b in edges:
        if a < n_low and b < n_low:
            base += ((x >> a) ^ (x >> b)) & 1
        elif a < n_low or b < n_low:
            lo, hi = (a, b) if a < n_low else (b, a)
            high_masks[hi - n_low] |= 1 << lo
        else:
            high_high.append((a - n_low, b - n_low))
    pc = [_popcount(x & m) for m in high_masks]
    for arr in pc:
        base += arr
    flip = [int(bin(m).count("1")) - 2 * arr for m, arr in zip(high_masks, pc)]
    hw_plus = w_plus[n_low:]
    hw_minus = w_minus[n_low:]

    def block(b: int) -> complex:
        acc = base.copy() if b else base
        hw = 1.0 + 0j
        d_hh = 0
        for k in range(n_high):
            if b >> k & 1:
                acc = acc + flip[k]
                hw *= hw_minus[k]
            else:
                hw *= hw_plus[k]
        for a, c in high_high:
            d_hh += (b >> a ^ b >> c) & 1
        if d_hh:
            acc = acc + d_hh
        return hw * np.sum(low_w * _MINUS_I_POWERS[acc & 3])

    total = _run_blocks(block, 1 << n_high, threads)
    log_scale = scale + const + 1j * QUARTER * (len(edges) % 8)
    return ZReport.from_parts(total, log_scale, 1 << n, "brute", time.perf_counter() - t0)


# ---------------------------------------------------------------- SpinModel


def exact_z_model(m: SpinModel, cap: int = DEFAULT_CAP, threads: int | None = None) -> ZReport:
    """Sum exp(sum of terms) over every site assignment, Potts sites over their arity."""
    t0 = time.perf_counter()
    n_configs = m.n_configs
    if n_configs > 1 << cap:
        raise CapExceededError(f"{n_configs} configurations exceed 2^{cap}")
    ids = m.site_ids
    pos = {s: i for i, s in enumerate(ids)}
    radix = [s.arity for s in m.sites]
    terms = []
    shift = 0.0
    for t in m.terms:
        J = t.coupling.value
        terms.append(([pos[s] for s in t.sites], J, t.delta))
        shift += max(J.real, 0.0) if t.delta else abs(J.real)

    block_size = 1 << BLOCK_BITS
    n_blocks = max(1, -(-n_configs // block_size))

    def block(b: int) -> complex:
        start = b * block_size
        idx = np.arange(start, min(start + block_size, n_configs), dtype=np.int64)
        digits = []
        rest = idx
        for r in radix:
            digits.append(rest % r)
            rest = rest // r
        energy = np.full(idx.shape, -shift, dtype=np.complex128)
        for sites, J, delta in terms:
            if delta:
                energy += J * (digits[sites[0]] == digits[sites[1]])
            else:
                prod = np.ones(idx.shape, dtype=np.int64)
                for s in sites:
                    prod *= 1 - 2 * digits[s]
                energy += J * prod
        return np.sum(np.exp(energy))

    total = _run_blocks(block, n_blocks, threads)
    return ZReport.from_parts(total, complex(shift), n_configs, "brute", time.perf_counter() - t0)


# ---------------------------------------------------------------- ConstraintSystem


def exact_z_constrained(sys: ConstraintSystem, cap: int = DEFAULT_CAP,
                        threads: int | None = None) -> ZReport:
    """Z of the original model from its term variables and parity constraints.

    The sum over constraint-satisfying assignments is multiplied by
    2^overcount_exponent, so the result equals Z of the source model.

    Writing S = (-1)^u, the constraints are the homogeneous GF(2) system
    C u = 0, so the admissible assignments are exactly the span of a
    null-space basis and can be listed without rejection.
    """
    t0 = time.perf_counter()
    ids = sys.variable_ids
    k = len(ids)
    pos = {v: i for i, v in enumerate(ids)}
    rows = []
    for c in sys.constraints:
        r = 0
        for v in c:
            r |= 1 << pos[v]
        rows.append(r)
    basis = gf2.null_space(rows, k)
    d = len(basis)
    if d > cap:
        raise CapExceededError(f"{d} free parameters exceed the cap of {cap}")
    fields = np.array([h.value for _, h in sys.variables], dtype=np.complex128)
    scale = float(np.sum(np.abs(fields.real)))
    basis_bits = np.array([[(v >> j) & 1 for j in range(k)] for v in basis],
                          dtype=np.int64).reshape(d, k)
    n_low = min(d, BLOCK_BITS)
    combos = ((np.arange(1 << n_low, dtype=np.int64)[:, None] >> np.arange(n_low)) & 1)
    low_vecs = (combos @ basis_bits[:n_low]) & 1 if k else np.zeros((1 << n_low, 0), np.int64)

    def block(b: int) -> complex:
        high = np.zeros(k, dtype=np.int64)
        for j in range(d - n_low):
            if b >> j & 1:
                high ^= basis_bits[n_low + j]
        u = low_vecs ^ high
        energy = (1 - 2 * u) @ fields - scale
        return np.sum(np.exp(energy))

    total = _run_blocks(block, 1 << (d - n_low), threads)
    log_scale = complex(scale + sys.overcount_exponent * math.log(2))
    return ZReport.from_parts(total, log_scale, 1 << d, "constrained", time.perf_counter() - t0)


# ---------------------------------------------------------------- GridIsing


def transfer_z(grid: GridIsing, width_cap: int = TRANSFER_WIDTH_CAP) -> ZReport:
    """Row-by-row transfer contraction with a 2^W state vector.

    The shorter side is used as the row, rows are normalised as they are
    absorbed and the scale is tracked in log form.
    """
    t0 = time.perf_counter()
    W, H = grid.width, grid.height
    transpose = H < W
    if transpose:
        W, H = H, W
    if W > width_cap:
        raise CapExceededError(f"grid side {W} exceeds the transfer cap of {width_cap}")

    def cell(x: int, y: int):
        return (y, x) if transpose else (x, y)

    w = cmath.exp(1j * QUARTER)
    bond = np.array([[w, w.conjugate()], [w.conjugate(), w]], dtype=np.complex128)
    log_scale = 0j

    def row_vector(y: int) -> tuple[np.ndarray, float]:
        scale = 0.0
        vec = None
        for x in range(W):
            cx, cy = cell(x, y)
            h = grid.field(cx, cy).value
            scale += abs(h.real)
            f = np.array([cmath.exp(h - abs(h.real)), cmath.exp(-h - abs(h.real))])
            if (cx, cy) in grid.fixed:
                f[1] = 0.0
            if vec is None:
                vec = f
            else:
                vec = vec[..., None] * (bond * f[None, :])
        return vec, scale

    psi, s = row_vector(0)
    log_scale += s
    for y in range(1, H):
        for ax in range(W):
            psi = np.tensordot(psi, bond, axes=([0], [0]))
        vec, s = row_vector(y)
        psi = psi * vec
        log_scale += s
        top = float(np.max(np.abs(psi)))
        if top == 0.0:
            break
        psi = psi / top
        log_scale += math.log(top)
    total = complex(np.sum(psi))
    return ZReport.from_parts(total, log_scale, 1 << grid.n_free, "transfer",
                              time.perf_counter() - t0)


# ---------------------------------------------------------------- elimination


def _elimination_order(nbrs: dict, rank: dict) -> list:
    """Greedy min-fill order on the interaction graph, ties by degree then rank."""
    adj = {v: set(us) for v, us in nbrs.items()}

    def key(v):
        us = list(adj[v])
        fill = sum(1 for i, a in enumerate(us) for b in us[i + 1:] if b not in adj[a])
        return (fill, len(us), rank[v])

    current = {v: key(v) for v in adj}
    heap = [(k, v) for v, k in current.items()]
    heapq.heapify(heap)
    order = []
    while heap:
        k, v = heapq.heappop(heap)
        if v not in adj or current[v] != k:
            continue
        order.append(v)
        us = adj.pop(v)
        del current[v]
        for u in us:
            adj[u].discard(v)
            adj[u] |= us - {u}
        touched = set(us)
        for u in us:
            touched |= adj[u]
        for u in touched:
            k2 = key(u)
            if k2 != current[u]:
                current[u] = k2
                heapq.heappush(heap, (k2, u))
    return order


def eliminate_z(g: IsingGraph, width_cap: int = ELIMINATION_WIDTH_CAP) -> ZReport:
    """Sum out free spins one at a time in min-degree order.

    Factors are tables over +-1 spins (index 0 is +1). Each new factor is
    rescaled by its largest entry and the scale is kept in log form. Fails
    with CapExceededError when an intermediate factor would touch more than
    ``width_cap`` spins. Suited to the sparse graphs that routed grids
    become once their fixed cells are absorbed.
    """
    t0 = time.perf_counter()
    free = g.free_vertices()
    rank = {v: g.rank_of(v) for v in free}
    index = {v: i for i, v in enumerate(free)}
    h, const = _absorb_pins(g, index)
    w = cmath.exp(1j * QUARTER)
    bond = np.array([[w, w.conjugate()], [w.conjugate(), w]], dtype=np.complex128)
    factors = []
    log_scale = const
    for v in free:
        hv = h[v]
        log_scale += abs(hv.real)
        factors.append(((index[v],), np.array([cmath.exp(hv - abs(hv.real)),
                                               cmath.exp(-hv - abs(hv.real))])))
    nbrs = {v: set() for v in free}
    for u, v in g.edges():
        if u in index and v in index:
            factors.append(((index[u], index[v]), bond))
            nbrs[u].add(v)
            nbrs[v].add(u)

    by_var: dict[int, list] = {i: [] for i in range(len(free))}
    alive = {}
    for k, (vs, _) in enumerate(factors):
        alive[k] = factors[k]
        for i in vs:
            by_var[i].append(k)
    next_id = len(factors)
    for v in _elimination_order(nbrs, rank):
        i = index[v]
        ks = [k for k in by_var[i] if k in alive]
        scope = sorted({j for k in ks for j in alive[k][0]})
        if len(scope) - 1 > width_cap:
            raise CapExceededError(
                f"elimination needs a factor on {len(scope) - 1} spins, above {width_cap}")
        out = [j for j in scope if j != i]
        local = {j: n for n, j in enumerate(scope)}
        operands = []
        for k in ks:
            vs, arr = alive.pop(k)
            operands.extend([arr, [local[j] for j in vs]])
        table = np.einsum(*operands, [local[j] for j in out])
        top = float(np.max(np.abs(table))) if table.size else 0.0
        if top == 0.0:
            return ZReport.from_parts(0j, 0j, 1 << len(free), "eliminate",
                                      time.perf_counter() - t0)
        table = table / top
        log_scale += math.log(top)
        alive[next_id] = (tuple(out), table)
        for j in out:
            by_var[j].append(next_id)
        next_id += 1
    total = 1.0 + 0j
    for vs, arr in alive.values():  # only scalars remain
        total *= complex(arr)
    return ZReport.from_parts(total, log_scale, 1 << len(free), "eliminate",
                              time.perf_counter() - t0)


# ---------------------------------------------------------------- comparison


def check_equivalence(zA: ZReport, zB: ZReport, p: Prefactor, tol: float) -> Verdict:
    """Does zA equal p * zB?

    Both sides are rescaled by their larger magnitude before subtracting.
    The bound is tol * max(|zA|, |p zB|, 1), the trailing 1 acting as the
    absolute fallback when both values are tiny.
    """
    la = zA.log_abs
    lb = zB.log_abs + p.log_magnitude if not zB.is_zero else -math.inf
    top = max(la, lb)
    if top == -math.inf:
        return Verdict(True, 0.0)
    a = cmath.rect(math.exp(la - top), zA.phase) if la > -math.inf else 0j
    b = cmath.rect(math.exp(lb - top), zB.phase + p.phase) if lb > -math.inf else 0j
    diff = abs(a - b)
    rel = diff / max(abs(a), abs(b))
    bound = tol * max(1.0, math.exp(-top)) if top < 0 else tol
    return Verdict(diff <= bound, rel)
