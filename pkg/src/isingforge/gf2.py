"""GF(2) linear algebra on integer bitsets (bit j of a row = column j)."""

from __future__ import annotations

from itertools import combinations

__all__ = ["rank", "row_reduce", "null_space", "left_null_space", "min_weight_basis", "inverse"]


def row_reduce(rows: list[int]) -> tuple[list[int], list[int]]:
    """Reduced row echelon form with lowest-index pivots.

    Returns (reduced nonzero rows, pivot columns), both in pivot order.
    """
    rows = [r for r in rows if r]
    pivots: list[int] = []
    out: list[int] = []
    for r in rows:
        for p, row in zip(pivots, out):
            if r >> p & 1:
                r ^= row
        if not r:
            continue
        p = (r & -r).bit_length() - 1
        for i, row in enumerate(out):
            if row >> p & 1:
                out[i] = row ^ r
        out.append(r)
        pivots.append(p)
    order = sorted(range(len(out)), key=pivots.__getitem__)
    return [out[i] for i in order], [pivots[i] for i in order]


def rank(rows: list[int]) -> int:
    return len(row_reduce(rows)[0])


def null_space(rows: list[int], n_cols: int) -> list[int]:
    """Basis of {x : row . x = 0 for every row}, one vector per free column."""
    red, pivots = row_reduce(rows)
    pivot_set = set(pivots)
    basis = []
    for f in range(n_cols):
        if f in pivot_set:
            continue
        x = 1 << f
        for row, p in zip(red, pivots):
            if row >> f & 1:
                x |= 1 << p
        basis.append(x)
    return basis


def left_null_space(rows: list[int], n_cols: int) -> list[int]:
    """Basis of {y : sum_i y_i rows[i] = 0}, as bitsets over row indices.

    Each row is augmented with an identity tag; rows that reduce to zero
    on the original columns leave behind a dependency among the tags.
    """
    n = len(rows)
    basis = []
    pivots: dict[int, int] = {}
    for i, r in enumerate(rows):
        aug = r | (1 << (n_cols + i))
        while True:
            low = aug & ((1 << n_cols) - 1)
            if not low:
                break
            p = (low & -low).bit_length() - 1
            if p not in pivots:
                pivots[p] = aug
                break
            aug ^= pivots[p]
        if not aug & ((1 << n_cols) - 1):
            basis.append(aug >> n_cols)
    return basis


def min_weight_basis(basis: list[int], exhaustive_limit: int = 16) -> list[int]:
    """Replace a basis of a GF(2) subspace by a low-weight basis of the same space.

    For dimension up to ``exhaustive_limit`` every nonzero vector is listed
    and a minimum-weight basis is picked greedily (matroid greedy, ties by
    value). Larger spaces get pairwise reduction passes instead.
    """
    d = len(basis)
    if d == 0:
        return []
    if d <= exhaustive_limit:
        vecs = []
        for mask in range(1, 1 << d):
            v = 0
            m, i = mask, 0
            while m:
                if m & 1:
                    v ^= basis[i]
                m >>= 1
                i += 1
            vecs.append(v)
        vecs.sort(key=lambda v: (bin(v).count("1"), v))
        chosen: list[int] = []
        echelon: dict[int, int] = {}
        for v in vecs:
            r = v
            while r:
                p = r.bit_length() - 1
                if p not in echelon:
                    echelon[p] = r
                    chosen.append(v)
                    break
                r ^= echelon[p]
            if len(chosen) == d:
                break
        return sorted(chosen, key=lambda v: (v & -v, v))
    out = list(basis)
    improved = True
    while improved:
        improved = False
        for i, j in combinations(range(d), 2):
            for a, b in ((i, j), (j, i)):
                cand = out[a] ^ out[b]
                if bin(cand).count("1") < bin(out[a]).count("1"):
                    out[a] = cand
                    improved = True
    return sorted(out, key=lambda v: (v & -v, v))


def inverse(rows: list[int], n: int) -> list[int] | None:
    """Inverse of an n x n GF(2) matrix given as row bitsets, or None if singular."""
    aug = [r | (1 << (n + i)) for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i] >> col & 1), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        for i in range(n):
            if i != col and aug[i] >> col & 1:
                aug[i] ^= aug[col]
    return [r >> n for r in aug]
