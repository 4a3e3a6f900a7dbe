"""Slow, obviously-correct reference computations used by the tests.

Each oracle works from a definition rather than from the algorithm it
checks: Koenig-Hall deficiency for matching size, enumeration of all
maximum matchings for the coarse decomposition, and exhaustive search over
offset vectors for canonical offsets.
"""

from __future__ import annotations

from itertools import combinations, permutations, product

import numpy as np

from daestruct import SignatureMatrix, from_triplets


def matching_size_by_deficiency(n_rows: int, n_cols: int, adjacency) -> int:
    """Maximum matching size as ``n_rows - max_S (|S| - |Gamma(S)|)``.

    ``adjacency`` holds 1-based column lists per row.  Exponential in
    ``n_rows``.
    """
    masks = [sum(1 << (j - 1) for j in adj) for adj in adjacency]
    worst = 0
    for size in range(1, n_rows + 1):
        for subset in combinations(range(n_rows), size):
            gamma = 0
            for i in subset:
                gamma |= masks[i]
            worst = max(worst, size - bin(gamma).count("1"))
    return n_rows - worst


def all_maximum_matchings(n_rows: int, n_cols: int, adjacency) -> list[dict[int, int]]:
    """Every maximum matching as a row -> column dict (1-based)."""
    found: list[dict[int, int]] = []
    best = 0

    def rec(i, used, cur):
        nonlocal best
        if i > n_rows:
            if len(cur) > best:
                best = len(cur)
                found.clear()
            if len(cur) == best:
                found.append(dict(cur))
            return
        if len(cur) + (n_rows - i + 1) < best:
            return
        rec(i + 1, used, cur)
        for j in adjacency[i - 1]:
            if j not in used:
                cur[i] = j
                rec(i + 1, used | {j}, cur)
                del cur[i]

    rec(1, frozenset(), {})
    return found


def coarse_sets_by_enumeration(n_rows: int, n_cols: int, adjacency) -> dict[str, set[int]]:
    """Coarse DM sets from the "unmatched in some maximum matching" characterization.

    A row is in VF iff some maximum matching leaves it unmatched; VX is the
    set of columns adjacent to VF.  Dually a column is in HX iff some
    maximum matching leaves it unmatched and HF holds the rows adjacent to
    HX.
    """
    ms = all_maximum_matchings(n_rows, n_cols, adjacency)
    VF = {i for i in range(1, n_rows + 1) if any(i not in m for m in ms)}
    HX = {j for j in range(1, n_cols + 1) if any(j not in m.values() for m in ms)}
    VX = {j for i in VF for j in adjacency[i - 1]}
    HF = {i for i in range(1, n_rows + 1) if set(adjacency[i - 1]) & HX}
    return {
        "VF": VF, "VX": VX, "HF": HF, "HX": HX,
        "SF": set(range(1, n_rows + 1)) - VF - HF,
        "SX": set(range(1, n_cols + 1)) - VX - HX,
    }


def all_max_value_transversals(m: SignatureMatrix) -> list[tuple[int, ...]]:
    """Every maximum-value transversal (1-based row->column tuples)."""
    best = None
    out: list[tuple[int, ...]] = []
    for perm in permutations(range(1, m.n + 1)):
        vals = [m.get(i, j) for i, j in enumerate(perm, 1)]
        if any(v is None for v in vals):
            continue
        v = sum(vals)
        if best is None or v > best:
            best, out = v, [perm]
        elif v == best:
            out.append(perm)
    return out


def canonical_offsets_by_enumeration(m: SignatureMatrix, value: int):
    """Elementwise minimum over all dual-optimal nonnegative integer pairs.

    Every ``c`` in ``[0, n * max sigma]^n`` is tried.  For a fixed ``c`` the
    smallest feasible ``d`` is ``d_j = max_i (sigma_ij + c_i)``; the pair is
    dual optimal iff ``sum d - sum c`` equals the transversal value.
    Returns ``(c, d)`` as tuples or ``None`` if nothing qualifies.
    """
    n = m.n
    bound = n * m.max_order
    grid = np.array(list(product(range(bound + 1), repeat=n)), dtype=np.int64)
    d = np.zeros_like(grid)
    for j in range(1, n + 1):
        rows = [(i, s) for i in range(1, n + 1) if (s := m.get(i, j)) is not None]
        if not rows:
            return None
        d[:, j - 1] = np.max(np.stack([grid[:, i - 1] + s for i, s in rows]), axis=0)
    optimal = d.sum(axis=1) - grid.sum(axis=1) == value
    if not optimal.any():
        return None
    c_opt, d_opt = grid[optimal], d[optimal]
    c_min = c_opt.min(axis=0)
    d_min = d_opt.min(axis=0)
    # the minimum must itself be one of the optimal pairs (lattice property)
    hit = np.all(c_opt == c_min, axis=1) & np.all(d_opt == d_min, axis=1)
    assert hit.any(), "elementwise minimum is not dual optimal"
    return tuple(int(x) for x in c_min), tuple(int(x) for x in d_min)


def random_matrix(rng, n: int, density: float, max_order: int = 3, labels=False) -> SignatureMatrix:
    """Random sparse signature matrix; ``rng`` is a ``numpy`` Generator."""
    mask = rng.random((n, n)) < density
    orders = rng.integers(0, max_order + 1, size=(n, n))
    trip = [(i + 1, j + 1, int(orders[i, j])) for i in range(n) for j in range(n) if mask[i, j]]
    names = (None, None)
    if labels:
        names = ([f"e{i}" for i in range(n)], [f"v{j}" for j in range(n)])
    return from_triplets(n, trip, *names)


def random_wellposed(rng, n: int, density: float, max_order: int = 3) -> SignatureMatrix:
    """Random matrix with a hidden random transversal forced into the pattern."""
    m = random_matrix(rng, n, density, max_order)
    perm = rng.permutation(n)
    ents = dict(m.entries)
    for i in range(n):
        ents.setdefault((i + 1, int(perm[i]) + 1), int(rng.integers(0, max_order + 1)))
    return SignatureMatrix(n, ents)
