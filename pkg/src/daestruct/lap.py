"""Maximum-value transversals by shortest augmenting paths.

The solver is a sparse Jonker-Volgenant style assignment code working on
integer costs.  Orders are turned into costs ``shift - sigma`` with
``shift = max sigma``, so every cost is a nonnegative integer and a
minimum-cost assignment is a maximum-value transversal.  The three JV
initialisation phases (column reduction, reduction transfer, augmenting row
reduction) seed a partial assignment and column potentials; the remaining
free rows are then augmented one at a time with a heap-based Dijkstra search
over reduced costs.

All arithmetic is on Python ints.  Among equally short paths the search
settles the lowest column index first.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import combinations

from .errors import StructurallyIllPosed, TooLarge
from .sigma import SignatureMatrix

__all__ = [
    "Assignment",
    "IllPosedWitness",
    "max_value_transversal",
    "brute_force_mvt",
    "solve_assignment",
    "hall_violator",
]

BRUTE_FORCE_LIMIT = 10


@dataclass(frozen=True)
class IllPosedWitness:
    """Rows whose finite entries reach fewer columns than there are rows (1-based)."""

    rows: frozenset[int]
    columns: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "rows", frozenset(self.rows))
        object.__setattr__(self, "columns", frozenset(self.columns))
        if len(self.columns) >= len(self.rows):
            raise ValueError("not a Hall violator: |columns| >= |rows|")

    def as_dict(self) -> dict:
        return {"rows": sorted(self.rows), "columns": sorted(self.columns)}


@dataclass(frozen=True)
class Assignment:
    """A transversal, 1-based: ``row_to_col[i-1]`` is the column of row ``i``.

    ``row_dual``/``col_dual`` are the solver's potentials in cost space
    (cost = ``shift - sigma``): at termination ``cost - row_dual - col_dual``
    is nonnegative on every pattern entry and zero on assigned pairs.  They
    are ``None`` for assignments not produced by the shortest-path solver.
    """

    row_to_col: tuple[int, ...]
    col_to_row: tuple[int, ...]
    value: int
    row_dual: tuple[int, ...] | None = None
    col_dual: tuple[int, ...] | None = None
    shift: int = 0

    @property
    def n(self) -> int:
        return len(self.row_to_col)

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in enumerate(self.row_to_col, 1)]

    @classmethod
    def from_row_to_col(cls, m: SignatureMatrix, row_to_col) -> "Assignment":
        """Build and validate an assignment of ``m`` from a 1-based row->column list."""
        row_to_col = tuple(row_to_col)
        if sorted(row_to_col) != list(range(1, m.n + 1)):
            raise ValueError("row_to_col is not a bijection")
        col_to_row = [0] * m.n
        value = 0
        for i, j in enumerate(row_to_col, 1):
            s = m.get(i, j)
            if s is None:
                raise ValueError(f"pair ({i}, {j}) is not in the sparsity pattern")
            value += s
            col_to_row[j - 1] = i
        return cls(row_to_col, tuple(col_to_row), value)


def solve_assignment(rows: list[list[tuple[int, int]]], n: int):
    """Minimum-cost perfect assignment on a sparse square cost structure.

    ``rows[i]`` lists ``(j, cost)`` pairs (0-based, sorted by ``j``, costs
    nonnegative ints).  Returns ``(x, y, u, v)``: row->col, col->row, row and
    column potentials.  Raises :class:`StructurallyIllPosed` with a 1-based
    Hall violator when no perfect assignment exists.
    """
    x = [-1] * n
    y = [-1] * n
    v = [0] * n

    cols: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for i, r in enumerate(rows):
        for j, c in r:
            cols[j].append((i, c))

    # column reduction, last column first
    times_min = [0] * n
    for j in range(n - 1, -1, -1):
        if not cols[j]:
            continue
        imin, cmin = min(cols[j], key=lambda t: (t[1], t[0]))
        v[j] = cmin
        times_min[imin] += 1
        if x[imin] < 0:
            x[imin] = j
            y[j] = imin

    # reduction transfer from rows that were the minimum of exactly one column
    for i in range(n):
        j1 = x[i]
        if j1 < 0 or times_min[i] != 1:
            continue
        others = [c - v[j] for j, c in rows[i] if j != j1]
        if others:
            v[j1] -= min(others)

    free = [i for i in range(n) if x[i] < 0]
    free = _augmenting_row_reduction(rows, x, y, v, free)
    free = _augmenting_row_reduction(rows, x, y, v, free)

    for f in free:
        _augment(rows, x, y, v, f)

    u = [0] * n
    costs = [dict(r) for r in rows]
    for i in range(n):
        u[i] = costs[i][x[i]] - v[x[i]]
    return x, y, u, v


def _augmenting_row_reduction(rows, x, y, v, free):
    """One JV augmenting-row-reduction pass; returns rows still free afterwards."""
    nxt = []
    queue = list(free)
    k = 0
    budget = 4 * len(rows) + 4 * len(free)
    while k < len(queue) and budget > 0:
        budget -= 1
        i = queue[k]
        k += 1
        if x[i] >= 0:
            continue
        if not rows[i]:
            nxt.append(i)
            continue
        # lowest and second lowest reduced value; ties keep the lower column
        u1 = u2 = None
        j1 = j2 = -1
        for j, c in rows[i]:
            h = c - v[j]
            if u1 is None or h < u1:
                u2, j2 = u1, j1
                u1, j1 = h, j
            elif u2 is None or h < u2:
                u2, j2 = h, j
        i0 = y[j1]
        lowered = u2 is not None and u1 < u2
        if lowered:
            v[j1] -= u2 - u1
        elif i0 >= 0 and u2 is not None and u2 == u1:
            j1 = j2
            i0 = y[j1]
        if i0 >= 0:
            if lowered:
                k -= 1
                queue[k] = i0
            else:
                nxt.append(i0)
            x[i0] = -1
        x[i] = j1
        y[j1] = i
    nxt.extend(i for i in queue[k:] if x[i] < 0)
    seen = set()
    out = []
    for i in nxt:
        if x[i] < 0 and i not in seen:
            seen.add(i)
            out.append(i)
    return out


def _augment(rows, x, y, v, f):
    """Shortest augmenting path from free row ``f`` (Dijkstra with a heap)."""
    dist: dict[int, int] = {}
    pred: dict[int, int] = {}
    heap = []
    for j, c in rows[f]:
        d = c - v[j]
        if j not in dist or d < dist[j]:
            dist[j] = d
            pred[j] = f
            heap.append((d, j))
    heapq.heapify(heap)
    done: list[int] = []
    settled = set()
    sink = -1
    while heap:
        d, j = heapq.heappop(heap)
        if j in settled or d != dist[j]:
            continue
        if y[j] < 0:
            sink = j
            break
        settled.add(j)
        done.append(j)
        i = y[j]
        base = d - (_cost(rows[i], j) - v[j])
        for k, c in rows[i]:
            if k in settled:
                continue
            nd = base + c - v[k]
            if k not in dist or nd < dist[k]:
                dist[k] = nd
                pred[k] = i
                heapq.heappush(heap, (nd, k))

    if sink < 0:
        # every reachable column is matched: f plus their mates is a Hall violator
        reached = set(dist)
        wrows = {f + 1} | {y[j] + 1 for j in reached}
        raise StructurallyIllPosed(IllPosedWitness(frozenset(wrows),
                                                   frozenset(j + 1 for j in reached)))

    dsink = dist[sink]
    for j in done:
        v[j] += dist[j] - dsink
    j = sink
    while True:
        i = pred[j]
        y[j] = i
        x[i], j = j, x[i]
        if i == f:
            break


def _cost(row, j):
    for k, c in row:
        if k == j:
            return c
    raise KeyError(j)


def max_value_transversal(m: SignatureMatrix) -> Assignment:
    """Maximum-value transversal of ``m``.

    Raises :class:`StructurallyIllPosed` (with a Hall-violator witness) when
    no transversal with all entries finite exists.
    """
    shift = m.max_order
    rows = [[(j, shift - s) for j, s in m.row(i)] for i in range(m.n)]
    x, y, u, v = solve_assignment(rows, m.n)
    value = sum(m.get(i + 1, x[i] + 1) for i in range(m.n))
    return Assignment(
        tuple(j + 1 for j in x),
        tuple(i + 1 for i in y),
        value,
        tuple(u),
        tuple(v),
        shift,
    )


def hall_violator(m: SignatureMatrix) -> IllPosedWitness | None:
    """Smallest row set violating Hall's condition, by subset enumeration."""
    if m.n > 2 * BRUTE_FORCE_LIMIT:
        raise TooLarge(f"subset enumeration limited to n <= {2 * BRUTE_FORCE_LIMIT}")
    adj = [set(r) for r in m.adjacency()]
    for size in range(1, m.n + 1):
        for subset in combinations(range(m.n), size):
            gamma = set().union(*(adj[i] for i in subset))
            if len(gamma) < size:
                return IllPosedWitness(frozenset(i + 1 for i in subset),
                                       frozenset(j + 1 for j in gamma))
    return None


def brute_force_mvt(m: SignatureMatrix) -> Assignment:
    """Exhaustive maximum-value transversal (test oracle, ``n <= 10``).

    Returns the lexicographically smallest ``row_to_col`` among the optima.
    """
    n = m.n
    if n > BRUTE_FORCE_LIMIT:
        raise TooLarge(f"brute force limited to n <= {BRUTE_FORCE_LIMIT}, got {n}")
    rows = [m.row(i) for i in range(n)]
    used = [False] * n
    cur = [0] * n
    best_val = None
    best = None

    def rec(i, acc):
        nonlocal best_val, best
        if i == n:
            if best_val is None or acc > best_val:
                best_val = acc
                best = list(cur)
            return
        for j, s in rows[i]:
            if not used[j]:
                used[j] = True
                cur[i] = j
                rec(i + 1, acc + s)
                used[j] = False

    rec(0, 0)
    if best is None:
        raise StructurallyIllPosed(hall_violator(m))
    return Assignment.from_row_to_col(m, [j + 1 for j in best])
