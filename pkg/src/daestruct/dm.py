"""Block triangularization of a sparsity pattern.

Pipeline: connected components of the bipartite row/column graph, a
maximum matching per component (Hopcroft-Karp), the coarse
Dulmage-Mendelsohn split by alternating-path reachability, and the fine
split of the square part into strongly connected components (Tarjan).

The result is always normalised to block UPPER triangular form: every
entry of the permuted matrix lies in or to the right of its row's diagonal
block.  Matrix indices are 1-based in every returned object; block numbers
are 0-based list positions.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .errors import NotPerfectlyMatched, StructurallyIllPosed, TooLarge
from .lap import IllPosedWitness
from .sigma import Permutation, SignatureMatrix

__all__ = [
    "IncidenceGraph",
    "Matching",
    "CoarseDecomposition",
    "FineBtf",
    "connected_components",
    "maximum_matching",
    "coarse_decompose",
    "fine_decompose",
    "btf",
    "check_strong_hall",
]

STRONG_HALL_LIMIT = 15


@dataclass(frozen=True)
class IncidenceGraph:
    """Bipartite row/column graph of a pattern; ``adjacency[i-1]`` holds row i's columns."""

    n_rows: int
    n_cols: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        adj = tuple(tuple(sorted(set(r))) for r in self.adjacency)
        if len(adj) != self.n_rows:
            raise ValueError(f"expected {self.n_rows} adjacency rows, got {len(adj)}")
        for r in adj:
            if r and not (1 <= r[0] and r[-1] <= self.n_cols):
                raise ValueError("adjacency index out of range")
        object.__setattr__(self, "adjacency", adj)

    @classmethod
    def from_matrix(cls, m: SignatureMatrix) -> "IncidenceGraph":
        return cls(m.n, m.n, tuple(tuple(j + 1 for j in r) for r in m.adjacency()))

    @classmethod
    def from_edges(cls, n_rows: int, n_cols: int, edges) -> "IncidenceGraph":
        adj = [[] for _ in range(n_rows)]
        for i, j in edges:
            adj[i - 1].append(j)
        return cls(n_rows, n_cols, tuple(tuple(r) for r in adj))

    @property
    def n_edges(self) -> int:
        return sum(len(r) for r in self.adjacency)

    def columns(self) -> list[list[int]]:
        """Per-column sorted row lists (1-based)."""
        cols = [[] for _ in range(self.n_cols)]
        for i, r in enumerate(self.adjacency, 1):
            for j in r:
                cols[j - 1].append(i)
        return cols

    def subgraph(self, rows: Sequence[int], cols: Sequence[int]) -> "IncidenceGraph":
        """Induced subgraph, renumbered in the order of ``rows`` / ``cols``."""
        cpos = {c: k for k, c in enumerate(cols, 1)}
        return IncidenceGraph(
            len(rows),
            len(cols),
            tuple(tuple(cpos[j] for j in self.adjacency[r - 1] if j in cpos) for r in rows),
        )


@dataclass(frozen=True)
class Matching:
    """``row_mate[i-1]`` is row i's column (or None); ``col_mate`` likewise."""

    row_mate: tuple[int | None, ...]
    col_mate: tuple[int | None, ...]

    @property
    def size(self) -> int:
        return sum(1 for j in self.row_mate if j is not None)

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in enumerate(self.row_mate, 1) if j is not None]

    def is_perfect(self) -> bool:
        return self.size == len(self.row_mate) == len(self.col_mate)

    @classmethod
    def from_pairs(cls, n_rows: int, n_cols: int, pairs) -> "Matching":
        rm: list[int | None] = [None] * n_rows
        cm: list[int | None] = [None] * n_cols
        for i, j in pairs:
            if rm[i - 1] is not None or cm[j - 1] is not None:
                raise ValueError(f"vertex reused by pair ({i}, {j})")
            rm[i - 1] = j
            cm[j - 1] = i
        return cls(tuple(rm), tuple(cm))


@dataclass(frozen=True)
class CoarseDecomposition:
    """Coarse Dulmage-Mendelsohn split (1-based sets).

    ``VF``/``VX``: reachable by alternating path from an unmatched row
    (overdetermined part).  ``HF``/``HX``: reachable from an unmatched column
    (underdetermined part).  ``SF``/``SX``: the rest, which is square and
    perfectly matched.
    """

    HF: frozenset[int]
    SF: frozenset[int]
    VF: frozenset[int]
    HX: frozenset[int]
    SX: frozenset[int]
    VX: frozenset[int]

    def as_dict(self) -> dict:
        return {k: sorted(getattr(self, k)) for k in ("HF", "SF", "VF", "HX", "SX", "VX")}


@dataclass(frozen=True)
class FineBtf:
    """Permutation to block upper triangular form plus its diagonal blocks.

    ``blocks[k]`` is a pair of 1-based ranges of permuted row and column
    positions.  ``block_of_row[p-1]`` / ``block_of_col[p-1]`` give the block
    of permuted position ``p``.
    """

    permutation: Permutation
    blocks: tuple[tuple[range, range], ...]
    block_of_row: tuple[int, ...]
    block_of_col: tuple[int, ...]

    @classmethod
    def from_blocks(cls, row_blocks, col_blocks) -> "FineBtf":
        """Assemble from ordered lists of original (1-based) row/column groups."""
        row_perm = [r for b in row_blocks for r in b]
        col_perm = [c for b in col_blocks for c in b]
        blocks = []
        bor: list[int] = []
        boc: list[int] = []
        r0 = c0 = 1
        for k, (rb, cb) in enumerate(zip(row_blocks, col_blocks)):
            blocks.append((range(r0, r0 + len(rb)), range(c0, c0 + len(cb))))
            r0 += len(rb)
            c0 += len(cb)
            bor.extend([k] * len(rb))
            boc.extend([k] * len(cb))
        return cls(Permutation(tuple(row_perm), tuple(col_perm)), tuple(blocks),
                   tuple(bor), tuple(boc))

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> list[int]:
        return [len(r) for r, _ in self.blocks]

    def block_rows(self, k: int) -> list[int]:
        """Original row indices of block ``k``, in permuted order."""
        return [self.permutation.row_perm[p - 1] for p in self.blocks[k][0]]

    def block_cols(self, k: int) -> list[int]:
        return [self.permutation.col_perm[p - 1] for p in self.blocks[k][1]]

    def row_block_map(self) -> dict[int, int]:
        """Original row index -> block number."""
        return {self.permutation.row_perm[p]: k for p, k in enumerate(self.block_of_row)}

    def col_block_map(self) -> dict[int, int]:
        return {self.permutation.col_perm[p]: k for p, k in enumerate(self.block_of_col)}


def connected_components(g: IncidenceGraph) -> list[tuple[frozenset[int], frozenset[int]]]:
    """Connected components as ``(rows, cols)``, ordered by smallest row.

    Isolated columns form row-less components placed after all others, in
    column order.
    """
    cols = g.columns()
    row_seen = [False] * g.n_rows
    col_seen = [False] * g.n_cols
    out = []
    for start in range(1, g.n_rows + 1):
        if row_seen[start - 1]:
            continue
        rs, cs = {start}, set()
        row_seen[start - 1] = True
        queue = deque([start])
        while queue:
            i = queue.popleft()
            for j in g.adjacency[i - 1]:
                if col_seen[j - 1]:
                    continue
                col_seen[j - 1] = True
                cs.add(j)
                for k in cols[j - 1]:
                    if not row_seen[k - 1]:
                        row_seen[k - 1] = True
                        rs.add(k)
                        queue.append(k)
        out.append((frozenset(rs), frozenset(cs)))
    for j in range(1, g.n_cols + 1):
        if not col_seen[j - 1]:
            out.append((frozenset(), frozenset({j})))
    return out


def maximum_matching(g: IncidenceGraph) -> Matching:
    """Maximum cardinality matching by Hopcroft-Karp (iterative DFS)."""
    nr, nc = g.n_rows, g.n_cols
    adj = [[j - 1 for j in r] for r in g.adjacency]
    rm = [-1] * nr
    cm = [-1] * nc
    # cheap greedy start
    for i in range(nr):
        for j in adj[i]:
            if cm[j] < 0:
                rm[i] = j
                cm[j] = i
                break
    inf = nr + nc + 1
    while True:
        dist = [inf] * nr
        queue = deque()
        for i in range(nr):
            if rm[i] < 0:
                dist[i] = 0
                queue.append(i)
        found = False
        while queue:
            i = queue.popleft()
            for j in adj[i]:
                k = cm[j]
                if k < 0:
                    found = True
                elif dist[k] == inf:
                    dist[k] = dist[i] + 1
                    queue.append(k)
        if not found:
            break
        ptr = [0] * nr
        for root in range(nr):
            if rm[root] >= 0:
                continue
            stack = [root]
            while stack:
                i = stack[-1]
                if ptr[i] == len(adj[i]):
                    dist[i] = inf
                    stack.pop()
                    continue
                j = adj[i][ptr[i]]
                ptr[i] += 1
                k = cm[j]
                if k < 0:
                    # flip the path recorded on the stack
                    for depth in range(len(stack) - 1, -1, -1):
                        r = stack[depth]
                        prev = rm[r]
                        rm[r] = j
                        cm[j] = r
                        j = prev
                    break
                if dist[k] == dist[i] + 1:
                    stack.append(k)
    return Matching(
        tuple(j + 1 if j >= 0 else None for j in rm),
        tuple(i + 1 if i >= 0 else None for i in cm),
    )


def coarse_decompose(g: IncidenceGraph, m: Matching) -> CoarseDecomposition:
    """Split rows and columns by alternating reachability from unmatched vertices."""
    cols = g.columns()

    def from_rows():
        rows = {i for i in range(1, g.n_rows + 1) if m.row_mate[i - 1] is None}
        seen_c: set[int] = set()
        queue = deque(rows)
        while queue:
            i = queue.popleft()
            for j in g.adjacency[i - 1]:
                if j == m.row_mate[i - 1] or j in seen_c:
                    continue
                seen_c.add(j)
                k = m.col_mate[j - 1]
                if k is not None and k not in rows:
                    rows.add(k)
                    queue.append(k)
        return rows, seen_c

    def from_cols():
        cset = {j for j in range(1, g.n_cols + 1) if m.col_mate[j - 1] is None}
        seen_r: set[int] = set()
        queue = deque(cset)
        while queue:
            j = queue.popleft()
            for i in cols[j - 1]:
                if i == m.col_mate[j - 1] or i in seen_r:
                    continue
                seen_r.add(i)
                k = m.row_mate[i - 1]
                if k is not None and k not in cset:
                    cset.add(k)
                    queue.append(k)
        return seen_r, cset

    vf, vx = from_rows()
    hf, hx = from_cols()
    if vf & hf or vx & hx:
        raise ValueError("matching is not maximum: an augmenting path exists")
    all_r = set(range(1, g.n_rows + 1))
    all_c = set(range(1, g.n_cols + 1))
    return CoarseDecomposition(
        frozenset(hf), frozenset(all_r - vf - hf), frozenset(vf),
        frozenset(hx), frozenset(all_c - vx - hx), frozenset(vx),
    )


def _tarjan_order(adj: list[list[int]], mate: list[int]) -> list[list[int]]:
    """SCCs of the row dependency graph, in block upper triangular order.

    Row ``i`` depends on row ``k`` when ``i`` has an entry in the column
    matched to ``k``.  Tarjan emits dependencies before dependents, so the
    reversed emission order puts every row at or above the rows it depends
    on.  Roots are tried in row order, successors in column order.
    """
    n = len(adj)
    owner = [0] * n
    for i, j in enumerate(mate):
        owner[j] = i
    succ = [[owner[j] for j in adj[i] if j != mate[i]] for i in range(n)]

    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    emitted: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            if pos < len(succ[v]):
                work[-1] = (v, pos + 1)
                w = succ[v][pos]
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                emitted.append(sorted(comp))
    emitted.reverse()
    return emitted


def fine_decompose(g: IncidenceGraph, m: Matching) -> FineBtf:
    """Irreducible diagonal blocks of a perfectly matched square pattern."""
    if g.n_rows != g.n_cols or not m.is_perfect() or len(m.row_mate) != g.n_rows:
        raise NotPerfectlyMatched("fine decomposition needs a perfect matching on a square pattern")
    adj = [[j - 1 for j in r] for r in g.adjacency]
    mate = [j - 1 for j in m.row_mate]
    for i in range(g.n_rows):
        if mate[i] not in adj[i]:
            raise NotPerfectlyMatched(f"matched pair ({i + 1}, {mate[i] + 1}) is not an edge")
    comps = _tarjan_order(adj, mate)
    return FineBtf.from_blocks(
        [[i + 1 for i in c] for c in comps],
        [[mate[i] + 1 for i in c] for c in comps],
    )


def btf(m: SignatureMatrix) -> FineBtf:
    """Block upper triangular form of ``m``'s pattern.

    Raises :class:`StructurallyIllPosed` when the pattern has no transversal;
    the witness is the overdetermined part (rows reachable from an unmatched
    row, and the columns they touch).
    """
    g = IncidenceGraph.from_matrix(m)
    row_blocks: list[list[int]] = []
    col_blocks: list[list[int]] = []
    bad_rows: set[int] = set()
    bad_cols: set[int] = set()
    for rows, cols in connected_components(g):
        rs, cs = sorted(rows), sorted(cols)
        sub = g.subgraph(rs, cs)
        mm = maximum_matching(sub)
        if mm.size == len(rs) == len(cs):
            fb = fine_decompose(sub, mm)
            for k in range(fb.n_blocks):
                row_blocks.append([rs[p - 1] for p in fb.block_rows(k)])
                col_blocks.append([cs[p - 1] for p in fb.block_cols(k)])
            continue
        cd = coarse_decompose(sub, mm)
        bad_rows.update(rs[p - 1] for p in cd.VF)
        bad_cols.update(cs[p - 1] for p in cd.VX)
    if bad_rows:
        raise StructurallyIllPosed(IllPosedWitness(frozenset(bad_rows), frozenset(bad_cols)))
    return FineBtf.from_blocks(row_blocks, col_blocks)


def check_strong_hall(g: IncidenceGraph) -> bool:
    """Exhaustive strong Hall test (square patterns, ``n <= 15``).

    True iff every proper nonempty row subset reaches at least one more
    column than it has rows, and the full row set reaches every column.
    """
    n = g.n_rows
    if n > STRONG_HALL_LIMIT:
        raise TooLarge(f"strong Hall enumeration limited to n <= {STRONG_HALL_LIMIT}")
    if g.n_cols != n:
        return False
    masks = [sum(1 << (j - 1) for j in r) for r in g.adjacency]
    full = (1 << n) - 1
    gamma = [0] * (1 << n)
    for s in range(1, 1 << n):
        low = s & -s
        gamma[s] = gamma[s ^ low] | masks[low.bit_length() - 1]
        need = bin(s).count("1") + (0 if s == full else 1)
        if bin(gamma[s]).count("1") < need:
            return False
    return True
