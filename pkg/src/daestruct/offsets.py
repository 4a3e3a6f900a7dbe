"""Canonical offsets, structural index and Jacobian pattern.

Given a maximum-value transversal ``T``, the canonical offsets are the
smallest nonnegative integers ``c`` (per equation) and ``d`` (per variable)
with ``d_j - c_i >= sigma_ij`` on the pattern and equality on ``T``.  They
are reached by the fixed-point iteration

    d_j <- max_i (sigma_ij + c_i),    c_i <- d_T(i) - sigma_i,T(i)

started from ``c = 0``.  On a block upper triangular matrix the same fixed
point is computed block by block, top to bottom: columns of a block are
floored by the rows of earlier blocks, which are already final.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import linear_sum_assignment

from .dm import FineBtf, btf as _btf
from .errors import DaeStructError, NotOptimalTransversal, StructurallyIllPosed
from .lap import Assignment, IllPosedWitness, max_value_transversal
from .sigma import Permutation, SignatureMatrix

__all__ = [
    "OffsetVectors",
    "AnalysisReport",
    "global_offsets_fixed_point",
    "dense_offsets_fixed_point",
    "block_offsets",
    "local_block_offsets",
    "structural_index",
    "jacobian_pattern",
    "analyze",
    "analyze_unblocked",
    "InternalInvariantError",
]


class InternalInvariantError(DaeStructError, RuntimeError):
    """A computed result failed its own consistency check."""


@dataclass(frozen=True)
class OffsetVectors:
    """Equation offsets ``c`` and variable offsets ``d``, in original order."""

    c: tuple[int, ...]
    d: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(self.c))
        object.__setattr__(self, "d", tuple(self.d))
        if len(self.c) != len(self.d):
            raise ValueError("c and d differ in length")
        if any(ci < 0 for ci in self.c):
            raise ValueError("equation offsets must be nonnegative")

    def is_feasible(self, m: SignatureMatrix) -> bool:
        return all(self.d[j - 1] - self.c[i - 1] >= s for (i, j), s in m.entries.items())

    def is_tight_on(self, m: SignatureMatrix, t: Assignment) -> bool:
        return all(self.d[j - 1] - self.c[i - 1] == m.get(i, j) for i, j in t.pairs())


def _divergence_bound(m: SignatureMatrix) -> int:
    return m.n * (m.max_order + 1)


def global_offsets_fixed_point(
    m: SignatureMatrix,
    t: Assignment,
    trace: list | None = None,
) -> tuple[OffsetVectors, int]:
    """Canonical offsets of ``m`` from the transversal ``t``.

    Returns ``(offsets, q)`` where ``q`` counts sweeps, including the final
    one that changes nothing.  If ``trace`` is a list, the ``(c, d)`` pair
    after every sweep is appended to it.

    Raises :class:`NotOptimalTransversal` when ``c`` grows past
    ``n * (max sigma + 1)``, which cannot happen for a maximum-value
    transversal.
    """
    n = m.n
    cols: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for (i, j), s in m.entries.items():
        cols[j - 1].append((i - 1, s))
    tcol = [j - 1 for j in t.row_to_col]
    tsig = [m.get(i + 1, tcol[i] + 1) for i in range(n)]
    if any(s is None for s in tsig):
        raise ValueError("transversal uses an entry outside the sparsity pattern")
    bound = _divergence_bound(m)

    c = [0] * n
    d = [0] * n
    q = 0
    while True:
        q += 1
        d = [max(s + c[i] for i, s in col) if col else 0 for col in cols]
        new_c = [d[tcol[i]] - tsig[i] for i in range(n)]
        if trace is not None:
            trace.append((tuple(new_c), tuple(d)))
        if new_c == c:
            break
        c = new_c
        if max(c) > bound:
            raise NotOptimalTransversal(
                f"offsets diverge after {q} sweeps: the transversal is not of maximum value"
            )
    return OffsetVectors(c, d), q


def dense_offsets_fixed_point(m: SignatureMatrix, t: Assignment) -> tuple[OffsetVectors, int]:
    """Same iteration as :func:`global_offsets_fixed_point` on a dense array.

    Every sweep touches all ``n * n`` cells, absent ones holding a large
    negative placeholder; this is the classical full-matrix formulation and
    costs ``O(q n^2)``.
    """
    n = m.n
    neg = -(1 << 40)
    sig = np.full((n, n), neg, dtype=np.int64)
    for (i, j), s in m.entries.items():
        sig[i - 1, j - 1] = s
    tcol = np.array(t.row_to_col, dtype=np.int64) - 1
    tsig = sig[np.arange(n), tcol]
    if np.any(tsig == neg):
        raise ValueError("transversal uses an entry outside the sparsity pattern")
    bound = _divergence_bound(m)
    c = np.zeros(n, dtype=np.int64)
    q = 0
    while True:
        q += 1
        d = (sig + c[:, None]).max(axis=0)
        new_c = d[tcol] - tsig
        if np.array_equal(new_c, c):
            break
        c = new_c
        if c.max() > bound:
            raise NotOptimalTransversal(
                f"offsets diverge after {q} sweeps: the transversal is not of maximum value"
            )
    return OffsetVectors(c.tolist(), d.tolist()), q


def _block_fixed_point(m, rows, cols, tcol, c, d, floors, bound) -> int:
    """Local fixed point of one block, writing into the global ``c``/``d``.

    ``rows``/``cols`` are 0-based original indices, ``tcol[k]`` the column
    assigned to ``rows[k]``; ``floors[j]`` is the contribution of earlier
    blocks to column ``j`` (``None`` if there is none).
    """
    colset = set(cols)
    col_entries: dict[int, list[tuple[int, int]]] = {j: [] for j in cols}
    for i in rows:
        for j, s in m.row(i):
            if j in colset:
                col_entries[j].append((i, s))
    tsig = [m.get(i + 1, j + 1) for i, j in zip(rows, tcol)]
    for i in rows:
        c[i] = 0
    sweeps = 0
    while True:
        sweeps += 1
        for j in cols:
            best = max((s + c[i] for i, s in col_entries[j]), default=0)
            f = floors.get(j)
            d[j] = best if f is None or f < best else f
        changed = False
        for i, j, s in zip(rows, tcol, tsig):
            ci = d[j] - s
            if ci != c[i]:
                c[i] = ci
                changed = True
                if ci > bound:
                    raise NotOptimalTransversal(
                        "block offsets diverge: a block transversal is not of maximum value"
                    )
        if not changed:
            return sweeps


def _check_block_transversals(btf: FineBtf, block_transversals) -> list[list[int]]:
    """Global 0-based assigned column for each block row, block by block."""
    if len(block_transversals) != btf.n_blocks:
        raise ValueError(f"expected {btf.n_blocks} block transversals, got {len(block_transversals)}")
    out = []
    for k, bt in enumerate(block_transversals):
        bcols = btf.block_cols(k)
        if bt.n != len(bcols):
            raise ValueError(f"transversal of block {k} has the wrong size")
        out.append([bcols[j - 1] - 1 for j in bt.row_to_col])
    return out


def block_offsets(
    m: SignatureMatrix,
    btf: FineBtf,
    block_transversals: list[Assignment],
) -> tuple[OffsetVectors, int]:
    """Canonical offsets by processing diagonal blocks top to bottom.

    ``block_transversals[k]`` is a maximum-value transversal of diagonal
    block ``k`` in block-local coordinates (rows and columns numbered in the
    order of ``btf.block_rows(k)`` / ``btf.block_cols(k)``).  Returns
    ``(offsets, q)`` where ``q`` is the total number of local sweeps over all
    blocks.  The result equals :func:`global_offsets_fixed_point` on the
    assembled transversal.
    """
    n = m.n
    tcols = _check_block_transversals(btf, block_transversals)
    row_block = btf.row_block_map()
    bound = _divergence_bound(m)
    # entries coupling an earlier block's row into a later block's column
    coupling: list[list[tuple[int, int, int]]] = [[] for _ in range(btf.n_blocks)]
    col_block = btf.col_block_map()
    for (i, j), s in m.entries.items():
        kr, kc = row_block[i], col_block[j]
        if kr < kc:
            coupling[kc].append((i - 1, j - 1, s))
        elif kr > kc:
            raise ValueError(f"entry ({i}, {j}) lies below the block diagonal")

    c = [0] * n
    d = [0] * n
    q = 0
    for k in range(btf.n_blocks):
        floors: dict[int, int] = {}
        for i, j, s in coupling[k]:
            v = s + c[i]
            if floors.get(j, -1) < v:
                floors[j] = v
        rows = [r - 1 for r in btf.block_rows(k)]
        cols = [cc - 1 for cc in btf.block_cols(k)]
        q += _block_fixed_point(m, rows, cols, tcols[k], c, d, floors, bound)
    return OffsetVectors(c, d), q


def local_block_offsets(
    m: SignatureMatrix,
    btf: FineBtf,
    block_transversals: list[Assignment],
) -> list[OffsetVectors]:
    """Canonical offsets of each diagonal block taken on its own (block-local order)."""
    out = []
    for k, bt in enumerate(block_transversals):
        sub = m.submatrix(btf.block_rows(k), btf.block_cols(k))
        out.append(global_offsets_fixed_point(sub, bt)[0])
    return out


def structural_index(o: OffsetVectors) -> int:
    """``max c``, plus one when some variable offset is zero."""
    return max(o.c, default=0) + (1 if any(dj == 0 for dj in o.d) else 0)


def jacobian_pattern(m: SignatureMatrix, o: OffsetVectors) -> frozenset[tuple[int, int]]:
    """Pattern positions where ``d_j - c_i == sigma_ij`` (1-based)."""
    return frozenset(
        (i, j) for (i, j), s in m.entries.items() if o.d[j - 1] - o.c[i - 1] == s
    )


@dataclass(frozen=True)
class AnalysisReport:
    """Outcome of a structural analysis.

    For an ill-posed matrix only ``matrix``, ``wellposed`` (False),
    ``witness`` and possibly ``btf`` are set.
    """

    matrix: SignatureMatrix
    method: str
    wellposed: bool
    btf: FineBtf | None = None
    transversal: Assignment | None = None
    offsets: OffsetVectors | None = None
    structural_index: int | None = None
    jacobian_pattern: frozenset | None = None
    iterations_q: int | None = None
    witness: IllPosedWitness | None = None
    timings: dict = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return self.matrix.n


def _check_report(m: SignatureMatrix, t: Assignment, o: OffsetVectors):
    if not o.is_feasible(m) or not o.is_tight_on(m, t):
        raise InternalInvariantError("offsets are not dual feasible or not tight on the transversal")
    if sum(o.d) - sum(o.c) != t.value:
        raise InternalInvariantError("sum(d) - sum(c) differs from the transversal value")


def _finish(m, method, fb, t, o, q, timings, clock):
    t0 = clock()
    _check_report(m, t, o)
    nu = structural_index(o)
    jac = jacobian_pattern(m, o)
    timings["jacobian"] = clock() - t0
    return AnalysisReport(m, method, True, fb, t, o, nu, jac, q, None, timings)


def analyze(
    m: SignatureMatrix,
    map_blocks: Callable | None = None,
    clock: Callable[[], float] = time.perf_counter,
) -> AnalysisReport:
    """Block triangularize, solve each diagonal block, then compute offsets.

    ``map_blocks`` may be a parallel ``map`` (for example
    ``executor.map``) used for the independent per-block transversal
    solves; the result does not depend on it.
    """
    timings: dict[str, float] = {}
    t0 = clock()
    try:
        fb = _btf(m)
    except StructurallyIllPosed as exc:
        timings["btf"] = clock() - t0
        return AnalysisReport(m, "esmm", False, witness=exc.witness, timings=timings)
    timings["btf"] = clock() - t0

    t0 = clock()
    subs = [m.submatrix(fb.block_rows(k), fb.block_cols(k)) for k in range(fb.n_blocks)]
    solver = map if map_blocks is None else map_blocks
    block_ts = list(solver(max_value_transversal, subs))
    row_to_col = [0] * m.n
    for k, bt in enumerate(block_ts):
        brows, bcols = fb.block_rows(k), fb.block_cols(k)
        for li, lj in enumerate(bt.row_to_col):
            row_to_col[brows[li] - 1] = bcols[lj - 1]
    t = Assignment.from_row_to_col(m, row_to_col)
    timings["mvt"] = clock() - t0

    t0 = clock()
    o, q = block_offsets(m, fb, block_ts)
    timings["offsets"] = clock() - t0
    return _finish(m, "esmm", fb, t, o, q, timings, clock)


def _dense_transversal(m: SignatureMatrix) -> Assignment:
    """Global transversal from a dense assignment solve over all ``n * n`` cells.

    Absent cells get a value low enough that no optimum uses one unless no
    finite transversal exists; in that case the sparse solver is run to
    produce the ill-posedness witness.
    """
    n = m.n
    low = -(n * m.max_order + 1)
    dense = np.full((n, n), low, dtype=np.int64)
    if m.nnz:
        idx = np.array(list(m.entries.keys()), dtype=np.int64) - 1
        dense[idx[:, 0], idx[:, 1]] = np.fromiter(m.entries.values(), dtype=np.int64)
    rows, cols = linear_sum_assignment(dense, maximize=True)
    if np.any(dense[rows, cols] == low):
        max_value_transversal(m)
        raise InternalInvariantError("dense and sparse solvers disagree on well-posedness")
    return Assignment.from_row_to_col(m, (cols + 1).tolist())


def analyze_unblocked(
    m: SignatureMatrix,
    dense: bool = True,
    clock: Callable[[], float] = time.perf_counter,
) -> AnalysisReport:
    """Plain method: one global transversal and the global fixed point.

    With ``dense`` (the default, the classical full-matrix formulation) the
    transversal comes from a dense assignment solve and every offset sweep
    runs over all ``n * n`` cells.  With ``dense=False`` both steps use the
    sparse pattern (:func:`max_value_transversal`,
    :func:`global_offsets_fixed_point`).  Offsets, index and Jacobian
    pattern are the same either way.  The reported block structure is a
    single block with the identity permutation.
    """
    timings: dict[str, float] = {}
    t0 = clock()
    try:
        t = _dense_transversal(m) if dense else max_value_transversal(m)
    except StructurallyIllPosed as exc:
        timings["mvt"] = clock() - t0
        return AnalysisReport(m, "smm", False, witness=exc.witness, timings=timings)
    timings["mvt"] = clock() - t0
    ident = Permutation.identity(m.n)
    fb = FineBtf.from_blocks([list(ident.row_perm)], [list(ident.col_perm)])
    t0 = clock()
    o, q = (dense_offsets_fixed_point if dense else global_offsets_fixed_point)(m, t)
    timings["offsets"] = clock() - t0
    return _finish(m, "smm", fb, t, o, q, timings, clock)
