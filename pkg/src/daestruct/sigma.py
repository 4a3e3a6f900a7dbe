"""Sparse signature matrices and the line-oriented exchange format.

A signature matrix stores, for each equation ``i`` and variable ``j``, the
highest derivative order of ``x_j`` occurring in ``f_i``.  Pairs that do not
occur are simply absent (they stand for minus infinity); no sentinel is ever
stored.  Indices are 1-based at every public interface.

Exchange format::

    # comment
    n 3
    rows f1 f2 f3
    cols x y z
    s 1 1 2
    s 2 3 0
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    DuplicateEntry,
    IndexOutOfRange,
    InputError,
    NegativeOrder,
    ParseError,
    SizeMismatch,
)

__all__ = [
    "SignatureMatrix",
    "Permutation",
    "from_triplets",
    "read_sigma_file",
    "write_sigma_file",
    "permute",
]


def _check_labels(labels, n, side):
    if labels is None:
        return None
    labels = tuple(str(s) for s in labels)
    if len(labels) != n:
        raise SizeMismatch(f"{side} labels: expected {n} names, got {len(labels)}")
    if len(set(labels)) != n:
        raise DuplicateEntry(f"{side} labels are not unique")
    return labels


@dataclass(frozen=True)
class SignatureMatrix:
    """Immutable square signature matrix.

    ``entries`` maps 1-based ``(row, col)`` to a nonnegative integer order.
    Use :func:`from_triplets` to build one with full validation.
    """

    n: int
    entries: Mapping[tuple[int, int], int]
    row_labels: tuple[str, ...] | None = None
    col_labels: tuple[str, ...] | None = None
    _rows: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise SizeMismatch(f"n must be a positive integer, got {self.n!r}")
        ents = dict(self.entries)
        for (i, j), s in ents.items():
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise IndexOutOfRange(f"entry ({i}, {j}) outside [1, {self.n}]")
            if isinstance(s, bool) or not isinstance(s, int):
                raise InputError(f"order at ({i}, {j}) must be an integer, got {s!r}")
            if s < 0:
                raise NegativeOrder(f"negative order {s} at ({i}, {j})")
        object.__setattr__(self, "entries", ents)
        object.__setattr__(self, "row_labels", _check_labels(self.row_labels, self.n, "row"))
        object.__setattr__(self, "col_labels", _check_labels(self.col_labels, self.n, "column"))
        rows = [[] for _ in range(self.n)]
        for (i, j), s in sorted(ents.items()):
            rows[i - 1].append((j - 1, s))
        object.__setattr__(self, "_rows", tuple(tuple(r) for r in rows))

    @property
    def nnz(self) -> int:
        return len(self.entries)

    @property
    def max_order(self) -> int:
        return max(self.entries.values(), default=0)

    def get(self, i: int, j: int) -> int | None:
        """Order at 1-based ``(i, j)``, or ``None`` if absent."""
        return self.entries.get((i, j))

    def row(self, i: int) -> tuple[tuple[int, int], ...]:
        """0-based ``(col, order)`` pairs of 0-based row ``i``, sorted by column."""
        return self._rows[i]

    def adjacency(self) -> list[list[int]]:
        """0-based per-row sorted column lists of the sparsity pattern."""
        return [[j for j, _ in r] for r in self._rows]

    def triplets(self) -> list[tuple[int, int, int]]:
        return [(i, j, s) for (i, j), s in sorted(self.entries.items())]

    def row_name(self, i: int) -> str:
        """Label of 1-based row ``i`` (falls back to ``f<i>``)."""
        return self.row_labels[i - 1] if self.row_labels else f"f{i}"

    def col_name(self, j: int) -> str:
        return self.col_labels[j - 1] if self.col_labels else f"x{j}"

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "SignatureMatrix":
        """Square submatrix on 1-based ``rows`` x ``cols``, renumbered in the given order."""
        if len(rows) != len(cols):
            raise SizeMismatch("submatrix must be square")
        rpos = {r: k for k, r in enumerate(rows, 1)}
        cpos = {c: k for k, c in enumerate(cols, 1)}
        ents = {}
        for r in rows:
            for j0, s in self._rows[r - 1]:
                k = cpos.get(j0 + 1)
                if k is not None:
                    ents[(rpos[r], k)] = s
        return SignatureMatrix(
            len(rows),
            ents,
            tuple(self.row_name(r) for r in rows) if self.row_labels else None,
            tuple(self.col_name(c) for c in cols) if self.col_labels else None,
        )

    def to_dense(self, fill=None) -> list[list]:
        out = [[fill] * self.n for _ in range(self.n)]
        for (i, j), s in self.entries.items():
            out[i - 1][j - 1] = s
        return out


def from_triplets(
    n: int,
    triplets: Iterable[tuple[int, int, int]],
    row_labels: Sequence[str] | None = None,
    col_labels: Sequence[str] | None = None,
) -> SignatureMatrix:
    """Build a :class:`SignatureMatrix` from 1-based ``(i, j, order)`` triplets.

    Repeating a position is an error rather than last-wins.
    """
    if not isinstance(n, int) or n < 1:
        raise SizeMismatch(f"n must be a positive integer, got {n!r}")
    ents: dict[tuple[int, int], int] = {}
    for i, j, s in triplets:
        if not (1 <= i <= n and 1 <= j <= n):
            raise IndexOutOfRange(f"entry ({i}, {j}) outside [1, {n}]")
        if s < 0:
            raise NegativeOrder(f"negative order {s} at ({i}, {j})")
        if (i, j) in ents:
            raise DuplicateEntry(f"duplicate entry ({i}, {j})")
        ents[(i, j)] = s
    return SignatureMatrix(n, ents, row_labels, col_labels)


@dataclass(frozen=True)
class Permutation:
    """Row and column permutations, 1-based.

    Position ``k`` of the permuted matrix holds original row ``row_perm[k-1]``
    (likewise for columns).
    """

    row_perm: tuple[int, ...]
    col_perm: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "row_perm", tuple(self.row_perm))
        object.__setattr__(self, "col_perm", tuple(self.col_perm))
        for name, p in (("row_perm", self.row_perm), ("col_perm", self.col_perm)):
            if sorted(p) != list(range(1, len(p) + 1)):
                raise InputError(f"{name} is not a permutation of 1..{len(p)}")
        if len(self.row_perm) != len(self.col_perm):
            raise SizeMismatch("row and column permutations differ in length")

    @property
    def n(self) -> int:
        return len(self.row_perm)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)), tuple(range(1, n + 1)))

    def inverse(self) -> "Permutation":
        ri = [0] * self.n
        ci = [0] * self.n
        for k, r in enumerate(self.row_perm, 1):
            ri[r - 1] = k
        for k, c in enumerate(self.col_perm, 1):
            ci[c - 1] = k
        return Permutation(tuple(ri), tuple(ci))


def permute(m: SignatureMatrix, p: Permutation) -> SignatureMatrix:
    """Reorder rows and columns: new ``(i', j')`` is old ``(row_perm[i'], col_perm[j'])``."""
    if p.n != m.n:
        raise SizeMismatch(f"permutation of size {p.n} applied to matrix of size {m.n}")
    inv = p.inverse()
    ents = {
        (inv.row_perm[i - 1], inv.col_perm[j - 1]): s for (i, j), s in m.entries.items()
    }
    rl = tuple(m.row_labels[r - 1] for r in p.row_perm) if m.row_labels else None
    cl = tuple(m.col_labels[c - 1] for c in p.col_perm) if m.col_labels else None
    return SignatureMatrix(m.n, ents, rl, cl)


def _int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected integer {what}, got {tok!r}", line=lineno) from None


def read_sigma_file(text: str, sentinel: int | None = None) -> SignatureMatrix:
    """Parse exchange-format text.

    When ``sentinel`` is given, entry lines carrying that order are read as
    absent; this accepts dense exports that use a placeholder for minus
    infinity.
    """
    n = None
    rows = cols = None
    ents: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        key = tok[0]
        if n is None:
            if key != "n":
                raise ParseError("first statement must be 'n <N>'", line=lineno)
            if len(tok) == 3:
                r, c = _int(tok[1], lineno, "row count"), _int(tok[2], lineno, "column count")
                if r != c:
                    raise ParseError(
                        f"rectangular header {r}x{c}: only square matrices are supported",
                        line=lineno,
                    )
                n = r
            elif len(tok) == 2:
                n = _int(tok[1], lineno, "size")
            else:
                raise ParseError("malformed size header", line=lineno)
            if n < 1:
                raise ParseError(f"size must be positive, got {n}", line=lineno)
        elif key in ("rows", "cols"):
            names = tok[1:]
            if len(names) != n:
                raise ParseError(f"'{key}' needs exactly {n} names, got {len(names)}", line=lineno)
            if len(set(names)) != n:
                raise ParseError(f"'{key}' names are not unique", line=lineno)
            if key == "rows":
                if rows is not None:
                    raise ParseError("repeated 'rows' line", line=lineno)
                rows = names
            else:
                if cols is not None:
                    raise ParseError("repeated 'cols' line", line=lineno)
                cols = names
        elif key == "s":
            if len(tok) != 4:
                raise ParseError("entry line must be 's <i> <j> <order>'", line=lineno)
            i = _int(tok[1], lineno, "row index")
            j = _int(tok[2], lineno, "column index")
            s = _int(tok[3], lineno, "order")
            if sentinel is not None and s == sentinel:
                continue
            if not (1 <= i <= n and 1 <= j <= n):
                raise IndexOutOfRange(f"entry ({i}, {j}) outside [1, {n}]", line=lineno)
            if s < 0:
                raise NegativeOrder(f"negative order {s} at ({i}, {j})", line=lineno)
            if (i, j) in ents:
                raise DuplicateEntry(f"duplicate entry ({i}, {j})", line=lineno)
            ents[(i, j)] = s
        elif key == "n":
            raise ParseError("repeated size header", line=lineno)
        else:
            raise ParseError(f"unknown statement {key!r}", line=lineno)
    if n is None:
        raise ParseError("missing 'n <N>' header", line=1)
    return SignatureMatrix(n, ents, rows, cols)


def write_sigma_file(m: SignatureMatrix, sentinel: int | None = None) -> str:
    """Serialize ``m``; entry lines are sorted by ``(i, j)``.

    With ``sentinel`` every cell is written and absent ones carry the
    sentinel value.  Such output only reads back via
    ``read_sigma_file(text, sentinel=...)``.
    """
    out = [f"n {m.n}"]
    for key, labels in (("rows", m.row_labels), ("cols", m.col_labels)):
        if labels is None:
            continue
        for name in labels:
            if not name or any(ch.isspace() for ch in name) or name.startswith("#"):
                raise InputError(f"label {name!r} cannot be written to the exchange format")
        out.append(key + " " + " ".join(labels))
    if sentinel is None:
        out.extend(f"s {i} {j} {s}" for i, j, s in m.triplets())
    else:
        for i in range(1, m.n + 1):
            for j in range(1, m.n + 1):
                s = m.entries.get((i, j))
                out.append(f"s {i} {j} {sentinel if s is None else s}")
    return "\n".join(out) + "\n"
