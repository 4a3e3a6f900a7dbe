import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from daestruct import (
    DuplicateEntry,
    IndexOutOfRange,
    NegativeOrder,
    ParseError,
    Permutation,
    SignatureMatrix,
    SizeMismatch,
    from_triplets,
    permute,
    read_sigma_file,
    write_sigma_file,
)
from daestruct.errors import InputError

CRANE_TRIPLETS = [
    (1, 1, 2), (1, 5, 0), (1, 6, 0),
    (2, 2, 2), (2, 5, 0), (2, 6, 0),
    (3, 3, 2), (3, 5, 0), (3, 6, 0), (3, 7, 0),
    (4, 4, 2), (4, 6, 0), (4, 8, 0),
    (5, 1, 0), (5, 3, 0), (5, 4, 0), (5, 5, 0),
    (6, 2, 0), (6, 4, 0), (6, 5, 0),
    (7, 1, 0),
    (8, 2, 0),
]


@st.composite
def matrices(draw, max_n=7, labels=None):
    n = draw(st.integers(1, max_n))
    cells = draw(st.sets(st.tuples(st.integers(1, n), st.integers(1, n)), max_size=n * n))
    ents = {c: draw(st.integers(0, 9)) for c in sorted(cells)}
    with_labels = draw(st.booleans()) if labels is None else labels
    rl = cl = None
    if with_labels:
        rl = tuple(f"r{i}" for i in range(n))
        cl = tuple(f"c_{j}" for j in range(n))
    return SignatureMatrix(n, ents, rl, cl)


@st.composite
def perms(draw, n):
    rows = draw(st.permutations(range(1, n + 1)))
    cols = draw(st.permutations(range(1, n + 1)))
    return Permutation(tuple(rows), tuple(cols))


def test_singleton():
    m = from_triplets(1, [(1, 1, 3)])
    assert m.n == 1 and m.get(1, 1) == 3 and m.nnz == 1


def test_crane_triplets_give_expected_matrix(crane):
    m = from_triplets(8, CRANE_TRIPLETS)
    assert m.entries == crane.entries
    assert m.nnz == 22


def test_duplicate_triplet_rejected():
    with pytest.raises(DuplicateEntry):
        from_triplets(2, [(1, 1, 0), (1, 1, 1)])


@pytest.mark.parametrize("trip", [(0, 1, 0), (1, 3, 0), (3, 1, 0)])
def test_index_out_of_range(trip):
    with pytest.raises(IndexOutOfRange):
        from_triplets(2, [trip])


def test_negative_order():
    with pytest.raises(NegativeOrder):
        from_triplets(2, [(1, 1, -1)])


def test_nonpositive_size():
    with pytest.raises(InputError):
        from_triplets(0, [])


def test_label_validation():
    with pytest.raises(InputError):
        SignatureMatrix(2, {}, ("a", "a"), None)
    with pytest.raises(InputError):
        SignatureMatrix(2, {}, ("a",), None)


def test_absent_is_none_and_dense_view():
    m = from_triplets(2, [(1, 2, 4)])
    assert m.get(1, 1) is None
    assert m.to_dense() == [[None, 4], [None, None]]
    assert m.max_order == 4


def test_read_minimal():
    m = read_sigma_file("n 1\ns 1 1 3\n")
    assert m.entries == {(1, 1): 3}


def test_read_index_out_of_range_reports_line():
    with pytest.raises(IndexOutOfRange) as ei:
        read_sigma_file("n 2\ns 1 3 0\n")
    assert ei.value.line == 2


def test_read_comments_blank_lines_and_labels():
    text = "# a comment\n\nn 2\nrows a b\ncols x y\n# another\ns 2 1 1\ns 1 2 0\n"
    m = read_sigma_file(text)
    assert m.row_labels == ("a", "b") and m.col_labels == ("x", "y")
    assert m.entries == {(1, 2): 0, (2, 1): 1}


@pytest.mark.parametrize(
    "text,line",
    [
        ("s 1 1 0\n", 1),
        ("n 2\nq 1\n", 2),
        ("n 2\ns 1 1\n", 2),
        ("n 2\ns 1 x 0\n", 2),
        ("n 2\nrows a\n", 2),
        ("n 2\nn 2\n", 2),
        ("", 1),
        ("n 0\n", 1),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as ei:
        read_sigma_file(text)
    assert ei.value.line == line


def test_duplicate_in_file():
    with pytest.raises(DuplicateEntry) as ei:
        read_sigma_file("n 2\ns 1 1 0\ns 1 1 2\n")
    assert ei.value.line == 3


def test_rectangular_header():
    assert read_sigma_file("n 2 2\ns 1 1 0\n").n == 2
    with pytest.raises(ParseError):
        read_sigma_file("n 2 3\n")


def test_crane_file_matches_triplets(crane):
    assert crane == from_triplets(
        8, CRANE_TRIPLETS,
        ("f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8"),
        ("x", "z", "d", "r", "theta", "tau", "u1", "u2"),
    )


def test_write_is_sorted():
    m = from_triplets(3, [(3, 1, 0), (1, 2, 1), (1, 1, 2)])
    lines = write_sigma_file(m).splitlines()
    assert lines == ["n 3", "s 1 1 2", "s 1 2 1", "s 3 1 0"]


def test_write_rejects_unwritable_labels():
    m = SignatureMatrix(1, {(1, 1): 0}, ("has space",), None)
    with pytest.raises(InputError):
        write_sigma_file(m)


@given(matrices())
def test_round_trip(m):
    assert read_sigma_file(write_sigma_file(m)) == m


@given(matrices(max_n=5), st.integers(-2000, -1))
def test_sentinel_round_trip(m, sentinel):
    text = write_sigma_file(m, sentinel=sentinel)
    assert len([ln for ln in text.splitlines() if ln.startswith("s ")]) == m.n * m.n
    assert read_sigma_file(text, sentinel=sentinel) == m


def test_permute_identity(crane):
    assert permute(crane, Permutation.identity(8)) == crane


def test_permute_crane_to_block_form(crane):
    rows = ["f4", "f3", "f5", "f6", "f1", "f2", "f8", "f7"]
    cols = ["u2", "u1", "d", "r", "tau", "theta", "z", "x"]
    p = Permutation(
        tuple(crane.row_labels.index(r) + 1 for r in rows),
        tuple(crane.col_labels.index(c) + 1 for c in cols),
    )
    pm = permute(crane, p)
    assert pm.row_labels == tuple(rows) and pm.col_labels == tuple(cols)
    assert pm.nnz == crane.nnz
    # the displayed block form: no entry below the 4|2|1|1 block diagonal
    bounds = [0, 4, 6, 7, 8]
    block = {p: k for k in range(4) for p in range(bounds[k] + 1, bounds[k + 1] + 1)}
    assert all(block[i] <= block[j] for i, j in pm.entries)
    assert pm.get(5, 7) is None and pm.get(1, 4) == 2


def test_permute_swap():
    m = from_triplets(2, [(1, 1, 0), (2, 2, 1)])
    pm = permute(m, Permutation((2, 1), (2, 1)))
    assert pm.entries == {(1, 1): 1, (2, 2): 0}


def test_permute_size_mismatch():
    with pytest.raises(SizeMismatch):
        permute(from_triplets(2, []), Permutation.identity(3))


def test_permutation_validation():
    with pytest.raises(ValueError):
        Permutation((1, 1), (1, 2))


@settings(max_examples=60)
@given(st.data())
def test_permute_inverse_is_identity(data):
    m = data.draw(matrices())
    p = data.draw(perms(m.n))
    pm = permute(m, p)
    assert pm.nnz == m.nnz
    assert permute(pm, p.inverse()) == m
    for (i, j), s in pm.entries.items():
        assert m.get(p.row_perm[i - 1], p.col_perm[j - 1]) == s


def test_submatrix(crane):
    sub = crane.submatrix([1, 2], [6, 5])
    assert sub.entries == {(1, 1): 0, (1, 2): 0, (2, 1): 0, (2, 2): 0}
    assert sub.row_labels == ("f1", "f2") and sub.col_labels == ("tau", "theta")


def test_immutable(crane):
    with pytest.raises(Exception):
        crane.n = 3
