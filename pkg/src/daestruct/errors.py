"""Exception hierarchy shared by every stage of the analysis."""

from __future__ import annotations


class DaeStructError(Exception):
    """Base class for all errors raised by :mod:`daestruct`."""


class InputError(DaeStructError, ValueError):
    """Malformed input: bad indices, bad file contents, bad model text.

    ``line`` (and ``column`` for the DAE language) locate the problem when
    the error comes from a parser.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)


class IndexOutOfRange(InputError):
    pass


class DuplicateEntry(InputError):
    pass


class NegativeOrder(InputError):
    pass


class ParseError(InputError):
    pass


class SizeMismatch(InputError):
    pass


class DaeSyntaxError(InputError):
    pass


class DerOfNonVariable(InputError):
    pass


class NonPositiveDerOrder(InputError):
    pass


class NonSquareModel(InputError):
    def __init__(self, n_equations: int, n_variables: int):
        self.n_equations = n_equations
        self.n_variables = n_variables
        super().__init__(
            f"model is not square: {n_equations} equations, {n_variables} variables"
        )


class StructurallyIllPosed(DaeStructError):
    """No finite transversal exists.

    ``witness`` is an :class:`~daestruct.lap.IllPosedWitness`: a set of rows
    whose finite entries cover fewer columns than there are rows.
    """

    def __init__(self, witness):
        self.witness = witness
        super().__init__(
            f"structurally ill-posed: rows {sorted(witness.rows)} only reach "
            f"columns {sorted(witness.columns)}"
        )


class NotOptimalTransversal(DaeStructError):
    pass


class NotPerfectlyMatched(DaeStructError):
    pass


class TooLarge(DaeStructError, ValueError):
    pass


class InsufficientPoints(DaeStructError, ValueError):
    pass


class NonPositiveTime(DaeStructError, ValueError):
    pass
