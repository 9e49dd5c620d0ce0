"""Exception hierarchy for qklab.

Every error raised on bad input derives from :class:`QKLabError`, which the
command line maps to exit code 2.
"""


class QKLabError(Exception):
    """Base class for all qklab input and model errors."""


class ZeroVector(QKLabError):
    pass


class ZeroForm(QKLabError):
    pass


class DegenerateSection(QKLabError):
    pass


class InvalidModel(QKLabError):
    pass


class DimensionMismatch(QKLabError):
    pass


class EmptyList(QKLabError):
    pass


class EmptySubset(QKLabError):
    pass


class ZeroSubspace(QKLabError):
    pass


class RankMismatch(QKLabError):
    pass


class TooManyProducts(QKLabError):
    pass


class DependentCoherentStates(QKLabError):
    pass


class IrrationalInput(QKLabError):
    pass


class SchemaError(QKLabError):
    """Scenario document failed validation.

    ``pointer`` is the JSON pointer of the offending field, e.g. ``/model/k1``.
    """

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer
        self.message = message
