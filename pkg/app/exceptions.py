class DensopsError(ValueError):
    """Base error for every failure surfaced by the package.

    Each subclass carries a machine-readable ``code`` that the CLI and the
    HTTP API put in their error envelope.
    """

    code = "E_INTERNAL"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message}


class SingularWeightError(DensopsError):
    code = "E_SINGULAR_WEIGHT"


class ExcludedParameterError(DensopsError):
    code = "E_EXCLUDED_PARAM"


class OrderError(DensopsError):
    code = "E_ORDER"


class DimensionError(DensopsError):
    code = "E_DIM"


class ParseError(DensopsError):
    code = "E_PARSE"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None and column is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)

    def to_dict(self) -> dict:
        out = super().to_dict()
        if self.line is not None:
            out.update(line=self.line, column=self.column)
        return out


class TableError(DensopsError):
    code = "E_TABLE"


class InconsistentSystemError(DensopsError):
    code = "E_INCONSISTENT"
