"""
Error Hierarchy

Every failure the toolkit reports is a MultiCastError. The CLI maps each
family to a process exit code through the ``exit_code`` class attribute.
"""

EXIT_USAGE = 1
EXIT_IO = 2
EXIT_BACKEND = 3
EXIT_DATA = 4


class MultiCastError(Exception):
    """Base class for all toolkit errors."""

    exit_code = EXIT_USAGE


# Configuration / usage


class ConfigError(MultiCastError):
    """Invalid configuration or command-line usage."""

    exit_code = EXIT_USAGE


class InvalidConfig(ConfigError):
    pass


class AlphabetTooSmall(ConfigError):
    def __init__(self, alphabet_size: int):
        self.alphabet_size = alphabet_size
        super().__init__(f"SAX alphabet size must be >= 2, got {alphabet_size}")


class DigitalAlphabetOverflow(ConfigError):
    def __init__(self, alphabet_size: int):
        self.alphabet_size = alphabet_size
        super().__init__(f"digital SAX alphabet requires alphabet size a <= 10, got {alphabet_size}")


class MissingEndpoint(ConfigError):
    def __init__(self):
        super().__init__("http backend requires an endpoint (--endpoint)")


class UnknownMethod(ConfigError):
    def __init__(self, name: str, valid: list[str]):
        self.name = name
        self.valid = valid
        super().__init__(f"unknown method '{name}'; valid methods: {', '.join(valid)}, external:<csv>")


# Input / output


class DatasetIOError(MultiCastError):
    """File could not be read or written."""

    exit_code = EXIT_IO


# Generation backends


class BackendError(MultiCastError):
    exit_code = EXIT_BACKEND


class BackendUnreachable(BackendError):
    pass


class BackendTimeout(BackendError):
    pass


class ConstraintUnsupported(BackendError):
    pass


class HttpStatus(BackendError):
    def __init__(self, code: int, message: str = ""):
        self.code = code
        super().__init__(f"HTTP {code}: {message}" if message else f"HTTP {code}")


class MalformedResponse(BackendError):
    pass


class AllSamplesInvalid(BackendError):
    def __init__(self, num_samples: int):
        self.num_samples = num_samples
        super().__init__(f"none of the {num_samples} sampled continuations contained a complete timestamp")


# Data


class DataError(MultiCastError):
    exit_code = EXIT_DATA


class NonFinite(DataError):
    def __init__(self, value: float, row: int, col: int):
        self.value = value
        self.row = row
        self.col = col
        super().__init__(f"non-finite value {value!r} at row {row}, column {col}")


class EmptySeries(DataError):
    def __init__(self, message: str = "series has no rows"):
        super().__init__(message)


class DuplicateDimName(DataError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"duplicate dimension name '{name}'")


class EmptyColumn(DataError):
    def __init__(self):
        super().__init__("cannot fit scaling on an empty column")


class OutOfRangeInt(DataError):
    def __init__(self, value: int, digit_budget: int):
        self.value = value
        self.digit_budget = digit_budget
        super().__init__(f"integer {value} does not fit in {digit_budget} digits")


class DigitOverflow(DataError):
    def __init__(self, row: int, col: int, value: int):
        self.row = row
        self.col = col
        self.value = value
        super().__init__(f"value {value} at row {row}, column {col} does not fit the layout")


class UnknownDimension(DataError):
    def __init__(self, name: str, valid: tuple[str, ...]):
        self.name = name
        self.valid = valid
        super().__init__(f"unknown dimension '{name}'; series has: {', '.join(valid)}")


class RangeOverflow(DataError):
    def __init__(self, low: float, high: float):
        self.low = low
        self.high = high
        super().__init__(f"value range [{low:g}, {high:g}] is too wide to scale in floating point")


class NoCompleteTimestamp(DataError):
    def __init__(self):
        super().__init__("continuation contains no complete timestamp")


class EmptyInput(DataError):
    pass


class LengthMismatch(DataError):
    def __init__(self, left: int, right: int):
        self.left = left
        self.right = right
        super().__init__(f"length mismatch: {left} vs {right}")


class TooShort(DataError):
    pass


class SingularDesign(DataError):
    pass


class EmptyHistory(DataError):
    def __init__(self):
        super().__init__("history is empty")


class BadSplit(DataError):
    def __init__(self, test_len: int, n: int):
        self.test_len = test_len
        self.n = n
        super().__init__(f"test length must satisfy 1 <= test_len < {n}, got {test_len}")


class ParseError(DataError):
    def __init__(self, row: int, col: int, text: str):
        self.row = row
        self.col = col
        self.text = text
        super().__init__(f"cannot parse {text!r} as a number at row {row}, column {col}")


class RaggedRows(DataError):
    def __init__(self, row: int | None = None, detail: str = ""):
        self.row = row
        where = f" at row {row}" if row is not None else ""
        super().__init__(f"ragged rows{where}{': ' + detail if detail else ''}")
