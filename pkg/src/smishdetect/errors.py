"""Exception hierarchy shared by all modules."""


class SmishError(Exception):
    """Base class for data, dictionary and model errors."""


class CorpusError(SmishError):
    pass


class LingoError(SmishError):
    pass


class DuplicateKeyError(LingoError):
    def __init__(self, key, first_line, second_line):
        super().__init__(
            f"duplicate key {key!r} on lines {first_line} and {second_line}"
        )
        self.key = key
        self.lines = (first_line, second_line)


class FingerprintMismatchError(SmishError):
    pass


class ModelFormatError(SmishError):
    """Model file could not be decoded."""


class ModelVersionError(ModelFormatError):
    pass


class ModelChecksumError(ModelFormatError):
    pass


class ModelTruncatedError(ModelFormatError):
    pass
