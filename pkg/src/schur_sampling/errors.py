"""Exception hierarchy.

Everything raised for bad input derives from :class:`SchurSamplingError`
(a ``ValueError``); :class:`TooLarge` marks resource guards so callers such
as the CLI can tell the two apart.
"""


class SchurSamplingError(ValueError):
    pass


class TooLarge(SchurSamplingError):
    """A size guard (dense oracle, enumeration, gate budget) was exceeded."""


class InvalidYamanouchi(SchurSamplingError):
    def __init__(self, position: int, word: str = ""):
        self.position = position
        super().__init__(
            f"bit string {word!r} is not a Yamanouchi word: "
            f"prefix of length {position} has too many zeroes"
        )


class ParityMismatch(SchurSamplingError):
    pass


class NotStandard(SchurSamplingError):
    pass


class OutOfRange(SchurSamplingError):
    pass


class LengthMismatch(SchurSamplingError):
    pass


class NotBijection(SchurSamplingError):
    pass


class BadK(SchurSamplingError):
    pass


class DimensionMismatch(SchurSamplingError):
    pass


class PrefixTooLong(SchurSamplingError):
    pass


class OracleRequired(SchurSamplingError):
    pass


class BadPartition(SchurSamplingError):
    pass
