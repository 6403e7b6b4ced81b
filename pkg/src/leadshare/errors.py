"""Exception taxonomy.

Three branches map onto the CLI exit codes: ConfigError -> 2,
DataError -> 3, NumericError -> 4. Anything else escaping a stage is a
plain bug (exit 1).
"""


class LeadshareError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(LeadshareError):
    """Invalid configuration file, key, or value."""


class DataError(LeadshareError):
    """Malformed, inconsistent, or missing input data."""


class NumericError(LeadshareError):
    """Algorithmic preconditions not met (too few points, degenerate input)."""


class MalformedRecord(DataError):
    """Syntactically bad input line."""

    def __init__(self, line_no, field, message):
        self.line_no = line_no
        self.field = field
        super().__init__(f"line {line_no}, field {field!r}: {message}")


class InvariantViolation(DataError):
    """Syntactically valid record that breaks a domain invariant."""

    def __init__(self, line_no, field, message):
        self.line_no = line_no
        self.field = field
        super().__init__(f"line {line_no}, field {field!r}: {message}")


class UnknownCountry(DataError):
    def __init__(self, country):
        self.country = country
        super().__init__(f"country not in region table: {country!r}")


class TableIntegrityError(DataError):
    """Packaged static table failed checksum or structural validation."""


class DuplicatePaperId(DataError):
    def __init__(self, paper_id):
        self.paper_id = paper_id
        super().__init__(f"duplicate paper id: {paper_id!r}")


class AuthorNotOnPaper(DataError):
    def __init__(self, author_id, paper_id):
        super().__init__(f"author {author_id!r} not on paper {paper_id!r}")


class EmptyCorpus(DataError):
    pass


class InconsistentPair(DataError):
    pass


class MissingUpstream(DataError):
    """A required upstream stage artifact does not exist."""


class HashMismatch(DataError):
    """An upstream artifact exists but no longer matches the manifest."""


class BelowRange(NumericError):
    def __init__(self, value, lower):
        super().__init__(f"value {value} below first bin edge {lower}")


class VocabularyTooSmall(NumericError):
    pass


class NonConvergence(NumericError):
    pass


class AmbiguousLabeling(NumericError):
    pass


class NoKnownVerbs(NumericError):
    pass


class TooFewExamples(NumericError):
    pass


class SingularDesign(NumericError):
    pass


class NoLeaders(NumericError):
    pass


class NoSupporters(NumericError):
    pass


class TooFewPoints(NumericError):
    pass


class ZeroVariance(NumericError):
    pass
