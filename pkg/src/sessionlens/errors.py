"""Exception hierarchy shared by every sessionlens module."""


class SessionlensError(Exception):
    """Base class for all errors raised by this package."""


class MalformedLine(SessionlensError):
    """An access-log line does not match the configured format grammar."""

    def __init__(self, reason: str, line_number: int | None = None):
        self.reason = reason
        self.line_number = line_number
        where = f" (line {line_number})" if line_number is not None else ""
        super().__init__(f"malformed log line{where}: {reason}")


class InvalidTimestamp(MalformedLine):
    """The bracketed timestamp field is not a valid instant."""

    def __init__(self, text: str, line_number: int | None = None):
        super().__init__(f"invalid timestamp {text!r}", line_number)
        self.text = text


class NotAbsoluteUrl(SessionlensError):
    def __init__(self, url: str):
        self.url = url
        super().__init__(f"not an absolute URL: {url!r}")


class MalformedTriple(SessionlensError):
    def __init__(self, line_number: int, text: str):
        self.line_number = line_number
        self.text = text
        super().__init__(f"malformed triple at line {line_number}: {text!r}")


class CyclicHierarchy(SessionlensError):
    """The subclass edges of an ontology contain a cycle."""

    def __init__(self, cls: str):
        self.cls = cls
        super().__init__(f"subclass hierarchy contains a cycle through {cls!r}")


class IoFailure(SessionlensError):
    def __init__(self, path, cause: OSError):
        self.path = path
        self.cause = cause
        super().__init__(f"I/O failure on {path}: {cause}")


class SchemaMismatch(SessionlensError):
    def __init__(self, line_number: int, version):
        self.line_number = line_number
        self.version = version
        super().__init__(
            f"unsupported schema version {version!r} at line {line_number}"
        )


class MalformedRecord(SessionlensError):
    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"malformed session record at line {line_number}: {reason}")


class QuerySyntaxError(SessionlensError):
    """Query text rejected by the parser; carries the offending position."""

    def __init__(self, position: int, expected: str, found: str = ""):
        self.position = position
        self.expected = expected
        self.found = found
        detail = f", found {found}" if found else ""
        super().__init__(f"syntax error at position {position}: expected {expected}{detail}")


class UnknownAtom(SessionlensError):
    def __init__(self, name: str, position: int | None = None):
        self.name = name
        self.position = position
        super().__init__(f"unknown atom {name!r}")


class EmptySession(SessionlensError):
    def __init__(self):
        super().__init__("session has no events")


class EmptyCorpus(SessionlensError):
    def __init__(self):
        super().__init__("no sessions to aggregate")


class ConfigError(SessionlensError):
    def __init__(self, message: str):
        super().__init__(message)
