"""Exception hierarchy shared by every kindc module."""

from __future__ import annotations


class KindError(Exception):
    """Base class for all kindc errors."""


# -- knowledge base ---------------------------------------------------------

class InvalidAsset(KindError, ValueError):
    pass


class CycleError(KindError):
    """An inheritance or inclusion assertion would close a cycle."""


class ConflictError(KindError):
    """Two assertions (or rules) disagree about the same subject."""


# -- canonical forms --------------------------------------------------------

class NoCanonicalTarget(KindError):
    """Canonicalization rules for an asset are ambiguous or ill-formed."""


# -- parsing ----------------------------------------------------------------

class SidlSyntaxError(KindError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        self.bare_message = message
        where = f"{line}:{column}: " if line else ""
        super().__init__(f"{where}{message}")


class UnknownKeyword(SidlSyntaxError):
    pass


class ContractSyntaxError(SidlSyntaxError):
    pass


# -- kinding ----------------------------------------------------------------

class UnboundIdentifier(KindError):
    pass


class UnknownKind(KindError):
    pass


class UndecidableContract(KindError):
    pass


# -- bridging / codegen -----------------------------------------------------

class NoBridge(KindError):
    def __init__(self, message: str, diagnostics: tuple[str, ...] = ()):
        self.diagnostics = tuple(diagnostics)
        super().__init__(message)


class UnrealizableConversion(KindError):
    pass


# -- KB files ---------------------------------------------------------------

class VersionMismatch(KindError):
    pass


class KbParseError(KindError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")
