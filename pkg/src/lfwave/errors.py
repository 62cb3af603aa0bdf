"""Exception types shared across the package."""


class LFWaveError(Exception):
    """Base class for every error raised by lfwave."""


class ParameterError(LFWaveError, ValueError):
    """Invalid or mismatched (p, s, N) parameters or arguments."""


class CosetNonconstantError(LFWaveError, ValueError):
    """A quantity was requested on a coset where it is not constant."""


class TreeStructureError(LFWaveError, ValueError):
    """The node arena does not describe a rooted tree."""


class BasicStepError(LFWaveError, ValueError):
    """A subtree move violates the admissibility rules.

    ``reason`` is one of ``"target inside subtree"``,
    ``"window context mismatch"`` or ``"not applicable"``.
    """

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


class MaskError(LFWaveError, ValueError):
    """A mask assignment breaks the support, bound or unit-value rules."""


class SchemaError(LFWaveError, ValueError):
    """A JSON document does not match the lfwave/1 schema."""
