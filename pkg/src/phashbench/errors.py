"""Exception hierarchy shared by every phashbench module."""


class PhashbenchError(Exception):
    """Base class; the CLI maps subclasses to exit codes."""


class DataError(PhashbenchError):
    """Input data is missing, malformed or inconsistent."""


class MalformedStream(DataError):
    pass


class UnsupportedFormat(DataError):
    pass


class NonPow2Input(ValueError, PhashbenchError):
    pass


class UnknownAlgorithm(ValueError, PhashbenchError):
    pass


class UnknownModification(ValueError, PhashbenchError):
    pass


class ImageTooSmall(DataError):
    pass


class LengthMismatch(ValueError, PhashbenchError):
    pass


class AlgorithmMismatch(ValueError, PhashbenchError):
    pass


class InsufficientSample(ValueError, PhashbenchError):
    pass


class DegenerateSample(ValueError, PhashbenchError):
    pass


class EmptySample(ValueError, PhashbenchError):
    pass


class MixedAlgorithms(ValueError, PhashbenchError):
    pass


class EmptyCorpus(DataError):
    pass


class UnreadablePath(DataError):
    pass


class CorpusTooSmall(DataError):
    pass


class MissingHashes(DataError):
    pass


class FormatError(DataError):
    pass


class LengthInconsistency(DataError):
    pass


class NothingToReport(DataError):
    pass


class MissingGoldens(DataError):
    pass
