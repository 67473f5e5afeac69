"""Exception hierarchy with stable error codes and CLI exit statuses."""


class LoopHomError(Exception):
    """Base class; ``code`` is the stable identifier emitted in error JSON."""

    code = "Error"
    exit_status = 1

    def __init__(self, message="", **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_json(self):
        out = {"error": self.code, "message": self.message}
        if self.details:
            out["details"] = self.details
        return out


class ValidationError(LoopHomError):
    code = "ValidationError"
    exit_status = 2


class NonSquareMatrix(ValidationError):
    code = "NonSquareMatrix"


class SymmetryViolation(ValidationError):
    code = "SymmetryViolation"


class NotUnimodular(ValidationError):
    code = "NotUnimodular"


class ExcludedDimension(ValidationError):
    code = "ExcludedDimension"


class OddRankSkew(ValidationError):
    code = "OddRankSkew"


class UnknownPreset(ValidationError):
    code = "UnknownPreset"


class ParityMismatch(ValidationError):
    code = "ParityMismatch"


class NotUnimodularChange(ValidationError):
    code = "NotUnimodularChange"


class InvalidRing(ValidationError):
    code = "InvalidRing"


class DimensionMismatch(ValidationError):
    code = "DimensionMismatch"


class ParityUnsupported(ValidationError):
    code = "ParityUnsupported"


class NotApplicable(ValidationError):
    code = "NotApplicable"


class SizeCapExceeded(LoopHomError):
    code = "SizeCapExceeded"
    exit_status = 3


class InternalInconsistency(LoopHomError):
    code = "InternalInconsistency"
    exit_status = 4


class TorsionInU(InternalInconsistency):
    code = "TorsionInU"


class CompositionNotZero(InternalInconsistency):
    code = "CompositionNotZero"


class NotDivisible(LoopHomError):
    """Raised by the division step; escalated to TheoremViolation in reports."""

    code = "NotDivisible"
    exit_status = 4


class TheoremViolation(InternalInconsistency):
    code = "TheoremViolation"


class VerificationFailed(InternalInconsistency):
    code = "VerificationFailed"
