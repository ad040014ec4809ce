"""Exception types shared across the package."""


class SubstrateError(Exception):
    """Base class; ``reason`` is a short machine-readable tag."""

    reason = "error"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details


class SubShapeNotContained(SubstrateError):
    reason = "sub_shape_not_contained"


class NonInvertibleMatrix(SubstrateError):
    reason = "non_invertible_matrix"


class RuleError(SubstrateError):
    reason = "invalid_rule"


class SaturationCapExceeded(SubstrateError):
    """Language saturation hit its depth cap; ``partial`` holds what was found."""

    reason = "saturation_cap_exceeded"

    def __init__(self, message="", partial=None, depth=None):
        super().__init__(message)
        self.partial = partial
        self.depth = depth


class AmbiguousPredecessor(SubstrateError):
    reason = "ambiguous_predecessor"


class NotInvariant(SubstrateError):
    reason = "not_invariant"


class NotExpansive(SubstrateError):
    reason = "not_expansive"


class IllegalPatch(SubstrateError):
    reason = "illegal_patch"


class NotStabilized(SubstrateError):
    """Fibre count did not stabilise; ``lower_bound`` is the best count seen."""

    reason = "not_stabilized"

    def __init__(self, message="", lower_bound=None):
        super().__init__(message)
        self.lower_bound = lower_bound


class UnsupportedSource(SubstrateError):
    reason = "unsupported_source"


class ConfigRadiusUnstable(SubstrateError):
    reason = "config_radius_unstable"


class UCViolation(SubstrateError):
    reason = "uc_violation"


class PatchOutsideDeclaredLanguage(SubstrateError):
    reason = "patch_outside_declared_language"


class AlphabetMismatch(SubstrateError):
    reason = "alphabet_mismatch"


class ValidationError(SubstrateError):
    reason = "validation_error"


class LocalSurjectivityFailure(SubstrateError):
    reason = "local_surjectivity_failure"
