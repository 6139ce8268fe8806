"""Exception hierarchy: every operational failure carries a machine-readable code."""

from __future__ import annotations


class LungFieldError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__


class UnsupportedFormatError(LungFieldError):
    code = "unsupported_format"


class CorruptHeaderError(LungFieldError):
    code = "corrupt_header"


class InvalidSpecError(LungFieldError):
    code = "invalid_spec"


class NoBodyFoundError(LungFieldError):
    code = "no_body_found"


class NoCandidateRegionError(LungFieldError):
    code = "no_candidate_region"


class MissingSideError(LungFieldError):
    code = "missing_side"

    def __init__(self, side: str, message: str = ""):
        super().__init__(message or f"no seed candidate on the {side} side")
        self.side = side


class OutOfBoundsError(LungFieldError):
    code = "out_of_bounds"


class SeedOutsideDomainError(LungFieldError):
    code = "seed_outside_domain"


class InvalidThetaError(LungFieldError):
    code = "invalid_theta"


class EmptyResultError(LungFieldError):
    code = "empty_result"

    def __init__(self, side: str = "", message: str = ""):
        super().__init__(message or (f"empty result for {side} side" if side else "empty result"))
        self.side = side


class WrongModeError(LungFieldError):
    code = "wrong_mode"


class StaleRecordError(LungFieldError):
    code = "stale_record"


class GeometryMismatchError(LungFieldError):
    code = "geometry_mismatch"


class EmptyInputError(LungFieldError):
    code = "empty_input"


class IncompleteTableError(LungFieldError):
    code = "incomplete_table"


class ConstantSeriesError(LungFieldError):
    code = "constant_series"


class IndexOutOfRangeError(LungFieldError):
    code = "index_out_of_range"


class InvalidWindowError(LungFieldError):
    code = "invalid_window"


class InvalidStrokeError(LungFieldError):
    code = "invalid_stroke"


class NoMaskError(LungFieldError):
    code = "no_mask"


class UnknownSessionError(LungFieldError):
    code = "unknown_session"
