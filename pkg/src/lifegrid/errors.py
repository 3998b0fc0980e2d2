"""Exception types shared across the engine.

Every error the service layer turns into an HTTP response carries a stable
machine-readable ``code`` so clients can dispatch on it.
"""


class LifegridError(Exception):
    """Base class for all engine errors."""

    code = "error"


# --- dataset loading ---------------------------------------------------------

class DatasetError(LifegridError):
    code = "dataset_error"


class MissingManifest(DatasetError):
    code = "missing_manifest"


class MalformedRow(DatasetError):
    code = "malformed_row"

    def __init__(self, file: str, line: int, message: str):
        super().__init__(f"{file}:{line}: {message}")
        self.file = file
        self.line = line


class NonMonotonicTimestamps(DatasetError):
    code = "non_monotonic_timestamps"

    def __init__(self, day_id: str):
        super().__init__(f"timestamps not strictly increasing in day {day_id!r}")
        self.day_id = day_id


class DanglingReference(DatasetError):
    code = "dangling_reference"


class BadImage(DatasetError):
    code = "bad_image"


class IoFailure(DatasetError):
    code = "io_failure"


class UnsortedSamples(DatasetError):
    code = "unsorted_samples"


# --- raster / PPM ------------------------------------------------------------

class PpmError(LifegridError):
    code = "ppm_error"


class BadMagic(PpmError):
    code = "bad_magic"


class BadHeader(PpmError):
    code = "bad_header"


class UnsupportedMaxval(PpmError):
    code = "unsupported_maxval"


class TruncatedPixelData(PpmError):
    code = "truncated_pixel_data"


# --- segmentation ------------------------------------------------------------

class EmptyDay(LifegridError):
    code = "empty_day"


class BadRate(LifegridError):
    code = "bad_rate"


# --- descriptors -------------------------------------------------------------

class RasterTooSmall(LifegridError):
    code = "raster_too_small"


class EmptyMask(LifegridError):
    code = "empty_mask"


class AllBlank(LifegridError):
    code = "all_blank"


class ZeroVector(LifegridError):
    code = "zero_vector"


class DimensionMismatch(LifegridError):
    code = "dimension_mismatch"


# --- feature maps ------------------------------------------------------------

class EmptyInput(LifegridError):
    code = "empty_input"


class OutOfBounds(LifegridError):
    code = "out_of_bounds"


# --- query -------------------------------------------------------------------

class UnknownConcept(LifegridError):
    code = "unknown_concept"

    def __init__(self, concept_id: str):
        super().__init__(f"unknown concept {concept_id!r}")
        self.concept_id = concept_id


class InvalidQuery(LifegridError):
    code = "invalid_query"


# --- similarity --------------------------------------------------------------

class UnknownSegment(LifegridError):
    code = "unknown_segment"

    def __init__(self, segment_id: int):
        super().__init__(f"unknown segment {segment_id}")
        self.segment_id = segment_id


class MetricUnavailable(LifegridError):
    code = "metric_unavailable"


# --- service lookups -----------------------------------------------------------

class UnknownDay(LifegridError):
    code = "unknown_day"


class UnknownFrame(LifegridError):
    code = "unknown_frame"


class UnknownCriterion(LifegridError):
    code = "unknown_criterion"


class UnknownMethod(LifegridError):
    code = "unknown_method"


# --- task harness ------------------------------------------------------------

class UnknownTask(LifegridError):
    code = "unknown_task"


class UnknownSession(LifegridError):
    code = "no_session"


class SessionExpired(LifegridError):
    code = "session_expired"


class AlreadySolved(LifegridError):
    code = "already_solved"
