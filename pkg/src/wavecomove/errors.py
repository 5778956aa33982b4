"""Exception hierarchy shared by all analysis modules."""


class WaveletError(Exception):
    """Base class for data and numerical errors raised by wavecomove."""


# series ingest
class MissingColumn(WaveletError):
    pass


class NonUniformSpacing(WaveletError):
    pass


class NonNumericValue(WaveletError):
    def __init__(self, row, value, column=None):
        self.row = row
        self.value = value
        self.column = column
        where = f" in column {column!r}" if column else ""
        super().__init__(f"non-numeric value {value!r} at row {row}{where}")


class InsufficientOverlap(WaveletError):
    pass


class SeriesTooShort(WaveletError):
    pass


class InvalidSeries(WaveletError):
    pass


# continuous transform / coherence
class InvalidGrid(WaveletError):
    pass


class GridMismatch(WaveletError):
    pass


class LengthMismatch(WaveletError):
    pass


class NumericalBlowup(WaveletError):
    pass


class OutOfRange(WaveletError):
    pass


class DegenerateControl(WaveletError):
    pass


# significance
class DegenerateSeries(WaveletError):
    pass


# discrete transform / entropy
class UnknownFilter(WaveletError):
    pass


class SeriesShorterThanFilter(WaveletError):
    pass


class LevelTooDeep(WaveletError):
    pass


class ZeroEnergy(WaveletError):
    pass


class IncompatibleLevels(WaveletError):
    pass
