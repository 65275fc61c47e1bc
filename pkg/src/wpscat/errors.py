"""Exception hierarchy. Every error raised by the package derives from WpscatError."""


class WpscatError(Exception):
    pass


# grid_core
class NonPowerOfTwo(WpscatError, ValueError):
    pass


class UnsupportedDim(WpscatError, ValueError):
    pass


class NonPositiveExtent(WpscatError, ValueError):
    pass


class GridMismatch(WpscatError, ValueError):
    pass


# wavepacket
class ZeroWindow(WpscatError, ValueError):
    pass


class BadBand(WpscatError, ValueError):
    pass


class UnsupportedOrder(WpscatError, ValueError):
    pass


# dynamics
class StepUnderflow(WpscatError, ValueError):
    pass


class DomainEscape(WpscatError, RuntimeError):
    """Mass reached the boundary cells of the periodic box."""


# phase_regions
class DimMismatch(WpscatError, ValueError):
    pass


class ShearOutOfDomain(WpscatError, ValueError):
    pass


# scattering_lab
class NotCauchy(WpscatError, RuntimeError):
    def __init__(self, message, table=None):
        super().__init__(message)
        self.table = table


class LowFrequencyMass(WpscatError, ValueError):
    pass


class ZeroState(WpscatError, ValueError):
    pass


class WindowBandViolation(WpscatError, ValueError):
    pass


class BadSpectralSupport(WpscatError, ValueError):
    pass


class NoBoundState(WpscatError, RuntimeError):
    pass


# cli_runner
class ConfigInvalid(WpscatError, ValueError):
    pass


class ResourceLimit(WpscatError, RuntimeError):
    pass


class IoFailure(WpscatError, OSError):
    pass
