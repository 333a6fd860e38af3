# -*- coding: utf-8 -*-


class NLOSError(Exception):
    pass


class ConfigurationError(NLOSError):
    pass


class GridSyntaxError(ConfigurationError):
    pass


class DegenerateGeometryError(NLOSError):
    pass


class InfeasibleRangeError(NLOSError):
    pass


class InfeasibleSampleError(InfeasibleRangeError):
    pass


class EstimationFailure(NLOSError):
    pass


class GenerationError(NLOSError):
    pass
