#!/usr/bin/env python3
"""
Exception hierarchy for the Busemann-Poisson toolkit.

Library code raises these; the command-line layer maps them to exit codes.
Every error is a ValueError so plain ``except ValueError`` callers keep working.
"""


class BusemannPoissonError(ValueError):
    """Base class for all toolkit errors"""


class InvalidInstanceError(BusemannPoissonError):
    """q < 2 or d < 0"""


class NotAnEdgeError(BusemannPoissonError):
    """The two vertices given as an edge are not adjacent"""


class ProjectionAtEndpointError(BusemannPoissonError):
    """An off-spine edge projects onto x or y instead of strictly inside [x,y]"""


class InvalidParametersError(BusemannPoissonError):
    """Edge parameters outside the admissible range"""


class BaseMismatchError(BusemannPoissonError):
    """A shadow was measured from a base point other than its own"""


class InvalidLevelError(BusemannPoissonError):
    """Requested Busemann level is not of the form d - 2k with 0 <= k <= d"""


class NotSummableError(BusemannPoissonError):
    """A kernel tail does not decay geometrically"""


class KernelError(BusemannPoissonError):
    """Malformed kernel pieces or an unsupported kernel operation"""


class IncompleteCoverError(BusemannPoissonError):
    """A locally constant function is missing a value on its sphere"""


class SingularSystemError(BusemannPoissonError):
    """The constant-fitting linear system has zero determinant"""


class RouteMismatchError(BusemannPoissonError):
    """Two evaluation routes disagree on an exact value"""


class ConfigurationError(BusemannPoissonError):
    """Invalid environment configuration"""
