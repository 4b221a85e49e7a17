"""Exception hierarchy."""
from __future__ import annotations


class MonodromicError(Exception):
    """Base class for all package errors."""


class RootFindingFailure(MonodromicError):
    pass


class MultiplePoleError(MonodromicError):
    pass


class PVUndefined(MonodromicError):
    """A non-simple pole sits on the contour and finite-part mode is off."""


class PVDiverges(MonodromicError):
    pass


class NotMonodromicForTheseWeights(MonodromicError):
    pass


class LeadingDegenerate(MonodromicError):
    pass


class ThetaVanishedOnOrbit(MonodromicError):
    pass


class StepLimit(MonodromicError):
    pass


class RDependence(MonodromicError):
    """The would-be return-map coefficient depends on the radius r."""


class InconsistentLeadingPart(MonodromicError):
    pass


class NotASingularity(MonodromicError, ValueError):
    pass
