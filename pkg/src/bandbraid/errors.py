"""Exception taxonomy.

Four families, one exit code each for the CLI: configuration (2), numerics
(3), protocol (4), classification (5).
"""
from __future__ import annotations


class BandbraidError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(BandbraidError):
    """Bad user input: flags, config files, malformed tables."""

    exit_code = 2


class NumericsError(BandbraidError):
    exit_code = 3


class ProtocolError(BandbraidError):
    exit_code = 4


class ClassificationError(BandbraidError):
    exit_code = 5


# -- numerics ----------------------------------------------------------------

class InvalidDimension(NumericsError):
    pass


class NonConvergence(NumericsError):
    """Eigensolver iteration budget exhausted; message carries the residual."""


class NearDefective(NumericsError):
    """Eigenvector matrix too ill-conditioned for the spectral route."""


class RankDeficient(NumericsError):
    """Householder pivot collapsed during QR."""


class NotHermitian(NumericsError):
    pass


class PSDViolation(NumericsError):
    """I - u^2 U^dag U has an eigenvalue below the clamping window."""


# -- protocol ----------------------------------------------------------------

class WeakSelectivity(ProtocolError):
    """No swept rotation angle reaches the required eigenstate overlap."""


class AllShotsDiscarded(ProtocolError):
    """Postselection retained zero shots."""


class IncompleteSettings(ProtocolError):
    """Measurement records do not cover the required rotation settings."""


class PoleHit(ProtocolError):
    """Stereographic projection pole reached (<sigma_z> too close to 1)."""


class ProjectionDegenerate(ProtocolError):
    """Trajectory denominator vanished for some band."""


class StepTooLarge(ProtocolError):
    """Per-step winding increment too large to unwrap safely; refine the grid."""


class NotAPermutation(ProtocolError):
    """Dominant-overlap assignment between band endpoints is not a bijection."""


class NonAdjacentCrossing(ProtocolError):
    """Crossing between strands that are not adjacent in the projected order."""


class SortingFailure(ProtocolError):
    """Band continuity tracking broke down (overlap below threshold)."""


class WindingQuantization(ProtocolError):
    """Winding matrix too far from the nearest admissible rational values."""


# -- classification ----------------------------------------------------------

class OnBoundary(ClassificationError):
    """Parameter point within tolerance of a phase boundary."""


class DegeneratePoint(ClassificationError):
    """The all-boundaries intersection point (m0, m1) = (0, -1)."""


class SpecialLine(ClassificationError):
    """m1 = -1: spectrum k-independent, band-swap counting undefined."""


class Unclassified(ClassificationError):
    """No row of the knot/link table matches."""


# -- knots -------------------------------------------------------------------

class DivisionFailure(NumericsError):
    """Exact Laurent division left a remainder (internal invariant broken)."""


class WordTooLong(ConfigError):
    """Braid word exceeds the state-sum crossing cap."""
