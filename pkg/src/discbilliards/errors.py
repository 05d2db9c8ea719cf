"""Exception taxonomy shared by all modules.

Kept in one place so the CLI can map error classes onto its exit-code
contract without importing every module. All exceptions carry a plain
message; some attach structured context (failing stage, measured values)
as attributes.
"""


class DiscBilliardsError(Exception):
    """Base class for every library-raised error."""


# --- vector algebra ---------------------------------------------------------

class ZeroDirection(DiscBilliardsError):
    """A projection direction with zero norm was supplied."""


# --- simulator --------------------------------------------------------------

class OverlapInput(DiscBilliardsError):
    """Two discs overlap beyond tolerance in an input state."""


class NotInContact(DiscBilliardsError):
    """Collision resolution was requested for discs not at distance 2."""


class Receding(DiscBilliardsError):
    """Collision resolution was requested for a separating pair."""


class SimultaneousCollision(DiscBilliardsError):
    """Two collisions shared a ball (or a touching chain) at one time.

    The dynamics is not uniquely defined in this case, so the run aborts.
    """


class PrecisionExhausted(DiscBilliardsError):
    """Event times can no longer be ordered at the active precision."""


class PersistentContact(DiscBilliardsError):
    """Two discs remained in contact for a positive time interval."""


# --- constructions ----------------------------------------------------------

class BadN(DiscBilliardsError):
    """Disc count outside the supported range."""


class Eps0TooLarge(DiscBilliardsError):
    """The stage schedule's base epsilon does not keep every stage below 1/2."""


class StageCountShortfall(DiscBilliardsError):
    """A stage produced fewer proper collisions than its target.

    Attributes:
        stage: 1-based index of the failing stage (0 = preparation).
        got, expected: the observed and required counts.
    """

    def __init__(self, message, stage=None, got=None, expected=None):
        super().__init__(message)
        self.stage = stage
        self.got = got
        self.expected = expected


class AlignmentNotFound(DiscBilliardsError):
    """No collinearity time for the three discs within the search horizon."""


class TuningFailed(DiscBilliardsError):
    """Parameter search for a construction ran out of attempts."""


class BadParams(DiscBilliardsError):
    """Builder parameters violate their documented constraints."""


# --- family structure / limit process ---------------------------------------

class BadFamilies(DiscBilliardsError):
    """The A/B/C disc family structure required here is absent."""


class BadGaps(DiscBilliardsError):
    """Initial gap data violates its feasibility invariants."""


class NotABreakpoint(DiscBilliardsError):
    """The queried time is not a breakpoint of the limit evolution."""


class ShapeMismatch(DiscBilliardsError):
    """Two trajectory bundles do not have matching component layouts."""
