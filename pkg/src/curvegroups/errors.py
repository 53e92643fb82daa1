"""Exception hierarchy shared by all curvegroups modules."""


class CurveGroupsError(Exception):
    """Base class for all library errors."""


class DuplicateCurveId(CurveGroupsError):
    def __init__(self, curve_id):
        self.curve_id = curve_id
        super().__init__(f"duplicate curve_id {curve_id!r}")


class EmptyCurve(CurveGroupsError):
    def __init__(self, curve_id):
        self.curve_id = curve_id
        super().__init__(f"curve {curve_id!r} has no observations")


class NonFiniteValue(CurveGroupsError):
    def __init__(self, curve_id):
        self.curve_id = curve_id
        super().__init__(f"curve {curve_id!r} contains NaN or Inf values")


class DegenerateFit(CurveGroupsError):
    """Fewer than 2 distinct covariate values carry kernel weight at the
    evaluation point, so the 2x2 normal system is singular.  Usually means
    the bandwidth is too small for this location."""

    def __init__(self, x, context=""):
        self.x = x
        msg = f"degenerate local linear fit at x={x!r}"
        if context:
            msg += f" ({context})"
        super().__init__(msg)


class AllCandidatesDegenerate(CurveGroupsError):
    """No bandwidth candidate produced a well-posed leave-one-out fit for
    enough observations."""


class TooLarge(CurveGroupsError):
    """Exhaustive partition enumeration would exceed the feasibility bound."""


class EmptyClusterUnrecoverable(CurveGroupsError):
    """Every clustering restart ended with an empty group."""


class OriginPoint(CurveGroupsError):
    """A Cartesian point at the exact origin has no polar angle."""

    def __init__(self, index):
        self.index = index
        super().__init__(f"point {index} lies at the origin; angle undefined")


class ParseError(CurveGroupsError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class NegativeVariance(CurveGroupsError):
    """A requested variance function is not positive on the covariate range."""
