"""Exception hierarchy shared by all modules."""


class AnadiskError(Exception):
    """Base class for every structured error raised by the package."""

    code = "error"

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


class DomainError(AnadiskError, ValueError):
    """A point lies outside the domain of a map (|zeta| > 1, ring violated...)."""

    code = "domain"


class ParameterError(AnadiskError, ValueError):
    code = "parameter"


class DimensionError(AnadiskError, TypeError):
    """Ambient dimensions disagree or a scalar map was required."""

    code = "dimension"


class SizeError(AnadiskError, ValueError):
    code = "size"


class PreconditionError(AnadiskError, ValueError):
    code = "precondition"


class ContainmentError(AnadiskError, ValueError):
    """A glued or searched disk leaves the ambient ball."""

    code = "containment"

    def __init__(self, message, radius=None, sup=None):
        super().__init__(message)
        self.radius = radius
        self.sup = sup

    def to_dict(self):
        out = super().to_dict()
        out.update(radius=self.radius, sup=self.sup)
        return out


class DegenerateGeometryError(AnadiskError, ValueError):
    code = "degenerate_geometry"


class EmptyLeafError(AnadiskError, ValueError):
    code = "empty_leaf"
