"""Exception hierarchy shared across the package."""


class DiagramError(Exception):
    """Base class for all vennfit errors."""


class InputError(DiagramError, ValueError):
    """Invalid user input: set cardinality, empty sets, name collisions, bad files."""


class GeometryError(DiagramError, ValueError):
    """Geometric domain violations: bad radii, infeasible overlaps, degenerate polygons."""


class RenderError(DiagramError, ValueError):
    """Malformed or unsupported vector document fed to the rasterizer."""


class DivergenceError(DiagramError, RuntimeError):
    """Optimizer produced non-finite coordinates even after step-size rescue."""
