"""Exception hierarchy shared by all freqdecay modules."""


class FreqdecayError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(FreqdecayError):
    """Invalid domain family or parameters."""


class ProjectionError(FreqdecayError):
    """Boundary projection solver failed to converge."""


class MeshError(FreqdecayError):
    """Mesh generation failed or produced an invalid triangulation."""


class FieldError(FreqdecayError):
    """Coefficient field violates its ellipticity or bound constraints."""


class SolveError(FreqdecayError):
    """Linear solver did not reach the required residual."""


class SpectralError(FreqdecayError):
    """Eigensolver failure or spectral precondition violation."""


class ProfileError(FreqdecayError):
    """Decay-profile computation failed (degenerate data or coarse mesh)."""


class ConfigError(FreqdecayError):
    """Experiment configuration is malformed or inconsistent."""
