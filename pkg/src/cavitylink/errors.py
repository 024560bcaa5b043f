"""Exception types shared across the simulator."""


class CavityLinkError(Exception):
    """Base class for all simulator errors."""


class SingularPhase(CavityLinkError):
    """Round-trip phase puts a cavity on resonance with a waveguide mode."""


class NoSolutionFound(CavityLinkError):
    """Inverse phase search exhausted its budget without a verified solution."""


class DimensionOverflow(CavityLinkError):
    """Requested Hilbert space exceeds the configured size cap."""


class UnknownLabel(CavityLinkError):
    """Cavity label not present in the space."""


class UnknownLevel(CavityLinkError):
    """Quantum-dot level outside {g, x, y}."""


class OutOfTruncation(CavityLinkError):
    """Requested occupation exceeds the Fock truncation."""


class NonHermitian(CavityLinkError):
    """Operator required to be Hermitian is not."""


class NotInLogicalSubspace(CavityLinkError):
    """State has support outside the dual-rail logical subspace."""


class IntegratorFailure(CavityLinkError):
    """Adaptive master-equation integration did not converge."""


class IncommensurateStep(CavityLinkError):
    """Time step does not divide every propagation delay."""


class UnstableStep(CavityLinkError):
    """Delay-network integration drifted beyond the energy budget."""


class ValidityViolated(CavityLinkError):
    """Parameters violate the regime where the reduced model applies."""
