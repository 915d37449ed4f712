"""Exception types shared across the package."""


class UnphysicalStateError(ValueError):
    """A covariance matrix violates the uncertainty relation or is otherwise invalid."""


class DegenerateSteadyStateError(RuntimeError):
    """The linear system for the steady quadratic-form coefficients is singular.

    This happens at the amplification/damping degeneracy Gamma = 2|eta| (and
    for Gamma = 0), where no bounded steady quadratic form exists.
    """


class OverAmplificationError(RuntimeError):
    """Requested a steady state in a non-contractive regime (Gamma <= 2|eta|)."""


class UnsupportedStateError(ValueError):
    """A Gaussian state outside the constructor families the Fock builder knows."""


class CutoffTooSmallError(RuntimeError):
    """Truncated Fock integration leaked too much probability past the cutoff."""

    def __init__(self, trace_loss: float, cutoff: int, suggested_cutoff: int):
        self.trace_loss = trace_loss
        self.cutoff = cutoff
        self.suggested_cutoff = suggested_cutoff
        super().__init__(
            f"trace loss {trace_loss:.3e} at cutoff {cutoff} exceeds the 1e-3 budget; "
            f"retry with cutoff >= {suggested_cutoff}"
        )
