"""Exception types shared across the toolkit."""


class ProsodyCloneError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(ProsodyCloneError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateInputError(ProsodyCloneError, ValueError):
    """Input is structurally valid but carries no usable content
    (e.g. all-zero pitch where a mean is required)."""


class InfeasibleAlignmentError(ProsodyCloneError, ValueError):
    """No monotone path exists for the given frame/label counts."""


class TrainingFailureError(ProsodyCloneError, RuntimeError):
    """Optimization diverged or failed to improve; message carries diagnostics."""
