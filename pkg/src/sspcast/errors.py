"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Bad input data or configuration, detected before any compute."""


class ChronologyError(ValidationError):
    """Profile timestamps are not consecutive monthly values."""


class WindowError(ValidationError):
    """A train/validation window does not fit inside the series."""


class TrainingDivergenceError(RuntimeError):
    """Loss or gradients became non-finite during training."""
