"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid user-facing configuration (bad model parameters, unknown ids)."""


class HermiticityError(RuntimeError):
    """An operator that must be self-adjoint in its weighted inner product is not."""


class SoundnessError(RuntimeError):
    """A certified inequality came out negative beyond tolerance."""
