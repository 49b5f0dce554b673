"""Exception types shared across the package."""


class AlgebraError(ValueError):
    """A constructed object violates its defining invariants."""


class DimensionError(AlgebraError):
    """Dimension or index-budget precondition violated."""


class DegeneracyError(AlgebraError):
    """A pairing / Gram matrix is numerically singular."""


class SignatureError(AlgebraError):
    """A metric does not have the required signature."""


class ConfigError(ValueError):
    """Malformed configuration (TOML schema, CLI arguments)."""
