"""Configuration management using environment variables."""
import os
from typing import List
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


class TypedConfig:
    """Type-safe access to environment variables.

    Subclasses expose their settings as properties built on the
    ``get_*`` helpers below.
    """

    @staticmethod
    def _str_to_bool(value: str) -> bool:
        """Convert string to boolean.

        Args:
            value: String value to convert

        Returns:
            True if value is 'true', '1', 'yes' (case-insensitive)
            False otherwise
        """
        return value.lower() in ('true', '1', 'yes')

    @staticmethod
    def _str_to_list(value: str) -> List[str]:
        """Convert comma-separated string to list.

        Args:
            value: Comma-separated string

        Returns:
            List of trimmed strings, empty list if value is empty
        """
        if not value:
            return []
        return [item.strip() for item in value.split(',') if item.strip()]

    def get_str(self, key: str, default: str = '') -> str:
        """Get string value from environment.

        Args:
            key: Environment variable name
            default: Default value if not found

        Returns:
            String value from environment or default
        """
        return os.getenv(key, default)

    def get_int(self, key: str, default: int = 0) -> int:
        """Get integer value from environment.

        Args:
            key: Environment variable name
            default: Default value if not found

        Returns:
            Integer value from environment or default

        Raises:
            ValueError: If the variable is set but not an integer
        """
        value = os.getenv(key)
        if value is None or not value.strip():
            return default
        try:
            return int(value)
        except ValueError as exc:
            raise ValueError(f"{key} must be an integer, got {value!r}") from exc

    def get_bool(self, key: str, default: bool = False) -> bool:
        """Get boolean value from environment.

        Args:
            key: Environment variable name
            default: Default value if not found

        Returns:
            Boolean value from environment or default
        """
        value = os.getenv(key)
        if value is None:
            return default
        return self._str_to_bool(value)

    def get_list(self, key: str, default: str = '') -> List[str]:
        """Get comma-separated list value from environment."""
        return self._str_to_list(os.getenv(key, default))


class ValidatedConfig:
    """Static validators shared by configuration classes."""

    @staticmethod
    def _validate_range(value: int, min_val: int, max_val: int, name: str) -> None:
        """Validate that a value is within a specified range.

        Args:
            value: The value to validate
            min_val: Minimum allowed value (inclusive)
            max_val: Maximum allowed value (inclusive)
            name: Name of the configuration variable (for error message)

        Raises:
            ValueError: If value is outside the range
        """
        if value < min_val or value > max_val:
            raise ValueError(
                f"{name} must be between {min_val} and {max_val}, got {value}"
            )

    @staticmethod
    def _validate_choice(value: str, choices: List[str], name: str) -> None:
        """Validate that a string is one of a fixed set of choices.

        Raises:
            ValueError: If value is not one of ``choices``
        """
        if value not in choices:
            raise ValueError(f"{name} must be one of {', '.join(choices)}, got {value!r}")


class BoundsConfig(TypedConfig):
    """Default bounds and run settings, overridable through HOMALG_* variables."""

    def __init__(self):  # pylint: disable=super-init-not-called
        """Initialize bounds configuration.

        Values are read lazily, so changes to the environment after
        construction are picked up.
        """

    @property
    def n_max(self) -> int:
        """Hochschild word-length truncation."""
        return self.get_int('HOMALG_NMAX', 8)

    @property
    def q_max(self) -> int:
        """Cochain arity truncation."""
        return self.get_int('HOMALG_QMAX', 3)

    @property
    def cosimplicial_q_max(self) -> int:
        """Top level of the configuration cosimplicial sets."""
        return self.get_int('HOMALG_COSIMPLICIAL_QMAX', 5)

    @property
    def j_max(self) -> int:
        """Input-arity truncation J of the formal-operations complex."""
        return self.get_int('HOMALG_JMAX', 6)

    @property
    def k_max(self) -> int:
        """Output-arity truncation K of the formal-operations complex."""
        return self.get_int('HOMALG_KMAX', 6)

    @property
    def g_max(self) -> int:
        """Largest genus for the mu_g / t_g suites."""
        return self.get_int('HOMALG_GMAX', 4)

    @property
    def seed(self) -> int:
        """Seed for randomized suites."""
        return self.get_int('HOMALG_SEED', 0)

    @property
    def coefficients(self) -> str:
        """Coefficient mode, 'Z' or 'Q'."""
        return self.get_str('HOMALG_COEFFICIENTS', 'Z')

    @property
    def output_format(self) -> str:
        """Report format, 'text' or 'json'."""
        return self.get_str('HOMALG_FORMAT', 'text')

    @property
    def log_level(self) -> str:
        """Logging level (DEBUG, INFO, WARNING, ERROR)."""
        return self.get_str('HOMALG_LOG_LEVEL', 'WARNING')

    @property
    def log_file(self) -> str:
        """Path to log file; empty means stderr."""
        return self.get_str('HOMALG_LOG_FILE', '')

    def validate(self) -> None:
        """Check every bound.

        Raises:
            ValueError: If any value is out of range
        """
        ValidatedConfig._validate_range(self.n_max, 1, 16, 'HOMALG_NMAX')
        ValidatedConfig._validate_range(self.q_max, 0, 8, 'HOMALG_QMAX')
        ValidatedConfig._validate_range(self.cosimplicial_q_max, 1, 6, 'HOMALG_COSIMPLICIAL_QMAX')
        ValidatedConfig._validate_range(self.j_max, 1, 10, 'HOMALG_JMAX')
        ValidatedConfig._validate_range(self.k_max, 1, 10, 'HOMALG_KMAX')
        ValidatedConfig._validate_range(self.g_max, 1, 8, 'HOMALG_GMAX')
        ValidatedConfig._validate_choice(self.coefficients, ['Z', 'Q'], 'HOMALG_COEFFICIENTS')
        ValidatedConfig._validate_choice(self.output_format, ['text', 'json'], 'HOMALG_FORMAT')

    def __repr__(self):
        """Return string representation of configuration."""
        return (f"BoundsConfig(n_max={self.n_max}, q_max={self.q_max}, "
                f"cosimplicial_q_max={self.cosimplicial_q_max}, j_max={self.j_max}, k_max={self.k_max}, "
                f"g_max={self.g_max}, seed={self.seed})")
