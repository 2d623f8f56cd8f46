"""
Input Validation
Field-by-field checks for problem files and circuit parameters
"""

import math
from typing import Any, Optional, List, Dict

from infrastructure.error_handling import SolverError


class ValidationError(SolverError):
    """Input validation error; the message always names the offending field"""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class NonnegativityError(ValidationError):
    """Assembled matrix violates the nonnegative-matrix assumption"""

    def __init__(self, field: str, row: int, col: int, value: float):
        super().__init__(
            field,
            f"entry ({row}, {col}) = {value!r} is negative; isotone electric "
            "systems assume that M is a nonnegative matrix"
        )
        self.row = row
        self.col = col


class InputValidator:
    """
    Validation of untrusted numeric input
    - Numbers must be real and finite
    - Vectors and matrices must be rectangular
    - Dictionaries must carry the expected keys
    """

    @staticmethod
    def validate_float(
        value: Any,
        field: str,
        min_value: Optional[float] = None,
        strictly_positive: bool = False,
    ) -> float:
        """Validate a finite real number"""
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(field, f"expected a number, got {type(value).__name__}")

        float_value = float(value)
        if not math.isfinite(float_value):
            raise ValidationError(field, "must be finite")

        if strictly_positive and float_value <= 0:
            raise ValidationError(field, f"must be > 0, got {float_value!r}")

        if min_value is not None and float_value < min_value:
            raise ValidationError(field, f"below minimum {min_value}: {float_value!r}")

        return float_value

    @staticmethod
    def validate_integer(
        value: Any,
        field: str,
        min_value: Optional[int] = None,
        max_value: Optional[int] = None
    ) -> int:
        """Validate integer input"""
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, float) and value.is_integer():
                value = int(value)
            else:
                raise ValidationError(field, f"expected an integer, got {value!r}")

        if min_value is not None and value < min_value:
            raise ValidationError(field, f"below minimum {min_value}: {value}")

        if max_value is not None and value > max_value:
            raise ValidationError(field, f"exceeds maximum {max_value}: {value}")

        return value

    @staticmethod
    def validate_vector(
        value: Any,
        field: str,
        length: Optional[int] = None,
        strictly_positive: bool = False,
    ) -> List[float]:
        """Validate a non-empty list of finite reals"""
        if not isinstance(value, (list, tuple)):
            raise ValidationError(field, f"expected a list of numbers, got {type(value).__name__}")

        if len(value) == 0:
            raise ValidationError(field, "must not be empty")

        if length is not None and len(value) != length:
            raise ValidationError(field, f"expected {length} entries, got {len(value)}")

        return [
            InputValidator.validate_float(v, f"{field}[{i}]", strictly_positive=strictly_positive)
            for i, v in enumerate(value)
        ]

    @staticmethod
    def validate_matrix(
        value: Any,
        field: str,
        size: Optional[int] = None,
    ) -> List[List[float]]:
        """Validate a square matrix given as a list of rows"""
        if not isinstance(value, (list, tuple)) or len(value) == 0:
            raise ValidationError(field, "expected a non-empty list of rows")

        n = len(value) if size is None else size
        if len(value) != n:
            raise ValidationError(field, f"expected {n} rows, got {len(value)}")

        return [
            InputValidator.validate_vector(row, f"{field}[{i}]", length=n)
            for i, row in enumerate(value)
        ]

    @staticmethod
    def validate_dict(
        value: Any,
        field: str,
        required_keys: Optional[List[str]] = None,
        allowed_keys: Optional[List[str]] = None
    ) -> Dict:
        """Validate dictionary structure"""
        if not isinstance(value, dict):
            raise ValidationError(field, f"expected an object, got {type(value).__name__}")

        if required_keys:
            missing = [k for k in required_keys if k not in value]
            if missing:
                raise ValidationError(f"{field}.{missing[0]}", "missing required key")

        if allowed_keys:
            invalid = sorted(set(value.keys()) - set(allowed_keys))
            if invalid:
                raise ValidationError(f"{field}.{invalid[0]}", "unexpected key")

        return value
