# utils/exceptions.py
"""
Custom exceptions for the summability index toolkit
"""


class SummabilityError(Exception):
    """Base exception for toolkit errors"""

    def __init__(self, message: str, error_code: str = None, details: dict = None):
        super().__init__(message)
        self.message = message
        self.error_code = error_code or "SUMMABILITY_ERROR"
        self.details = details or {}

    def to_dict(self):
        """Convert exception to dictionary for JSON output"""
        return {
            'error': self.error_code,
            'message': self.message,
            'details': self.details
        }


class ParameterDomainError(SummabilityError):
    """Raised when a parameter lies outside its mathematical domain"""

    def __init__(self, message: str, parameter: str = None, value=None):
        super().__init__(message, "PARAMETER_DOMAIN_ERROR")
        if parameter:
            self.details['parameter'] = parameter
        if value is not None:
            self.details['value'] = value


class RegionError(SummabilityError):
    """Raised when the hypotheses of a bound formula are not met"""

    def __init__(self, message: str, condition: str = None, formula: str = None,
                 error_code: str = "REGION_ERROR"):
        super().__init__(message, error_code)
        if condition:
            self.details['condition'] = condition
        if formula:
            self.details['formula'] = formula


class NoExactResultError(RegionError):
    """Raised when no exactness result covers the parameters"""

    def __init__(self, message: str, condition: str = None, formula: str = None):
        super().__init__(message, condition, formula, "NO_EXACT_RESULT")


class NoKnownLowerError(RegionError):
    """Raised when no lower-bound theorem covers the parameters"""

    def __init__(self, message: str, condition: str = None, formula: str = None):
        super().__init__(message, condition, formula, "NO_KNOWN_LOWER")


class InapplicableError(SummabilityError):
    """Raised when a formula does not apply to the requested setting at all"""

    def __init__(self, message: str, reason: str = None):
        super().__init__(message, "INAPPLICABLE")
        if reason:
            self.details['reason'] = reason


class SizeError(SummabilityError):
    """Raised when a construction or search exceeds its configured budget"""

    def __init__(self, message: str, requested: int = None, budget: int = None):
        super().__init__(message, "SIZE_ERROR")
        if requested is not None:
            self.details['requested'] = requested
        if budget is not None:
            self.details['budget'] = budget


class DimensionMismatchError(SummabilityError):
    """Raised when vector or tensor dimensions do not agree"""

    def __init__(self, message: str, expected=None, actual=None):
        super().__init__(message, "DIMENSION_MISMATCH")
        if expected is not None:
            self.details['expected'] = expected
        if actual is not None:
            self.details['actual'] = actual


class DegenerateInputError(SummabilityError):
    """Raised when a quotient would divide by zero"""

    def __init__(self, message: str, quantity: str = None):
        super().__init__(message, "DEGENERATE_INPUT")
        if quantity:
            self.details['quantity'] = quantity


class DataError(SummabilityError):
    """Raised when experimental data cannot be fitted"""

    def __init__(self, message: str, field: str = None):
        super().__init__(message, "DATA_ERROR")
        if field:
            self.details['field'] = field


class ConfigurationError(SummabilityError):
    """Raised when configuration is invalid"""

    def __init__(self, message: str, config_key: str = None):
        super().__init__(message, "CONFIGURATION_ERROR")
        if config_key:
            self.details['config_key'] = config_key


class SchemaError(SummabilityError):
    """Raised when a stored artifact does not match its schema"""

    def __init__(self, message: str, field: str = None, path: str = None):
        super().__init__(message, "SCHEMA_ERROR")
        if field:
            self.details['field'] = field
        if path:
            self.details['path'] = path


class InternalInconsistencyError(SummabilityError):
    """Raised when results contradict each other; always an implementation bug"""

    def __init__(self, message: str, details: dict = None):
        super().__init__(message, "INTERNAL_INCONSISTENCY", details)


class UsageError(SummabilityError):
    """Raised for malformed command-line input"""

    def __init__(self, message: str, argument: str = None):
        super().__init__(message, "USAGE_ERROR")
        if argument:
            self.details['argument'] = argument
