"""
toolkit_errors.py - Structured errors for the singularity toolkit

Every failure the toolkit reports carries a stable machine code, a human
message and a details dict, so the CLI can emit it as JSON and tests can
assert on the code instead of on message text.
"""


class ToolkitError(Exception):
    """Base class for all toolkit failures"""

    code = "toolkit-error"

    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self):
        """Serialize the error for JSON output"""
        payload = {"code": self.code, "message": self.message}
        if self.details:
            payload["details"] = {key: _jsonable(value) for key, value in self.details.items()}
        return payload


class PolynomialSyntaxError(ToolkitError):
    code = "syntax-error"


class DomainError(ToolkitError):
    """Argument or precondition violation (zero polynomial, bad generator, ...)"""

    code = "domain-error"


class UndecidedError(ToolkitError):
    code = "undecided"


class AlgebraicPointError(ToolkitError):
    """Singular point with irrational coordinates; local data must be supplied"""

    code = "algebraic-point"


class NonIsolatedSingularityError(ToolkitError):
    code = "non-isolated"


class CertificationError(ToolkitError):
    code = "certification-failed"


class FanError(ToolkitError):
    code = "fan-error"


class HypothesisError(ToolkitError):
    """A named hypothesis of a theorem pipeline does not hold"""

    code = "hypothesis-failed"


def _jsonable(value):
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in value]
    return str(value)
