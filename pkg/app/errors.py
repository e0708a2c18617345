"""
Error hierarchy for the toolkit
Every error knows how to describe itself as an RFC 7807 Problem Details object
"""

from typing import Any, Dict, Optional


class PolsarError(Exception):
    """Base class for all toolkit errors"""
    title = "PolSAR Processing Error"
    problem_type = "processing-error"
    status = 400

    def to_problem(self, instance: Optional[str] = None) -> Dict[str, Any]:
        """Render the error as a Problem Details dictionary"""
        return {
            "type": f"https://polsar.local/errors/{self.problem_type}",
            "title": self.title,
            "status": self.status,
            "detail": str(self),
            "instance": instance,
        }


class ConfigError(PolsarError, ValueError):
    """Invalid configuration, parameters or mismatched dimensions"""
    title = "Invalid Configuration"
    problem_type = "config-error"
    status = 422


class DataError(PolsarError):
    """Input data that cannot be processed (non-finite values, wrong shapes)"""
    title = "Invalid Data"
    problem_type = "data-error"
    status = 422


class DataIntegrityError(DataError):
    """A matrix that should be positive semi-definite is not, beyond tolerance"""
    title = "Data Integrity Violation"
    problem_type = "data-integrity"


class EmptyWindow(PolsarError):
    """Multi-looking over zero samples"""
    title = "Empty Window"
    problem_type = "empty-window"


class EigFailure(PolsarError):
    """Jacobi iteration did not converge; treated as a bug signal"""
    title = "Eigendecomposition Failure"
    problem_type = "eig-failure"
    status = 500


class ZeroPowerPixel(PolsarError):
    """H/A/alpha requested for a matrix with non-positive trace"""
    title = "Zero Power Pixel"
    problem_type = "zero-power"


class MissingClassError(PolsarError):
    """A declared class has no training samples, or fewer than two classes exist"""
    title = "Missing Class"
    problem_type = "missing-class"


class DegenerateClassError(PolsarError):
    """A class center cannot be inverted or has too few samples"""
    title = "Degenerate Class"
    problem_type = "degenerate-class"


class ConvergenceError(PolsarError):
    """SMO exceeded its iteration budget"""
    title = "Training Did Not Converge"
    problem_type = "convergence"
    status = 500


class CholeskyError(PolsarError):
    """Covariance matrix is not positive definite"""
    title = "Cholesky Factorization Failed"
    problem_type = "cholesky"


class EmptyEvaluationError(PolsarError):
    """Confusion matrix requested with no labeled pixels"""
    title = "Empty Evaluation"
    problem_type = "empty-evaluation"


class NotFoundError(PolsarError):
    """Registry record does not exist"""
    title = "Not Found"
    problem_type = "not-found"
    status = 404


class FormatError(PolsarError):
    """Malformed file; message names the file and the offending offset"""
    title = "Malformed File"
    problem_type = "format-error"

    def __init__(self, path: Any, offset: int, reason: str):
        self.path = str(path)
        self.offset = offset
        self.reason = reason
        super().__init__(f"{self.path}: offset {offset}: {reason}")


def describe_validation_error(error) -> str:
    """One-line summary of a pydantic ValidationError; unknown keys are named as such"""
    parts = []
    for item in error.errors():
        location = ".".join(str(p) for p in item.get("loc", ())) or "value"
        if item.get("type") == "extra_forbidden":
            parts.append(f"unknown key '{location}'")
        else:
            parts.append(f"{location}: {item.get('msg')}")
    return "; ".join(parts)
