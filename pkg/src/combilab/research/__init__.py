from .verification_report import CheckResult, VerificationReport

__all__ = ["CheckResult", "VerificationReport"]
