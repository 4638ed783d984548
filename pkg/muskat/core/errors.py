from typing import Any, Optional


class MuskatError(Exception):
    """Base error; `exit_code` is what the CLI returns when it escapes a command"""

    exit_code: int = 3

    def __init__(self, detail: str, **context: Any):
        self.detail = detail
        self.context = context
        super().__init__(detail)

    def __str__(self) -> str:
        if not self.context:
            return self.detail
        extras = ", ".join(f"{key}={value!r}" for key, value in self.context.items())
        return f"{self.detail} ({extras})"


class InvalidInputError(MuskatError, ValueError):
    exit_code = 2


class ConfigError(MuskatError):
    exit_code = 2

    def __init__(self, detail: str, errors: Optional[list[str]] = None, **context: Any):
        self.errors = errors or []
        super().__init__(detail, **context)

    def __str__(self) -> str:
        if not self.errors:
            return super().__str__()
        return super().__str__() + "\n" + "\n".join(f"  {line}" for line in self.errors)


class InvariantError(MuskatError):
    exit_code = 1


class NumericalError(MuskatError):
    exit_code = 3

    def __init__(self, detail: str, stage: str = "", last_state: Any = None, **context: Any):
        self.stage = stage
        self.last_state = last_state
        if stage:
            context = {"stage": stage, **context}
        super().__init__(detail, **context)


class SolverStallError(NumericalError):
    def __init__(self, detail: str, best_residual: float, **context: Any):
        self.best_residual = best_residual
        super().__init__(detail, stage="solve", best_residual=best_residual, **context)


class NearBoundaryWarning(UserWarning):
    """Field point closer to the interface than the quadrature resolves"""
