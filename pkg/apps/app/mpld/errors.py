class MPLDError(Exception):
    """Base class for every error raised by the decomposition toolkit"""


class ConfigError(MPLDError):
    pass


class LayoutParseError(MPLDError):
    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        self.message = message
        super().__init__(f"line {line_no}: {message}")


class LayoutValidationError(MPLDError):
    pass


class ParameterError(MPLDError):
    pass


class InvariantViolationError(MPLDError):
    pass


class UsageError(MPLDError):
    """Cover/uncover called out of LIFO order"""


class OracleSizeError(MPLDError):
    pass


class VerificationError(MPLDError):
    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(report.violations) or "verification failed")


class ComponentSolveError(MPLDError):
    def __init__(self, component_id: int, cause: BaseException | str):
        self.component_id = component_id
        self.cause = cause
        super().__init__(f"component {component_id} failed: {cause}")


class ParallelSolveError(MPLDError):
    """Raised when one or more workers fail; the other components' results are kept"""

    def __init__(self, failures: list[ComponentSolveError], results: list):
        self.failures = failures
        self.results = results
        names = ", ".join(str(f.component_id) for f in failures)
        super().__init__(f"{len(failures)} component(s) failed: {names}")
