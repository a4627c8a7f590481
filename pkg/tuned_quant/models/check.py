from enum import Enum

from pydantic import BaseModel


class CheckStatus(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    REPORTED = "REPORTED"
    ERROR = "ERROR"


class CheckResult(BaseModel):
    name: str
    status: CheckStatus
    detail: str = ""
    reference: str | None = None
    duration_ms: float = 0.0


class SuiteProgressEvent(BaseModel):
    run_id: str
    completed: int
    total: int
    result: CheckResult


class SuiteReport(BaseModel):
    run_id: str
    total: int
    completed: int
    results: list[CheckResult]

    @property
    def failed(self) -> list[CheckResult]:
        return [r for r in self.results if r.status in (CheckStatus.FAIL, CheckStatus.ERROR)]

    @property
    def ok(self) -> bool:
        return not self.failed
