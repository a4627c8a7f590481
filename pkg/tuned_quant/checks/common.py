from tuned_quant.models.check import CheckResult, CheckStatus


def check_pass(name: str, detail: str, reference: str | None = None) -> CheckResult:
    return CheckResult(name=name, status=CheckStatus.PASS, detail=detail, reference=reference)


def check_fail(name: str, detail: str, reference: str | None = None) -> CheckResult:
    return CheckResult(name=name, status=CheckStatus.FAIL, detail=detail, reference=reference)


def check_reported(name: str, detail: str, reference: str | None = None) -> CheckResult:
    return CheckResult(name=name, status=CheckStatus.REPORTED, detail=detail, reference=reference)


def check_error(name: str, detail: str) -> CheckResult:
    return CheckResult(name=name, status=CheckStatus.ERROR, detail=f"Processing error: {detail}")


def verdict(name: str, ok: bool, detail: str, reference: str | None = None) -> CheckResult:
    return check_pass(name, detail, reference) if ok else check_fail(name, detail, reference)


def mismatch(actual: object, expected: object) -> str:
    return f"got {actual}, expected {expected}"
