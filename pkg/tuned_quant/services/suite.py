import asyncio
import time
from collections.abc import AsyncIterator, Callable, Sequence
from uuid import uuid4

from loguru import logger

from tuned_quant.checks import commutators, diagrams, examples, poisson, polarization, spectrum, symbolic
from tuned_quant.checks.common import check_error
from tuned_quant.config import Settings
from tuned_quant.models.check import CheckResult, SuiteReport

CheckFn = Callable[[Settings], CheckResult]

# Reporting order.
CHECKS: list[CheckFn] = [
    symbolic.ks_position,
    symbolic.ks_momentum,
    symbolic.ks_angular_momentum,
    symbolic.ks_oscillator,
    symbolic.tuning_indicators,
    symbolic.tt1_position,
    symbolic.tt1_momentum,
    symbolic.tt1_angular_momentum,
    symbolic.tt1_oscillator,
    symbolic.tt2_position,
    symbolic.tt2_momentum,
    symbolic.tt2_angular_momentum,
    symbolic.tt2_oscillator,
    commutators.tt2_angular_algebra,
    commutators.tt2_free_particle,
    commutators.tt2_isotropic_oscillator,
    commutators.tt2_canonical_pairs,
    commutators.ks_prequantization,
    poisson.poisson_antisymmetry,
    poisson.poisson_jacobi,
    poisson.hamiltonian_leibniz,
    poisson.canonical_brackets,
    poisson.bracket_field_compatibility,
    poisson.euler_property,
    poisson.hamiltonian_field_displays,
    diagrams.theta_invariance,
    diagrams.theta_squared_diagram,
    diagrams.pushforward_naturality,
    diagrams.ks_equivariance,
    diagrams.tt1_equivariance,
    diagrams.tt2_rotation_equivariance,
    diagrams.tt2_shear_equivariance,
    diagrams.canonical_chart_dependence,
    polarization.tt2_preserves_polarization,
    polarization.ks_restricted_position,
    polarization.ks_breaks_polarization,
    polarization.tt2_restricted_angular_momentum,
    spectrum.polarized_oscillator_coefficients,
    spectrum.sho_spectrum,
    spectrum.ground_state_order,
    spectrum.eigenvector_orthogonality,
    spectrum.gaussian_norm,
    spectrum.vol_p_divergence,
    examples.cli_oscillator_example,
    examples.cli_position_example,
    examples.cli_angular_commutator_example,
]


def run_check(check: CheckFn, settings: Settings) -> CheckResult:
    start = time.perf_counter()
    try:
        result = check(settings)
    except Exception as exc:
        logger.exception("Check error name={} error={}", check.__name__, str(exc))
        result = check_error(check.__name__, str(exc))
    duration_ms = (time.perf_counter() - start) * 1000
    result = result.model_copy(update={"duration_ms": round(duration_ms, 2)})
    logger.info("Check finished name={} status={} duration_ms={:.2f}", result.name, result.status.value, duration_ms)
    return result


async def _run_with_limit(
    index: int, check: CheckFn, settings: Settings, sem: asyncio.Semaphore
) -> tuple[int, CheckResult]:
    async with sem:
        return index, await asyncio.to_thread(run_check, check, settings)


async def iter_suite(settings: Settings, checks: Sequence[CheckFn] | None = None) -> AsyncIterator[tuple[int, CheckResult]]:
    """Yield ``(declaration_index, result)`` in completion order."""
    selected = list(checks if checks is not None else CHECKS)
    sem = asyncio.Semaphore(settings.max_concurrency)
    tasks = [asyncio.create_task(_run_with_limit(i, check, settings, sem)) for i, check in enumerate(selected)]
    for task in asyncio.as_completed(tasks):
        yield await task


async def run_suite_async(
    settings: Settings, checks: Sequence[CheckFn] | None = None, run_id: str | None = None
) -> SuiteReport:
    run_id = run_id or str(uuid4())
    selected = list(checks if checks is not None else CHECKS)
    logger.info("Check suite started run_id={} total={} concurrency={}", run_id, len(selected), settings.max_concurrency)
    finished: dict[int, CheckResult] = {}
    async for index, result in iter_suite(settings, selected):
        finished[index] = result
    results = [finished[i] for i in range(len(selected))]
    report = SuiteReport(run_id=run_id, total=len(selected), completed=len(results), results=results)
    logger.info("Check suite finished run_id={} failed={}", run_id, len(report.failed))
    return report


def run_suite(settings: Settings, checks: Sequence[CheckFn] | None = None) -> SuiteReport:
    return asyncio.run(run_suite_async(settings, checks))
