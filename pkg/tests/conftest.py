import random

import pytest

from tuned_quant.config import Settings
from tuned_quant.services.corpus import builtin_macros
from tuned_quant.services.expr import PhaseContext
from tuned_quant.services.quantize import MapKind, QuantizationConfig


@pytest.fixture
def ctx1() -> PhaseContext:
    return PhaseContext(n=1)


@pytest.fixture
def ctx2() -> PhaseContext:
    return PhaseContext(n=2)


@pytest.fixture
def ctx3() -> PhaseContext:
    return PhaseContext(n=3)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(1)


@pytest.fixture
def macros3(ctx3: PhaseContext):
    return builtin_macros(ctx3)


@pytest.fixture
def tt2_cfg3(ctx3: PhaseContext) -> QuantizationConfig:
    return QuantizationConfig.for_context(ctx3, MapKind.TT2)


@pytest.fixture
def small_settings() -> Settings:
    return Settings(
        property_trials=5,
        equivariance_trials=2,
        grid_points=400,
        max_concurrency=2,
    )
