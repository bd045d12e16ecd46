from pathlib import Path

import numpy as np
import pytest
import pytest_asyncio

from app.database import init_db, make_engine, make_session_maker
from app.mappers import ScenarioMapper
from app.models import VehicleParams
from app.services.scenario_io import load_config

DEFAULT_CONFIG = Path(__file__).resolve().parent.parent / "configs" / "scenario_default.json"


@pytest.fixture
def default_config():
    return load_config(DEFAULT_CONFIG)


@pytest.fixture
def vehicle(default_config) -> VehicleParams:
    return ScenarioMapper.to_vehicle(default_config.vehicle)


@pytest.fixture
def neutral_vehicle() -> VehicleParams:
    """Diagonal inertia, neutrally buoyant, CG on CB."""
    return VehicleParams(
        M=np.diag([200.0, 300.0, 300.0, 10.0, 150.0, 150.0]),
        D_lin=np.diag([40.0, 200.0, 200.0, 30.0, 150.0, 150.0]),
        D_quad=np.array([60.0, 400.0, 400.0, 10.0, 300.0, 300.0]),
        W=1962.0,
        B=1962.0,
        r_g=np.zeros(3),
        r_b=np.zeros(3),
        L=3.0,
        tau_bar=2000.0,
    )


def random_spd(rng: np.random.Generator, n: int = 6, floor: float = 1.0) -> np.ndarray:
    A = rng.normal(size=(n, n))
    S = A @ A.T + floor * np.eye(n)
    return 0.5 * (S + S.T)


def random_vehicle(rng: np.random.Generator) -> VehicleParams:
    return VehicleParams(
        M=random_spd(rng, floor=5.0) * 10.0,
        D_lin=np.diag(rng.uniform(5.0, 50.0, size=6)),
        D_quad=rng.uniform(0.0, 20.0, size=6),
        W=rng.uniform(500.0, 2000.0),
        B=rng.uniform(500.0, 2000.0),
        r_g=rng.uniform(-0.1, 0.1, size=3),
        r_b=rng.uniform(-0.1, 0.1, size=3),
        L=rng.uniform(1.0, 5.0),
        tau_bar=1000.0,
    )


@pytest_asyncio.fixture
async def test_session():
    engine = make_engine("sqlite+aiosqlite:///:memory:")
    await init_db(engine)
    async with make_session_maker(engine)() as session:
        yield session
    await engine.dispose()
