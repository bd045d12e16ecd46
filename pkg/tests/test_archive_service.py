import pytest
import pytest_asyncio

from app.mappers import RunMapper, ScenarioMapper
from app.models import Metrics
from app.services.archive_service import RunArchiveService, RunNotFoundError


def _metrics(completed: bool = True, mean_surge: float = 0.71) -> Metrics:
    return Metrics(
        waypoint_hit_times=(20.0, 60.0, 110.0, 170.0) if completed else (20.0, None, None, None),
        mean_surge=mean_surge,
        surge_std=0.05,
        mean_abs_roll=0.3,
        max_abs_roll=1.2,
        max_abs_tau=2000.0,
        cross_track_rms=(0.1, 0.2, 0.3, 0.2),
        completed=completed,
        mean_los_surge=0.72,
        final_time=170.0 if completed else 299.9,
    )


@pytest_asyncio.fixture
async def service(test_session):
    return RunArchiveService(test_session)


@pytest.mark.asyncio
async def test_archive_maps_scenario_and_metrics(service, default_config):
    record = await service.archive(default_config, _metrics(), "out/run_seed7.csv")

    assert record.label == "reference-waypoints"
    assert record.seed == 7
    assert record.rho_c == 0.5
    assert record.d_bar == 0.5
    assert record.completed
    assert record.final_time == 170.0
    assert record.log_path == "out/run_seed7.csv"


@pytest.mark.asyncio
async def test_archive_uses_largest_bound_of_vector(service, default_config):
    tuning = default_config.tuning.model_copy(update={"d_bar": [0.1, 0.2, 0.7, 0.0, 0.0, 0.0]})
    record = await service.archive(default_config.model_copy(update={"tuning": tuning}), _metrics())
    assert record.d_bar == 0.7


@pytest.mark.asyncio
async def test_get_by_id_unknown(service):
    with pytest.raises(RunNotFoundError):
        await service.get_by_id("missing")


@pytest.mark.asyncio
async def test_delete(service, default_config):
    record = await service.archive(default_config, _metrics())
    await service.delete(record.id)
    with pytest.raises(RunNotFoundError):
        await service.delete(record.id)


@pytest.mark.asyncio
async def test_history_filters(service, default_config):
    for rho_c, completed in [(0.375, True), (0.5, True), (0.75, False)]:
        await service.archive(ScenarioMapper.with_rho_c(default_config, rho_c), _metrics(completed))

    assert len(await service.history()) == 3
    assert len(await service.history(completed=True)) == 2
    assert [r.rho_c for r in await service.history(min_rho_c=0.4)] == [0.5, 0.75]
    assert [r.rho_c for r in await service.history(max_rho_c=0.6, completed=True)] == [0.375, 0.5]
    assert await service.history(min_rho_c=0.6, completed=True) == []


@pytest.mark.asyncio
async def test_summary_projection(service, default_config):
    record = await service.archive(default_config, _metrics(mean_surge=0.65))
    summary = RunMapper.to_summary(record)
    assert summary["id"] == record.id
    assert summary["mean_surge"] == 0.65
    assert summary["completed"] is True
    assert set(summary) >= {"dateCreation", "label", "seed", "rho_c", "d_bar", "final_time"}
