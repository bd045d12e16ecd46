from app.mappers.run_mapper import RunMapper
from app.mappers.scenario_mapper import ScenarioMapper

__all__ = ["RunMapper", "ScenarioMapper"]
