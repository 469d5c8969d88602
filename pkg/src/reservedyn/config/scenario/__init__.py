from .scenario_loader import BUNDLED_DIR, OracleSettings, Scenario, ScenarioLoader, load_scenario

__all__ = ['BUNDLED_DIR', 'OracleSettings', 'Scenario', 'ScenarioLoader', 'load_scenario']
