from typing import Any, Dict, List, Optional

from ..core.exceptions import ConfigError
from ..core.unit_manager import UnitManager
from ..models.multistate.units import (ConventionalReserveUnit, MultiStateUnit, TableUnit, TwoStateUnit,
                                       WindFarmUnit)

UNIT_TYPES = ("two_state", "table", "wind_farm", "conventional_reserve")


class UnitFactory:
    """
    Crée les éléments multi-états depuis leur forme JSON.

    Taux de panne et de réparation en 1/h, capacités en MW, instants en minutes.
    "count": N crée N éléments identiques suffixés _1.._N.
    """

    @staticmethod
    def create_units(data: Dict[str, Any], field: str = "generation") -> List[MultiStateUnit]:
        unit_type = data.get("type", "two_state")
        count = int(data.get("count", 1))
        if count < 1:
            raise ConfigError(f"count doit être ≥ 1 (reçu {count})", field=field)
        base_id = str(data.get("id", "")).strip()
        if not base_id:
            raise ConfigError("élément sans id", field=field)
        ids = [base_id] if count == 1 else [f"{base_id}_{k + 1}" for k in range(count)]

        try:
            units = [UnitFactory._create_instance(unit_type, unit_id, data) for unit_id in ids]
        except KeyError as exc:
            raise ConfigError(f"clé manquante {exc} pour l'élément '{base_id}'", field=field) from exc
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"élément '{base_id}' invalide : {exc}", field=field) from exc

        for unit in units:
            errors = unit.validate()
            if errors:
                raise ConfigError(f"élément '{unit.id}' : " + "; ".join(errors), field=field)
        return units

    @staticmethod
    def create_all(entries: List[Dict[str, Any]], field: str = "generation") -> List[MultiStateUnit]:
        units: List[MultiStateUnit] = []
        for index, entry in enumerate(entries):
            units.extend(UnitFactory.create_units(entry, f"{field}[{index}]"))
        ids = [unit.id for unit in units]
        duplicates = sorted({unit_id for unit_id in ids if ids.count(unit_id) > 1})
        if duplicates:
            raise ConfigError(f"IDs en double : {duplicates}", field=field)
        return units

    @staticmethod
    def _create_instance(unit_type: str, unit_id: str, properties: Dict[str, Any]) -> MultiStateUnit:
        """Adapte les paramètres selon le type d'élément"""
        bus = properties.get("bus")
        bus = None if bus is None else int(bus)

        if unit_type == "two_state":
            return TwoStateUnit(unit_id, properties["capacity_mw"], properties.get("failure_rate", 0.0),
                                properties.get("repair_rate", 0.0), properties.get("initial_state", 1), bus)

        elif unit_type == "table":
            return TableUnit(unit_id, properties["capacities_mw"], properties["probabilities"], bus)

        elif unit_type == "wind_farm":
            return WindFarmUnit(
                unit_id,
                properties["turbines"],
                properties["rated_mw"],
                properties["cut_in_kmh"],
                properties["rated_kmh"],
                properties["cut_out_kmh"],
                [tuple(state) for state in properties["wind_states"]],
                properties.get("failure_rate", 0.0),
                properties.get("repair_rate", 0.0),
                bus,
            )

        elif unit_type == "conventional_reserve":
            commit_min: Optional[float] = properties.get("commit_min")
            commit = None if commit_min is None else UnitManager.minutes_to_hours(float(commit_min))
            return ConventionalReserveUnit(unit_id, properties["capacity_mw"], properties.get("failure_rate", 0.0),
                                           properties.get("repair_rate", 0.0), commit,
                                           UnitManager.minutes_to_hours(float(properties.get("lead_min", 0.0))),
                                           bus)

        raise ValueError(f"type d'élément inconnu '{unit_type}', attendu l'un de {UNIT_TYPES}")
