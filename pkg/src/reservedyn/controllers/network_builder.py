import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

from ..core.exceptions import ConfigError
from ..core.unit_manager import UnitManager
from ..models.grid.links import Line
from ..models.grid.network import BASE_MVA, Network, NetworkState
from ..models.grid.nodes import Bus

logger = logging.getLogger(__name__)


class NetworkBuilder:
    """Construit un réseau métier depuis sa forme JSON"""

    @staticmethod
    def build_from_file(path: Union[str, Path]) -> Network:
        path = Path(path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError as exc:
            raise ConfigError(f"fichier de réseau introuvable : {path}", field="network") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"JSON invalide dans {path.name}, ligne {exc.lineno} colonne {exc.colno} : {exc.msg}",
                              field="network") from exc
        return NetworkBuilder.build_from_dict(data, default_name=path.stem)

    @staticmethod
    def build_from_dict(data: Dict[str, Any], default_name: str = "network") -> Network:
        """
        {buses:[{id, load_mw | load_trace:[[min, MW], ...]}], lines:[{from, to, x_pu, limit_mw}],
        reference_bus, network_states:[{available:[bool...], probability}]}
        """
        if not isinstance(data, dict):
            raise ConfigError("objet JSON attendu", field="network")
        if not data.get("buses"):
            raise ConfigError("aucun nœud défini", field="network.buses")

        buses = data["buses"]
        reference = data.get("reference_bus", buses[0].get("id"))
        network = Network(data.get("name", default_name), reference, data.get("base_mva", BASE_MVA))

        # 1. Nœuds
        for index, entry in enumerate(buses):
            field = f"network.buses[{index}]"
            try:
                trace = entry.get("load_trace")
                if trace is not None:
                    trace = [(UnitManager.minutes_to_hours(float(t)), float(p)) for t, p in trace]
                network.add_bus(Bus(entry["id"], float(entry.get("load_mw", 0.0)), trace))
            except KeyError as exc:
                raise ConfigError(f"clé manquante {exc}", field=field) from exc
            except (TypeError, ValueError) as exc:
                raise ConfigError(str(exc), field=field) from exc

        # 2. Lignes
        for index, entry in enumerate(data.get("lines", [])):
            field = f"network.lines[{index}]"
            try:
                line_id = str(entry.get("id", f"L{index + 1}"))
                network.add_line(Line(line_id, entry["from"], entry["to"], entry["x_pu"], entry["limit_mw"]))
            except KeyError as exc:
                raise ConfigError(f"clé manquante {exc}", field=field) from exc
            except (TypeError, ValueError) as exc:
                raise ConfigError(str(exc), field=field) from exc

        # 3. États du réseau (par défaut toutes lignes disponibles)
        states = data.get("network_states")
        if states:
            network.set_network_states([NetworkState(tuple(bool(x) for x in s["available"]), float(s["probability"]))
                                        for s in states])

        errors = network.validate()
        if errors:
            raise ConfigError("; ".join(errors), field="network")
        logger.info(f"✅ Réseau construit : {network}")
        return network
