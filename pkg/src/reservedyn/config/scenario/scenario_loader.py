"""
Chargement des scénarios JSON (temps en minutes, puissances en MW) et des fichiers
fournis avec le paquet.
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from ...controllers.network_builder import NetworkBuilder
from ...controllers.unit_factory import UnitFactory
from ...core.exceptions import ConfigError
from ...core.unit_manager import UnitManager
from ...models.fleet.distributions import ParamDistribution
from ...models.fleet.population import PopulationSpec
from ...models.grid.network import Network
from ...models.multistate.units import MultiStateUnit
from ...models.stochastic.uncertainty import UncertaintySpec

logger = logging.getLogger(__name__)

BUNDLED_DIR = Path(__file__).resolve().parent
ORT_MODES = ("shared", "per_bus")
SCENARIO_KEYS = {"name", "population", "clusters", "deployment", "ambient", "uncertainty", "tcl_buses",
                 "generation", "reserve", "network", "horizon_min", "dt_min", "states_at_min", "prob_floor",
                 "max_states", "state_cap", "ort_mode", "oracle", "workers"}


@dataclass
class OracleSettings:
    """Paramètres de la référence Monte Carlo"""
    devices: int = 2000
    replications: int = 100
    dt_s: float = 1.0
    samples: int = 10000
    seed: int = 1

    def validate(self) -> List[str]:
        errors = []
        if self.devices < 1 or self.replications < 1 or self.samples < 1:
            errors.append("devices, replications et samples doivent être ≥ 1")
        if not 0 < self.dt_s <= 10.0:
            errors.append(f"dt_s doit être dans ]0, 10] s (reçu {self.dt_s})")
        return errors

    def to_dict(self) -> Dict[str, Any]:
        return {"devices": self.devices, "replications": self.replications, "dt_s": self.dt_s,
                "samples": self.samples, "seed": self.seed}


@dataclass
class Scenario:
    """
    Scénario complet : flotte, déploiement, incertitudes, production, réserves et réseau.
    Les temps sont conservés en minutes comme dans le fichier ; les propriétés t_s,
    horizon, dt et times donnent les heures utilisées par les calculs.
    """
    name: str
    population: PopulationSpec
    network: Network
    network_source: Union[str, Dict[str, Any]]
    clusters: Union[int, str] = "auto"
    max_clusters: int = 8
    t_s_min: float = 60.0
    beta: float = 1.0
    standby_failure: float = 0.0
    ambient_trace_min: Tuple[Tuple[float, float], ...] = ((0.0, 32.0),)
    ambient_sigma: float = 1.0
    setpoint_dev: ParamDistribution = field(default_factory=lambda: ParamDistribution.normal(0.0, 0.5))
    order: int = 6
    per_cluster_setpoint: bool = False
    tcl_buses: Optional[Dict[int, float]] = None
    generation: List[Dict[str, Any]] = field(default_factory=list)
    reserve: List[Dict[str, Any]] = field(default_factory=list)
    horizon_min: float = 240.0
    dt_min: float = 1.0
    states_at_min: Tuple[float, ...] = ()
    prob_floor: float = 1e-9
    max_states: int = 5000
    state_cap: int = 200000
    ort_mode: str = "shared"
    oracle: OracleSettings = field(default_factory=OracleSettings)
    workers: int = 1
    source: Optional[Path] = None

    # === GRANDEURS EN HEURES ===

    @property
    def t_s(self) -> float:
        return UnitManager.minutes_to_hours(self.t_s_min)

    @property
    def horizon(self) -> float:
        return UnitManager.minutes_to_hours(self.horizon_min)

    @property
    def dt(self) -> float:
        return UnitManager.minutes_to_hours(self.dt_min)

    @property
    def times(self) -> np.ndarray:
        """Grille 0, Δt, ..., horizon (h)"""
        steps = int(round(self.horizon_min / self.dt_min))
        return np.arange(steps + 1) * self.dt

    @property
    def nominal_ambient(self) -> float:
        return float(self.ambient_trace_min[0][1])

    @property
    def uncertainty(self) -> UncertaintySpec:
        trace = tuple((UnitManager.minutes_to_hours(t), value) for t, value in self.ambient_trace_min)
        ambient_dev = (ParamDistribution.normal(0.0, self.ambient_sigma) if self.ambient_sigma > 0
                       else ParamDistribution.constant(0.0))
        return UncertaintySpec(ambient_trace=trace, ambient_dev=ambient_dev, setpoint_dev=self.setpoint_dev,
                               order=self.order, per_cluster_setpoint=self.per_cluster_setpoint)

    def generation_units(self) -> List[MultiStateUnit]:
        return UnitFactory.create_all(self.generation, "generation")

    def reserve_units(self) -> List[MultiStateUnit]:
        return UnitFactory.create_all(self.reserve, "reserve")

    # === VALIDATION ===

    def validate(self) -> List[str]:
        errors = [f"population: {err}" for err in self.population.validate()]
        if not self.dt_min > 0:
            errors.append(f"dt_min: doit être strictement positif (reçu {self.dt_min})")
        if not self.horizon_min > self.t_s_min:
            errors.append(f"horizon_min: l'horizon ({self.horizon_min}) doit dépasser t_s ({self.t_s_min})")
        if self.t_s_min < 0:
            errors.append("deployment.t_s_min: doit être positif")
        if self.beta < 0:
            errors.append("deployment.beta_c: doit être positif")
        if not 0.0 <= self.standby_failure <= 1.0:
            errors.append("deployment.standby_failure: doit être dans [0, 1]")
        if self.clusters != "auto" and (not isinstance(self.clusters, int) or self.clusters < 1):
            errors.append(f"clusters.count: entier ≥ 1 ou \"auto\" attendu (reçu {self.clusters!r})")
        if self.clusters == "auto" and self.max_clusters < 2:
            errors.append("clusters.max: doit être ≥ 2")
        if not 0.0 <= self.prob_floor <= 1e-4:
            errors.append(f"prob_floor: doit être dans [0, 1e-4] (reçu {self.prob_floor})")
        if self.ort_mode not in ORT_MODES:
            errors.append(f"ort_mode: l'un de {ORT_MODES} attendu")
        if self.workers < 1:
            errors.append("workers: doit être ≥ 1")
        errors.extend(f"uncertainty: {err}" for err in self.uncertainty.validate())
        errors.extend(f"oracle: {err}" for err in self.oracle.validate())

        buses = set(self.network.buses)
        for bus in (self.tcl_buses or {}):
            if bus not in buses:
                errors.append(f"tcl_buses: nœud {bus} absent du réseau")
        if self.tcl_buses is not None and not sum(self.tcl_buses.values()) > 0:
            errors.append("tcl_buses: somme des parts nulle")
        for section in ("generation", "reserve"):
            try:
                units = UnitFactory.create_all(getattr(self, section), section)
            except ConfigError as exc:
                errors.append(str(exc))
                continue
            for unit in units:
                if unit.bus not in buses:
                    errors.append(f"{section}: élément '{unit.id}' rattaché au nœud {unit.bus} absent du réseau")
        return errors

    # === SÉRIALISATION ===

    def to_dict(self) -> Dict[str, Any]:
        """Forme JSON du scénario ; la relire redonne le même scénario"""
        population = {name: getattr(self.population, name).to_dict() for name in ("C", "R", "p", "setpoint")}
        population.update({"count": self.population.count, "cop": self.population.cop,
                           "deadband": self.population.deadband, "seed": self.population.seed,
                           "heat_rate_mode": self.population.heat_rate_mode})
        data = {
            "name": self.name,
            "population": population,
            "clusters": {"count": self.clusters, "max": self.max_clusters},
            "deployment": {"t_s_min": self.t_s_min, "beta_c": self.beta, "standby_failure": self.standby_failure},
            "ambient": {"trace_c": [[t, value] for t, value in self.ambient_trace_min]},
            "uncertainty": {"ambient_sigma_c": self.ambient_sigma, "setpoint": self.setpoint_dev.to_dict(),
                            "order": self.order, "per_cluster_setpoint": self.per_cluster_setpoint},
            "generation": self.generation,
            "reserve": self.reserve,
            "network": self.network_source,
            "horizon_min": self.horizon_min,
            "dt_min": self.dt_min,
            "states_at_min": list(self.states_at_min),
            "prob_floor": self.prob_floor,
            "max_states": self.max_states,
            "state_cap": self.state_cap,
            "ort_mode": self.ort_mode,
            "oracle": self.oracle.to_dict(),
            "workers": self.workers,
        }
        if self.tcl_buses is not None:
            data["tcl_buses"] = {str(bus): share for bus, share in self.tcl_buses.items()}
        return data

    def config_hash(self) -> str:
        """SHA-256 du scénario sérialisé, réseau compris (clés triées)"""
        content = dict(self.to_dict(), network=self.network.to_dict())
        text = json.dumps(content, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def __str__(self) -> str:
        return (f"Scenario('{self.name}', {self.population.count} TCL, t_s={self.t_s_min:g} min, "
                f"β={self.beta:g} °C, horizon {self.horizon_min:g} min, {self.network})")


class ScenarioLoader:
    """Charge un scénario depuis un chemin ou depuis les fichiers fournis avec le paquet"""

    def __init__(self, bundled_dir: Path = BUNDLED_DIR):
        self.bundled_dir = Path(bundled_dir)

    def list_bundled(self) -> List[str]:
        return sorted(p.name for p in self.bundled_dir.glob("*.json") if not p.stem.endswith("_network"))

    def resolve(self, path: Union[str, Path], base_dir: Optional[Path] = None) -> Path:
        """Chemin tel quel, relatif au scénario, puis parmi les fichiers fournis"""
        candidates = [Path(path)]
        if base_dir is not None:
            candidates.append(Path(base_dir) / path)
        candidates.append(self.bundled_dir / Path(path).name)
        for candidate in candidates:
            if candidate.is_file():
                return candidate
        raise ConfigError(f"fichier introuvable : {path}", field="config")

    def load(self, path: Union[str, Path]) -> Scenario:
        resolved = self.resolve(path)
        try:
            with open(resolved, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"JSON invalide dans {resolved.name}, ligne {exc.lineno} colonne {exc.colno} : "
                              f"{exc.msg}", field="config") from exc
        scenario = self.from_dict(data, base_dir=resolved.parent)
        scenario.source = resolved
        logger.info(f"✅ Scénario chargé depuis {resolved}")
        return scenario

    def from_dict(self, data: Dict[str, Any], base_dir: Optional[Path] = None) -> Scenario:
        if not isinstance(data, dict):
            raise ConfigError("objet JSON attendu à la racine", field="config")
        unknown = sorted(set(data) - SCENARIO_KEYS)
        if unknown:
            raise ConfigError(f"clés inconnues {unknown}", field="config")

        try:
            scenario = self._build(data, base_dir)
        except ConfigError:
            raise
        except KeyError as exc:
            raise ConfigError(f"clé manquante {exc}", field=self._field_of(exc)) from exc
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc), field="config") from exc

        errors = scenario.validate()
        if errors:
            raise ConfigError("; ".join(errors), field=None)
        return scenario

    @staticmethod
    def _field_of(exc: KeyError) -> str:
        return str(exc.args[0]) if exc.args else "config"

    def _network(self, source: Union[str, Dict[str, Any]], base_dir: Optional[Path]) -> Network:
        if isinstance(source, str):
            return NetworkBuilder.build_from_file(self.resolve(source, base_dir))
        return NetworkBuilder.build_from_dict(source)

    def _build(self, data: Dict[str, Any], base_dir: Optional[Path]) -> Scenario:
        if "network" not in data:
            raise ConfigError("réseau manquant", field="network")
        network = self._network(data["network"], base_dir)

        ambient = data.get("ambient", {})
        if "trace_c" in ambient:
            trace = tuple((float(t), float(value)) for t, value in ambient["trace_c"])
        else:
            trace = ((0.0, float(ambient.get("mean_c", 32.0))),)
        if not trace:
            raise ConfigError("prévision d'ambiance vide", field="ambient.trace_c")

        pop = data.get("population", {})
        if "count" not in pop:
            raise ConfigError("nombre d'appareils manquant", field="population.count")
        defaults = PopulationSpec(count=0)
        population = PopulationSpec(
            count=int(pop["count"]),
            C=ParamDistribution.from_dict(pop["C"]) if "C" in pop else defaults.C,
            R=ParamDistribution.from_dict(pop["R"]) if "R" in pop else defaults.R,
            p=ParamDistribution.from_dict(pop["p"]) if "p" in pop else defaults.p,
            setpoint=ParamDistribution.from_dict(pop["setpoint"]) if "setpoint" in pop else defaults.setpoint,
            cop=float(pop.get("cop", defaults.cop)),
            deadband=float(pop.get("deadband", defaults.deadband)),
            seed=int(pop.get("seed", defaults.seed)),
            nominal_ambient=trace[0][1],
            heat_rate_mode=pop.get("heat_rate_mode", defaults.heat_rate_mode),
        )

        clusters = data.get("clusters", {})
        deployment = data.get("deployment", {})
        uncertainty = data.get("uncertainty", {})
        oracle = data.get("oracle", {})
        tcl_buses = data.get("tcl_buses")
        count = clusters.get("count", "auto")

        return Scenario(
            name=str(data.get("name", "scenario")),
            population=population,
            network=network,
            network_source=data["network"],
            clusters=count if count == "auto" else int(count),
            max_clusters=int(clusters.get("max", 8)),
            t_s_min=float(deployment.get("t_s_min", 60.0)),
            beta=float(deployment.get("beta_c", 1.0)),
            standby_failure=float(deployment.get("standby_failure", 0.0)),
            ambient_trace_min=trace,
            ambient_sigma=float(uncertainty.get("ambient_sigma_c", 1.0)),
            setpoint_dev=ParamDistribution.from_dict(uncertainty.get("setpoint", {"dist": "normal", "mean": 0.0,
                                                                                 "std": 0.5})),
            order=int(uncertainty.get("order", 6)),
            per_cluster_setpoint=bool(uncertainty.get("per_cluster_setpoint", False)),
            tcl_buses=None if tcl_buses is None else {int(bus): float(share) for bus, share in tcl_buses.items()},
            generation=list(data.get("generation", [])),
            reserve=list(data.get("reserve", [])),
            horizon_min=float(data.get("horizon_min", 240.0)),
            dt_min=float(data.get("dt_min", 1.0)),
            states_at_min=tuple(float(t) for t in data.get("states_at_min", [])),
            prob_floor=float(data.get("prob_floor", 1e-9)),
            max_states=int(data.get("max_states", 5000)),
            state_cap=int(data.get("state_cap", 200000)),
            ort_mode=data.get("ort_mode", "shared"),
            oracle=OracleSettings(
                devices=int(oracle.get("devices", 2000)),
                replications=int(oracle.get("replications", 100)),
                dt_s=float(oracle.get("dt_s", 1.0)),
                samples=int(oracle.get("samples", 10000)),
                seed=int(oracle.get("seed", 1)),
            ),
            workers=int(data.get("workers", 1)),
        )


def load_scenario(path: Union[str, Path]) -> Scenario:
    return ScenarioLoader().load(path)
