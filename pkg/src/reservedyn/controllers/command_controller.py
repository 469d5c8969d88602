"""
Interface en ligne de commande reserve-dyn.

Sous-commandes : aggregate, distribution, multistate, evaluate, oracle, compare.
Codes de sortie : 0 succès, 2 erreur de configuration ou d'argument, 3 échec numérique.
"""

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from .. import __version__
from ..config.scenario.scenario_loader import Scenario, ScenarioLoader
from ..core.exceptions import ConfigError, DomainError, NumericalError
from ..core.log_config import configure_logging
from ..core.unit_manager import UnitManager, get_unit_manager
from ..file_io.output_manager import OutputManager, RunManifest
from ..models.dynamics.timeline import junction_jumps
from ..models.stochastic.propagation import power_distribution
from ..simulation.monte_carlo import fleet_replications, mc_reliability, relative_errors
from ..simulation.reliability_manager import VARIANTS, ReliabilityManager

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
COMMANDS = ("aggregate", "distribution", "multistate", "evaluate", "oracle", "compare")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reserve-dyn",
                                     description="Réserve opérationnelle des TCL et fiabilité court terme")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="scénario JSON (chemin ou nom d'un fichier fourni)")
    common.add_argument("--out", default=None, help="dossier de sortie (défaut : out/<commande>)")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v INFO, -vv DEBUG")
    common.add_argument("--log-file", default=None)
    common.add_argument("--workers", type=int, default=None, help="processus parallèles")
    common.add_argument("--seed", type=int, default=None, help="remplace les graines du scénario")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("aggregate", parents=[common], help="puissance agrégée et réserve déterministes")
    distribution = sub.add_parser("distribution", parents=[common], help="loi de P(t) à un instant")
    distribution.add_argument("--at", type=float, required=True, help="instant (min)")
    distribution.add_argument("--step", type=float, default=0.1, help="pas du tableau (MW)")
    multistate = sub.add_parser("multistate", parents=[common], help="états de réserve MORT à un instant")
    multistate.add_argument("--at", type=float, required=True, help="instant (min)")
    evaluate = sub.add_parser("evaluate", parents=[common], help="indices LOLP, EENS, LOLE")
    evaluate.add_argument("--variant", choices=VARIANTS + ("all",), default="ORT")
    oracle = sub.add_parser("oracle", parents=[common], help="référence Monte Carlo")
    oracle.add_argument("--samples", type=int, default=None)
    oracle.add_argument("--variant", choices=VARIANTS, default="ORT")
    compare = sub.add_parser("compare", parents=[common], help="analytique contre Monte Carlo")
    compare.add_argument("--samples", type=int, default=None)
    compare.add_argument("--variant", choices=VARIANTS, default="ORT")
    return parser


def _apply_overrides(scenario: Scenario, args) -> Scenario:
    if args.workers is not None:
        scenario.workers = args.workers
    if args.seed is not None:
        scenario.population = dataclasses.replace(scenario.population, seed=args.seed)
        scenario.oracle = dataclasses.replace(scenario.oracle, seed=args.seed)
    return scenario


def _time_index(scenario: Scenario, at_min: float) -> int:
    if not 0.0 <= at_min <= scenario.horizon_min:
        raise ConfigError(f"instant {at_min} min hors de [0, {scenario.horizon_min}]", field="--at")
    return int(np.argmin(np.abs(scenario.times - UnitManager.minutes_to_hours(at_min))))


# === SOUS-COMMANDES ===

def _cmd_aggregate(scenario: Scenario, manager: ReliabilityManager, output: OutputManager, args):
    manager.prepare_fleet()
    output.write_csv(manager.artifacts["aggregate"], "aggregate")
    rows = []
    for c, (cluster, timeline) in enumerate(zip(manager.clusters, manager.timelines)):
        rows.append({"cluster": c, "members": cluster.member_count, "power_mw": cluster.member_power_sum / 1000.0,
                     "T_on0_min": 60.0 * timeline.base_times[0], "T_off0_min": 60.0 * timeline.base_times[1],
                     "path": f"{timeline.path[0].name}x{timeline.path[1].name}",
                     "breakpoints_min": " ".join(f"{60.0 * b:.2f}" for b in timeline.breakpoints),
                     "jumps": len(junction_jumps(timeline))})
    output.write_csv(pd.DataFrame(rows), "clusters")
    trajectory = manager.artifacts["aggregate"]
    after = trajectory[trajectory["time_min"] >= scenario.t_s_min]
    units = get_unit_manager()
    peak = after.loc[after["reserve_mw"].idxmax()]
    print(f"P⁰ = {units.format_power(manager.P0)} ; réserve maximale {units.format_power(peak['reserve_mw'])} "
          f"à {units.format_time(UnitManager.minutes_to_hours(peak['time_min']), 0)}")


def _cmd_distribution(scenario: Scenario, manager: ReliabilityManager, output: OutputManager, args):
    manager.prepare_fleet()
    k = _time_index(scenario, args.at)
    t = float(scenario.times[k])
    distribution = power_distribution(manager.clusters, manager.timelines, scenario.uncertainty, t)
    output.write_csv(distribution.table(args.step), f"distribution_{args.at:g}")
    manager.compute_distributions()
    output.write_csv(manager.artifacts["distribution"], "distribution_trace")
    print(f"t = {args.at:g} min : moyenne {distribution.mean:.3f} MW, écart-type {distribution.cumulants.std:.3f} MW")


def _cmd_multistate(scenario: Scenario, manager: ReliabilityManager, output: OutputManager, args):
    manager.prepare_fleet()
    manager.compute_distributions()
    manager.build_mort()
    k = _time_index(scenario, args.at)
    states = pd.DataFrame(manager.mort.states_at(float(scenario.times[k])), columns=["rc_mw", "probability"])
    output.write_csv(states, f"mort_{args.at:g}")
    output.write_csv(manager.artifacts.get("mort", states), "mort")
    print(f"{len(manager.grid)} états de réserve ; état le plus probable à {args.at:g} min : "
          f"{states.loc[states['probability'].idxmax(), 'rc_mw']:.2f} MW")


def _cmd_evaluate(scenario: Scenario, manager: ReliabilityManager, output: OutputManager, args):
    variants = VARIANTS if args.variant == "all" else (args.variant,)
    summaries = []
    for variant in variants:
        result = manager.run(variant)
        prefix = "" if len(variants) == 1 else f"{variant}_"
        indices = result.indices
        output.write_csv(indices.lolp_frame(), f"{prefix}lolp")
        output.write_csv(indices.eens_frame(), f"{prefix}eens")
        output.write_csv(indices.lole_frame(), f"{prefix}lole")
        output.write_frames(result.artifacts, prefix)
        summaries.append(indices.summary())
    summary = pd.concat(summaries, ignore_index=True)
    output.write_csv(summary, "summary")
    print(summary[summary["bus"] == "system"].to_string(index=False))


def _cmd_oracle(scenario: Scenario, manager: ReliabilityManager, output: OutputManager, args):
    replications = fleet_replications(scenario, manager)
    frame = replications.to_frame()
    frame.insert(0, "time_min", UnitManager.hours_to_minutes(frame.pop("time_h")))
    output.write_csv(frame, "oracle_aggregate")
    indices = mc_reliability(scenario, args.samples, variant=args.variant, manager=manager,
                             replications=replications)
    output.write_csv(indices.lolp_frame(), "mc_lolp")
    output.write_csv(indices.eens_frame(), "mc_eens")
    output.write_csv(indices.lole_frame(), "mc_lole")
    print(f"Monte Carlo {args.variant} : EENS = {indices.eens():.5f} MWh, LOLE = {indices.lole():.6f} h")


def _cmd_compare(scenario: Scenario, manager: ReliabilityManager, output: OutputManager, args):
    results = {variant: manager.run(variant) for variant in VARIANTS
               if variant != "ORT+CR" or scenario.reserve}
    output.write_csv(pd.concat([r.indices.summary() for r in results.values()], ignore_index=True), "variants")
    analytical = results[args.variant].indices
    monte_carlo = mc_reliability(scenario, args.samples, variant=args.variant, manager=manager)
    output.write_csv(analytical.lolp_frame(), "lolp")
    output.write_csv(monte_carlo.lolp_frame(), "mc_lolp")
    report = pd.DataFrame(relative_errors(analytical, monte_carlo))
    output.write_csv(report, "compare")
    print(report[report["bus"] == "system"].to_string(index=False))


HANDLERS = {
    "aggregate": _cmd_aggregate,
    "distribution": _cmd_distribution,
    "multistate": _cmd_multistate,
    "evaluate": _cmd_evaluate,
    "oracle": _cmd_oracle,
    "compare": _cmd_compare,
}


def run(argv: Optional[List[str]] = None) -> int:
    """Point d'entrée de la CLI ; renvoie le code de sortie"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG

    configure_logging(args.verbose, args.log_file)
    try:
        scenario = _apply_overrides(ScenarioLoader().load(args.config), args)
        manager = ReliabilityManager(scenario)
        manifest = RunManifest(args.command, scenario.config_hash(),
                               {"population": scenario.population.seed, "oracle": scenario.oracle.seed})
        output = OutputManager(Path(args.out or Path("out") / args.command), manifest)
        HANDLERS[args.command](scenario, manager, output, args)
        output.finalize(manager.timings)
    except ConfigError as exc:
        logger.error(f"Erreur de configuration : {exc}")
        print(f"reserve-dyn: erreur de configuration : {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, DomainError) as exc:
        logger.error(f"Échec numérique : {exc}")
        print(f"reserve-dyn: échec numérique : {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"reserve-dyn: argument invalide : {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def main():
    sys.exit(run())
