"""
Chronologie de migration d'un groupe de TCL après un décalage de consigne.

Après le décalage à t_s, les temps ON/OFF attendus du groupe suivent une suite de
morceaux affines en τ = t − t_s. Chaque morceau et chacune de ses bornes est une forme
affine des cinq grandeurs (T_on⁰, T_off⁰, T_on_new, T_off_new, ΔT_off) ; on peut donc
réévaluer les bornes pour une ambiance ou une consigne perturbée sans reconstruire
la chronologie.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..fleet.clustering import Cluster
from ..thermal.device import DeviceParams, HysteresisBand
from ..thermal.thermal_converter import ThermalConverter

logger = logging.getLogger(__name__)

#ordre des grandeurs dans le vecteur q
QUANTITIES = ("T_on0", "T_off0", "T_on_new", "T_off_new", "dT")

MIN_OFF_TIME = 1e-9     # h, plancher de T_off après écrêtage
CYCLE_TOLERANCE = 1e-9  # h, égalité des cycles ancien/nouveau traitée comme NOGAP
MIN_PIECE_LENGTH = 1e-12


class DelayOrder(Enum):
    """Position du délai de migration par rapport à T_on⁰"""
    C1 = "T_on0 < dT"
    C2 = "dT < T_on0"


class CycleGap(Enum):
    """Comparaison de l'ancien cycle au nouveau"""
    GAP = "ancien cycle < nouveau cycle"
    NOGAP = "ancien cycle ≥ nouveau cycle"


@dataclass(frozen=True)
class AffineForm:
    """Forme affine c·q + a·τ"""
    coeffs: Tuple[float, float, float, float, float]
    tau: float = 0.0

    def __call__(self, q: np.ndarray, tau: float = 0.0) -> float:
        return float(np.dot(self.coeffs, q) + self.tau * tau)

    def __str__(self) -> str:
        terms = [f"{c:+g}·{name}" for c, name in zip(self.coeffs, QUANTITIES) if c != 0.0]
        if self.tau:
            terms.append(f"{self.tau:+g}·τ")
        return " ".join(terms) if terms else "0"


def _form(T_on0=0.0, T_off0=0.0, T_on_new=0.0, T_off_new=0.0, dT=0.0, tau=0.0) -> AffineForm:
    return AffineForm((T_on0, T_off0, T_on_new, T_off_new, dT), tau)


ZERO = _form()


@dataclass(frozen=True)
class IntervalPiece:
    """
    Morceau ξ de la chronologie : [lower, upper) en heures relatives à t_s.
    lower_form = None signifie −∞, upper_form = None signifie +∞.
    """
    index: int
    label: str
    lower_form: Optional[AffineForm]
    upper_form: Optional[AffineForm]
    on_time_formula: AffineForm
    off_time_formula: AffineForm
    diagnostic_span: Optional[Tuple[Tuple[float, float], Tuple[float, float]]] = None

    def lower(self, q: np.ndarray) -> float:
        return -np.inf if self.lower_form is None else self.lower_form(q)

    def upper(self, q: np.ndarray) -> float:
        return np.inf if self.upper_form is None else self.upper_form(q)

    def times(self, q: np.ndarray, tau: float) -> Tuple[float, float]:
        """(T_on, T_off) écrêtés : T_on ≥ 0 et T_off ≥ MIN_OFF_TIME"""
        t_on = max(self.on_time_formula(q, tau), 0.0)
        t_off = max(self.off_time_formula(q, tau), MIN_OFF_TIME)
        return t_on, t_off

    def clamped_times(self, q: np.ndarray, tau: float) -> Tuple[float, float]:
        """times au point du morceau le plus proche de τ (pas d'extrapolation des formules)"""
        return self.times(q, min(max(tau, self.lower(q)), self.upper(q)))

    @property
    def always_off(self) -> bool:
        """T_on ≡ 0 : puissance identiquement nulle sur le morceau"""
        return not any(self.on_time_formula.coeffs) and self.on_time_formula.tau == 0.0


@dataclass(frozen=True)
class MigrationTimeline:
    """Chronologie complète d'un groupe (morceaux triés, le dernier est le nouveau régime établi)"""
    t_s: float
    beta: float
    base_times: Tuple[float, float]
    new_times: Tuple[float, float]
    delay: float
    pieces: Tuple[IntervalPiece, ...]
    path: Tuple[DelayOrder, CycleGap]

    @property
    def q(self) -> np.ndarray:
        return np.array([*self.base_times, *self.new_times, self.delay])

    @property
    def breakpoints(self) -> List[float]:
        """Bornes intérieures (h relatives à t_s), strictement croissantes"""
        q = self.q
        return [piece.lower(q) for piece in self.pieces if piece.lower_form is not None and piece.lower(q) > 0.0]

    def piece_at(self, t: float, q: Optional[np.ndarray] = None) -> IntervalPiece:
        """Morceau contenant l'instant absolu t"""
        q = self.q if q is None else q
        tau = t - self.t_s
        for piece in self.pieces:
            if tau < piece.upper(q):
                return piece
        return self.pieces[-1]

    def __str__(self) -> str:
        bps = ", ".join(f"{60.0 * b:.2f}" for b in self.breakpoints)
        return f"MigrationTimeline(t_s={self.t_s} h, β={self.beta} °C, chemin {self.path[0].name}×{self.path[1].name}, bornes [{bps}] min)"


def timeline_quantities(params: DeviceParams, band: HysteresisBand, ambient: float, beta: float) -> np.ndarray:
    """Vecteur q = (T_on⁰, T_off⁰, T_on_new, T_off_new, ΔT_off) en heures"""
    t_on0, t_off0 = ThermalConverter.steady_cycle_times(params, band, ambient)
    t_on_new, t_off_new = ThermalConverter.shifted_cycle_times(params, band, ambient, beta)
    delay = ThermalConverter.migration_delay(params, band, ambient, beta)
    return np.array([t_on0, t_off0, t_on_new, t_off_new, delay])


def _candidate_pieces(q: np.ndarray) -> Tuple[Tuple[DelayOrder, CycleGap], list]:
    """Liste des morceaux candidats (label, borne basse, borne haute, T_on, T_off)"""
    t_on0, t_off0, t_on_new, t_off_new, delay = q
    order = DelayOrder.C1 if t_on0 < delay else DelayOrder.C2
    gap = CycleGap.GAP if (t_on0 + t_off0) < (t_on_new + t_off_new) - CYCLE_TOLERANCE else CycleGap.NOGAP

    old_cycle_plus_delay = _form(T_on0=1, T_off0=1, dT=1)
    ramp_end = _form(T_on_new=1, dT=1)

    candidates = []
    if order is DelayOrder.C1:
        candidates.append(("draining", ZERO, _form(T_on0=1), _form(T_on0=1, tau=-1), _form(T_off0=1, tau=1)))
        candidates.append(("all_off", _form(T_on0=1), _form(dT=1), ZERO, _form(T_on0=1, T_off0=1)))
        ramp_start = _form(dT=1)
    else:
        candidates.append(("draining", ZERO, _form(dT=1), _form(T_on0=1, tau=-1), _form(T_off0=1, tau=1)))
        candidates.append(("early_release", _form(dT=1), _form(T_on0=1), _form(T_on0=1, dT=-1),
                           _form(T_off0=1, dT=1)))
        ramp_start = _form(T_on0=1)
    candidates.append(("new_on_ramp", ramp_start, ramp_end, _form(dT=-1, tau=1),
                       _form(T_on0=1, T_off0=1, dT=1, tau=-1)))

    if gap is CycleGap.GAP:
        candidates.append(("gap_hold", ramp_end, old_cycle_plus_delay, _form(T_on_new=1),
                           _form(T_on0=1, T_off0=1, T_on_new=-1)))
        new_cycle_plus_delay = _form(T_on_new=1, T_off_new=1, dT=1)
        candidates.append(("gap_fill", old_cycle_plus_delay, new_cycle_plus_delay, _form(T_on_new=1),
                           _form(T_on_new=-1, dT=-1, tau=1)))
        steady_start = new_cycle_plus_delay
    else:
        steady_start = _form(T_on0=1, T_off0=1, T_on_new=-1, dT=1)
        candidates.append(("nogap_drain", ramp_end, steady_start, _form(T_on_new=1),
                           _form(T_on0=1, T_off0=1, dT=1, tau=-1)))
    candidates.append(("steady_new", steady_start, None, _form(T_on_new=1), _form(T_off_new=1)))
    return (order, gap), candidates


def build_timeline_from_quantities(q: np.ndarray, t_s: float, beta: float) -> MigrationTimeline:
    """Assemble les morceaux à partir du vecteur q (morceaux de longueur nulle omis)"""
    path, candidates = _candidate_pieces(q)

    kept = [("steady_old", None, _form(T_on0=1), _form(T_off0=1))]
    current_lower = ZERO
    for label, lower_form, upper_form, on_form, off_form in candidates:
        effective_lower = lower_form if lower_form(q) >= current_lower(q) else current_lower
        if upper_form is not None and upper_form(q) - effective_lower(q) <= MIN_PIECE_LENGTH:
            logger.debug(f"Morceau '{label}' de longueur nulle omis")
            current_lower = effective_lower
            continue
        kept.append((label, effective_lower, on_form, off_form))
        current_lower = upper_form if upper_form is not None else effective_lower

    pieces = []
    for index, (label, lower_form, on_form, off_form) in enumerate(kept):
        upper_form = kept[index + 1][1] if index + 1 < len(kept) else None
        pieces.append(IntervalPiece(index, label, lower_form, upper_form, on_form, off_form))

    return MigrationTimeline(
        t_s=t_s,
        beta=beta,
        base_times=(float(q[0]), float(q[1])),
        new_times=(float(q[2]), float(q[3])),
        delay=float(q[4]),
        pieces=tuple(pieces),
        path=path,
    )


def build_timeline(cluster: Cluster, beta: float, ambient: float, t_s: float) -> MigrationTimeline:
    """
    Chronologie de migration du groupe pour un décalage beta appliqué à t_s (h).
    """
    if not beta > 0:
        raise ValueError(f"Le décalage de consigne doit être strictement positif (reçu {beta})")
    q = timeline_quantities(cluster.representative, cluster.band, ambient, beta)
    timeline = build_timeline_from_quantities(q, t_s, beta)
    logger.debug(str(timeline))

    for (breakpoint, jump_on, jump_off), right in zip(junction_jumps(timeline), timeline.pieces[2:]):
        if abs(jump_on) > CYCLE_TOLERANCE or abs(jump_off) > CYCLE_TOLERANCE:
            #saut attendu de la rampe NOGAP vers le régime établi
            literal = timeline.path[1] is CycleGap.NOGAP and right.label == "steady_new"
            log = logger.debug if literal else logger.warning
            log(f"Discontinuité à τ={60.0 * breakpoint:.2f} min : "
                f"ΔT_on={60.0 * jump_on:.3f} min, ΔT_off={60.0 * jump_off:.3f} min")
    return timeline


def expected_cycle_times(timeline: MigrationTimeline, t: float) -> Tuple[float, float]:
    """(T_on(t), T_off(t)) en heures, écrêtés"""
    piece = timeline.piece_at(t)
    return piece.times(timeline.q, t - timeline.t_s)


def junction_jumps(timeline: MigrationTimeline) -> List[Tuple[float, float, float]]:
    """Sauts (borne, ΔT_on, ΔT_off) des formules brutes à chaque jonction de morceaux transitoires"""
    q = timeline.q
    jumps = []
    for left, right in zip(timeline.pieces[1:-1], timeline.pieces[2:]):
        tau = right.lower(q)
        jump_on = right.on_time_formula(q, tau) - left.on_time_formula(q, tau)
        jump_off = right.off_time_formula(q, tau) - left.off_time_formula(q, tau)
        jumps.append((tau, jump_on, jump_off))
    return jumps


def build_timelines(clusters: Sequence[Cluster], beta: float, ambient: float, t_s: float) -> List[MigrationTimeline]:
    """Une chronologie par groupe"""
    return [build_timeline(cluster, beta, ambient, t_s) for cluster in clusters]
