from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .components import GridComponent

"""
Définit les nœuds du réseau (jeux de barres) et leur charge de base D̄_i(t)
"""


#définit un nœud, basé sur GridComponent---------------------------------------------------------------------------------
class Bus(GridComponent):
    """
    Nœud du réseau. La charge est constante (load_mw) ou suit une trace
    [(heure, MW), ...] interpolée linéairement.
    """

    def __init__(self, index: int, load_mw: float = 0.0, load_trace: Optional[Sequence[Tuple[float, float]]] = None):
        if not isinstance(index, (int, np.integer)) or isinstance(index, bool):
            raise ValueError(f"L'indice du nœud doit être un entier (reçu {index!r})")
        super().__init__(f"bus{index}")
        self.index = int(index)
        self.load_mw = float(load_mw)
        self.load_trace = [(float(t), float(p)) for t, p in load_trace] if load_trace else None

    def load_at(self, t: float) -> float:
        """D̄_i(t) en MW, t en heures"""
        if self.load_trace is None:
            return self.load_mw
        times, values = zip(*self.load_trace)
        return float(np.interp(t, times, values))

    @property
    def peak_load(self) -> float:
        if self.load_trace is None:
            return self.load_mw
        return max(p for _, p in self.load_trace)

    def validate(self) -> List[str]:
        errors = super().validate()
        if self.index < 0:
            errors.append("l'indice du nœud doit être positif")
        if self.load_mw < 0:
            errors.append("la charge doit être positive")
        if self.load_trace is not None:
            times = [t for t, _ in self.load_trace]
            if any(b <= a for a, b in zip(times, times[1:])):
                errors.append("les instants de la trace de charge doivent être croissants")
            if any(p < 0 for _, p in self.load_trace):
                errors.append("charge négative dans la trace")
        return errors

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"id": self.index}
        if self.load_trace is None:
            data["load_mw"] = self.load_mw
        else:
            #fichiers en minutes
            data["load_trace"] = [[60.0 * t, p] for t, p in self.load_trace]
        return data

    def __str__(self) -> str:
        load = f"{self.load_mw:g} MW" if self.load_trace is None else f"trace de {len(self.load_trace)} points"
        return f"Bus({self.index}, charge {load})"
