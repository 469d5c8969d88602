from typing import Any, Dict, List

from .components import GridComponent

"""
Définit les lignes du réseau (modèle DC : réactance et limite de transit)
"""


#définit une ligne, basée sur GridComponent---------------------------------------------------------------------------------
class Line(GridComponent):
    """
    Ligne entre deux nœuds : réactance x_pu (p.u., base 100 MVA) et limite de transit (MW).
    """

    def __init__(self, line_id: str, from_bus: int, to_bus: int, x_pu: float, limit_mw: float):
        super().__init__(line_id)
        self.from_bus = int(from_bus)
        self.to_bus = int(to_bus)
        self.x_pu = float(x_pu)
        self.limit_mw = float(limit_mw)

    @property
    def susceptance(self) -> float:
        return 1.0 / self.x_pu

    def validate(self) -> List[str]:
        errors = super().validate()
        if self.from_bus == self.to_bus:
            errors.append("les nœuds de départ et d'arrivée ne peuvent pas être identiques")
        if not self.x_pu > 0:
            errors.append(f"la réactance doit être strictement positive (reçu {self.x_pu})")
        if not self.limit_mw > 0:
            errors.append(f"la limite de transit doit être strictement positive (reçu {self.limit_mw})")
        return errors

    def to_dict(self) -> Dict[str, Any]:
        return {"id": self.id, "from": self.from_bus, "to": self.to_bus, "x_pu": self.x_pu, "limit_mw": self.limit_mw}

    def __str__(self) -> str:
        return f"Line('{self.id}', {self.from_bus}->{self.to_bus}, x={self.x_pu} p.u., {self.limit_mw:g} MW)"
