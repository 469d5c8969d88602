"""
Hiérarchie des exceptions de reservedyn.

Les erreurs d'argument simples restent des ValueError (comme dans les constructeurs
des modèles); les erreurs ci-dessous servent à distinguer les codes de sortie de la CLI.
"""

from typing import Optional


class ReserveDynError(Exception):
    """Classe de base de toutes les erreurs métier"""


class ConfigError(ReserveDynError, ValueError):
    """Fichier de scénario ou de réseau invalide"""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class DomainError(ReserveDynError, ValueError):
    """Point de fonctionnement thermique infaisable (bande, ambiance, décalage)"""


class NumericalError(ReserveDynError, RuntimeError):
    """Échec numérique : programme linéaire, dépassement du nombre d'états, quadrature"""

    def __init__(self, message: str, stage: Optional[str] = None, state_id: Optional[int] = None):
        self.stage = stage
        self.state_id = state_id
        prefix = ""
        if stage:
            prefix += f"[{stage}] "
        if state_id is not None:
            prefix += f"(état {state_id}) "
        super().__init__(prefix + message)
