"""
Classe de base pour tous les composants du réseau électrique
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List


class GridComponent(ABC):
    """
    Classe de base abstraite pour les composants du réseau (nœuds, lignes).

    Cette classe définit l'identifiant, l'état actif et la validation communs.
    """

    def __init__(self, component_id: str):
        """
        Args:
            component_id (str): Identifiant unique du composant

        Raises:
            ValueError: Si l'ID est vide ou None
        """
        if not component_id or not isinstance(component_id, str):
            raise ValueError("L'ID du composant doit être une chaîne non vide")

        self.id = component_id.strip()
        if not self.id:
            raise ValueError("L'ID du composant ne peut pas être vide")

        self.is_active = True
        self.metadata: Dict[str, Any] = {}

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """Forme JSON du composant (format des fichiers de réseau)"""

    def validate(self) -> List[str]:
        """
        Liste des erreurs de validation (vide si valide). Surchargée par les classes dérivées.
        """
        errors = []
        if not self.id:
            errors.append("ID du composant manquant")
        return errors

    def __str__(self) -> str:
        return f"{self.__class__.__name__}(id='{self.id}')"

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(id='{self.id}', active={self.is_active})"
