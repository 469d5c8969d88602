from enum import Enum
from typing import Optional
import json
import logging

logger = logging.getLogger(__name__)


class TimeUnit(Enum):
    """Énumération des unités de temps disponibles"""
    H = "h"
    MIN = "min"
    S = "s"


class PowerUnit(Enum):
    """Énumération des unités de puissance disponibles"""
    KW = "kW"
    MW = "MW"


class UnitManager:
    """
    Gestionnaire des unités pour la SAISIE (fichiers de scénario) et l'AFFICHAGE des résultats.
    Pattern Singleton pour garantir une seule instance dans toute l'application.

    PRINCIPE:
    - Les calculs internes utilisent toujours les heures, le kW par appareil et le MW par réseau
    - Les fichiers de scénario donnent les temps en minutes et les puissances en MW
    - La conversion se fait uniquement à la lecture et à l'affichage
    """

    _instance = None
    _initialized = False

    def __new__(cls):
        """Pattern Singleton : une seule instance"""
        if cls._instance is None:
            cls._instance = super(UnitManager, cls).__new__(cls)
        return cls._instance

    def __init__(self):
        """Initialisation une seule fois grâce au flag _initialized"""
        if UnitManager._initialized:
            return

        # Unités par défaut pour l'affichage (rapports de la CLI)
        self.time_unit = TimeUnit.MIN
        self.power_unit = PowerUnit.MW

        # Facteurs de conversion DEPUIS les unités internes (h, MW) VERS l'unité d'affichage
        self.time_conversions = {
            TimeUnit.H: 1.0,
            TimeUnit.MIN: 60.0,
            TimeUnit.S: 3600.0,
        }

        self.power_conversions = {
            PowerUnit.KW: 1000.0,
            PowerUnit.MW: 1.0,
        }

        self.load_settings()

        UnitManager._initialized = True

    @classmethod
    def get_instance(cls):
        """Méthode alternative pour obtenir l'instance (plus explicite)"""
        if cls._instance is None:
            cls._instance = cls()
        return cls._instance

    # === MÉTHODES POUR LA SAISIE (fichiers -> unités internes) ===

    @staticmethod
    def minutes_to_hours(value_min: float) -> float:
        return value_min / 60.0

    @staticmethod
    def hours_to_minutes(value_h: float) -> float:
        return value_h * 60.0

    @staticmethod
    def seconds_to_hours(value_s: float) -> float:
        return value_s / 3600.0

    @staticmethod
    def kw_to_mw(value_kw):
        return value_kw / 1000.0

    # === MÉTHODES POUR L'AFFICHAGE (unités internes -> unité choisie) ===

    def display_time(self, time_h: Optional[float]) -> Optional[float]:
        """Convertir un temps depuis les heures vers l'unité d'affichage"""
        if time_h is None:
            return None
        return float(time_h) * self.time_conversions[self.time_unit]

    def display_power(self, power_mw: Optional[float]) -> Optional[float]:
        """Convertir une puissance depuis le MW vers l'unité d'affichage"""
        if power_mw is None:
            return None
        return float(power_mw) * self.power_conversions[self.power_unit]

    def format_time(self, time_h: Optional[float], precision: int = 2) -> str:
        if time_h is None:
            return "N/A"
        return f"{self.display_time(time_h):.{precision}f} {self.time_unit.value}"

    def format_power(self, power_mw: Optional[float], precision: int = 2) -> str:
        if power_mw is None:
            return "N/A"
        return f"{self.display_power(power_mw):.{precision}f} {self.power_unit.value}"

    def set_time_unit(self, unit: TimeUnit):
        self.time_unit = unit

    def set_power_unit(self, unit: PowerUnit):
        self.power_unit = unit

    # === PERSISTANCE DES PRÉFÉRENCES ===

    def save_settings(self, filepath: str = "unit_settings.json"):
        """Sauvegarder les unités d'affichage"""
        settings = {
            "time_unit": self.time_unit.value,
            "power_unit": self.power_unit.value
        }
        try:
            with open(filepath, 'w') as f:
                json.dump(settings, f, indent=2)
        except OSError as e:
            logger.warning(f"Erreur lors de la sauvegarde des unités: {e}")

    def load_settings(self, filepath: str = "unit_settings.json"):
        """Charger les unités d'affichage (valeurs par défaut si le fichier manque)"""
        try:
            with open(filepath, 'r') as f:
                settings = json.load(f)

            for unit in TimeUnit:
                if unit.value == settings.get("time_unit"):
                    self.time_unit = unit
                    break

            for unit in PowerUnit:
                if unit.value == settings.get("power_unit"):
                    self.power_unit = unit
                    break

        except (FileNotFoundError, json.JSONDecodeError, KeyError, AttributeError):
            pass


# Fonction de commodité pour obtenir l'instance unique
def get_unit_manager() -> UnitManager:
    """Fonction de commodité pour obtenir l'instance unique du UnitManager"""
    return UnitManager.get_instance()
