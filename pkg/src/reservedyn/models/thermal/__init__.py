"""
Modèle thermique hybride d'une charge thermostatique (TCL)
"""

from .device import DeviceParams, HysteresisBand, DeviceState, HEAT_RATE_MODES
from .thermal_converter import ThermalConverter

__all__ = ['DeviceParams', 'HysteresisBand', 'DeviceState', 'HEAT_RATE_MODES', 'ThermalConverter']
