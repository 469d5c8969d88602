"""
reservedyn : réserve opérationnelle fournie par des charges thermostatiques (TCL)
et évaluation de la fiabilité court terme d'un réseau électrique.
"""

__version__ = "0.3.0"
