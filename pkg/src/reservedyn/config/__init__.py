"""
Configuration : scénarios JSON et fichiers fournis avec le paquet
"""
