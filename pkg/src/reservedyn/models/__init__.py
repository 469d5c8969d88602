"""
Modèles de données reservedyn
"""
