"""
Écriture des résultats
"""
