"""
Construction des objets métier depuis les fichiers et interface en ligne de commande
"""
