"""
Outils transverses : unités, exceptions, journalisation
"""
