"""
Configuration de la journalisation pour la CLI et les scripts
"""

import logging
from typing import Optional

LOG_FORMAT = "%(asctime)s %(levelname)-8s %(name)s %(funcName)s() %(message)s"


def configure_logging(verbosity: int = 0, log_file: Optional[str] = None) -> logging.Logger:
    """
    Configure le logger racine du paquet.

    Args:
        verbosity: 0 = WARNING, 1 = INFO, 2 et plus = DEBUG
        log_file: fichier de journal optionnel (niveau DEBUG)
    """
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)

    logger = logging.getLogger("reservedyn")
    logger.setLevel(logging.DEBUG)
    #on repart d'une configuration propre si la CLI est appelée plusieurs fois (tests)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(LOG_FORMAT)

    stream_handler = logging.StreamHandler()
    stream_handler.setLevel(level)
    stream_handler.setFormatter(formatter)
    logger.addHandler(stream_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    logger.propagate = False
    return logger
