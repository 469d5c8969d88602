# =============================================================================
# src/reservedyn/file_io/output_manager.py
# =============================================================================
"""
Écriture des résultats (CSV, JSON) et du manifeste d'exécution
"""

import hashlib
import json
import logging
import platform
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from .. import __version__

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"


def convert_to_serializable(obj):
    """
    Convertit récursivement un objet en types sérialisables JSON
    """

    if isinstance(obj, dict):
        return {str(k): convert_to_serializable(v) for k, v in obj.items()}

    elif isinstance(obj, (list, tuple)):
        return [convert_to_serializable(item) for item in obj]

    elif isinstance(obj, np.integer):
        return int(obj)

    elif isinstance(obj, np.floating):
        return float(obj)

    elif isinstance(obj, np.bool_):
        return bool(obj)

    elif isinstance(obj, np.ndarray):
        return obj.tolist()

    elif isinstance(obj, pd.DataFrame):
        return obj.to_dict(orient="list")

    elif isinstance(obj, Path):
        return str(obj)

    elif isinstance(obj, (str, int, float, bool, type(None))):
        return obj

    else:
        # Convertir tout le reste en string
        return str(obj)


def file_checksum(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """Empreinte d'une exécution : configuration, graines, version, durées et fichiers produits"""
    command: str
    config_hash: str
    seeds: Dict[str, int] = field(default_factory=dict)
    version: str = __version__
    timings: Dict[str, float] = field(default_factory=dict)
    outputs: List[Dict[str, str]] = field(default_factory=list)

    def add_output(self, path: Path):
        self.outputs.append({"file": path.name, "sha256": file_checksum(path)})

    def to_dict(self) -> Dict[str, Any]:
        return convert_to_serializable({
            "command": self.command,
            "config_hash": self.config_hash,
            "seeds": self.seeds,
            "version": self.version,
            "python": platform.python_version(),
            "timings_s": self.timings,
            "outputs": self.outputs,
        })


class OutputManager:
    """Écrit les tableaux d'une exécution dans un dossier et tient le manifeste à jour"""

    def __init__(self, out_dir: Union[str, Path], manifest: RunManifest):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.manifest = manifest

    def write_csv(self, frame: pd.DataFrame, name: str) -> Path:
        path = self.out_dir / (name if name.endswith(".csv") else f"{name}.csv")
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        self.manifest.add_output(path)
        logger.info(f"Écrit : {path}")
        return path

    def write_frames(self, frames: Dict[str, pd.DataFrame], prefix: str = ""):
        for name, frame in frames.items():
            self.write_csv(frame, f"{prefix}{name}")

    def finalize(self, timings: Optional[Dict[str, float]] = None) -> Path:
        """Écrit manifest.json (non listé dans ses propres sorties)"""
        if timings:
            self.manifest.timings.update(timings)
        path = self.out_dir / "manifest.json"
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.manifest.to_dict(), f, indent=2, ensure_ascii=False)
        logger.info(f"✅ Manifeste écrit : {path}")
        return path
