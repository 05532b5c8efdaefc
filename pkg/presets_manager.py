"""
Sampling Presets Manager
Handles loading named sampler configurations from a JSON file
"""

import json
import logging
import os
from typing import Any, Dict, List

from errors import ConfigurationError
from sampler import SamplerConfig

logger = logging.getLogger(__name__)

DEFAULT_PRESETS_FILE = "presets.json"


class PresetsManager:
    def __init__(self, config_file: str = DEFAULT_PRESETS_FILE):
        self.config_file = config_file
        self.presets_data = self.load_presets()

    def load_presets(self) -> Dict[str, Any]:
        """Load presets from the JSON file, or the built-in defaults when it doesn't exist"""
        if not os.path.exists(self.config_file):
            logger.debug("presets file %s not found, using built-in presets", self.config_file)
            return self.get_default_presets()
        try:
            with open(self.config_file, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"cannot read presets file {self.config_file}: {e}") from None
        if not isinstance(data.get("presets"), dict):
            raise ConfigurationError(f"presets file {self.config_file} has no 'presets' object")
        return data

    def get_default_presets(self) -> Dict[str, Any]:
        """Return the built-in presets: the settings of the published evaluation runs"""
        return {
            "presets": {
                "lesmis-40": {"space": "graph", "log_base": 3, "threshold": 1},
                "lesmis-29": {"space": "graph", "log_base": 2, "threshold": 1},
                "lesmis-13": {"space": "graph", "log_base": 1.8, "threshold": 1},
                "dblp-57": {"space": "graph", "log_base": 2, "threshold": 1},
                "dblp-35": {"space": "graph", "log_base": 1.5, "threshold": 1},
                "dblp-12": {"space": "graph", "log_base": 1.3, "threshold": 1},
                "birch3-r50": {"space": "points", "log_base": 4, "threshold": 1, "radius": 50, "step": 100},
                "birch3-r100": {"space": "points", "log_base": 4, "threshold": 1, "radius": 100, "step": 100},
                "birch3-r200": {"space": "points", "log_base": 4, "threshold": 1, "radius": 200, "step": 100},
                "czech-r50": {"space": "points", "log_base": 1.3, "threshold": 1, "radius": 50, "step": 10},
                "czech-r100": {"space": "points", "log_base": 1.3, "threshold": 1, "radius": 100, "step": 10},
                "czech-r200": {"space": "points", "log_base": 1.3, "threshold": 1, "radius": 200, "step": 10},
            }
        }

    def get_all_presets(self) -> Dict[str, Dict[str, Any]]:
        return self.presets_data.get("presets", {})

    def get_preset_names(self) -> List[str]:
        return sorted(self.get_all_presets())

    def get_preset(self, name: str) -> Dict[str, Any]:
        """Raw preset entry, including its 'space'"""
        try:
            return dict(self.get_all_presets()[name])
        except KeyError:
            known = ", ".join(self.get_preset_names()) or "none"
            raise ConfigurationError(f"unknown preset {name!r} (known: {known})") from None

    def get_config(self, name: str, **overrides) -> SamplerConfig:
        """SamplerConfig for a preset; non-None overrides replace preset values"""
        preset = self.get_preset(name)
        values = {key: preset.get(key) for key in ("log_base", "threshold", "radius", "step")}
        values.update({key: value for key, value in overrides.items() if value is not None})
        if values.get("log_base") is None:
            raise ConfigurationError(f"preset {name!r} defines no log base")
        if values.get("threshold") is None:
            values["threshold"] = 1.0
        try:
            return SamplerConfig(**{key: (None if v is None else float(v)) for key, v in values.items()})
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"preset {name!r} is malformed: {e}") from None
