"""Engine configuration: resource paths, mapping thresholds, session limits.

Configuration is a flat key=value text file; every key can be overridden by
an environment variable named after the key, upper-cased with dots replaced
by underscores (mapping.threshold -> MAPPING_THRESHOLD). Unset keys fall back
to the packaged defaults, including the fixture lexicon, grammars, ontology,
templates and evaluation corpus under vnqa/data/.
"""

from __future__ import annotations

import os
from importlib import resources


def default_resource(name: str):
    """Filesystem path of a packaged data file."""
    return resources.files("vnqa").joinpath("data").joinpath(name)


DEFAULTS = {
    "paths.lexicon": None,
    "paths.phrases": None,
    "paths.noun_phrase_rules": None,
    "paths.relation_rules": None,
    "paths.ontology": None,
    "paths.templates": None,
    "mapping.threshold": "0.75",
    "mapping.margin": "0.05",
    "mapping.max_options": "5",
    "mapping.suspension_ttl": "600",
    "analysis.term1_defaults": "Who:person",
    "analysis.term2_defaults": "What:which,Where:quê",
    "session.ttl": "600",
    "session.capacity": "1024",
    "ui.dist": "",
}

_RESOURCE_DEFAULTS = {
    "paths.lexicon": "lexicon.tsv",
    "paths.phrases": "question_phrases.tsv",
    "paths.noun_phrase_rules": "noun_phrases.rules",
    "paths.relation_rules": "relations.rules",
    "paths.ontology": "ontology.json",
    "paths.templates": "templates.txt",
}


class ConfigError(ValueError):
    pass


class Config:
    def __init__(self, values=None):
        self._values = dict(values or {})

    def get(self, key: str) -> str:
        env = key.upper().replace(".", "_")
        if env in os.environ:
            return os.environ[env]
        if key in self._values:
            return self._values[key]
        if key in _RESOURCE_DEFAULTS:
            return str(default_resource(_RESOURCE_DEFAULTS[key]))
        if key in DEFAULTS and DEFAULTS[key] is not None:
            return DEFAULTS[key]
        raise ConfigError(f"unknown configuration key {key!r}")

    def get_float(self, key: str) -> float:
        return float(self.get(key))

    def get_int(self, key: str) -> int:
        return int(self.get(key))

    def get_pairs(self, key: str) -> dict:
        """Parse 'A:x,B:y' values into {'A': 'x', 'B': 'y'}."""
        out = {}
        raw = self.get(key).strip()
        if not raw:
            return out
        for item in raw.split(","):
            name, sep, value = item.partition(":")
            if not sep:
                raise ConfigError(f"bad pair {item!r} in {key}")
            out[name.strip()] = value.strip()
        return out


def load_config(path=None) -> Config:
    """Read a key=value file ('#' comments, blank lines allowed)."""
    values = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                values[key.strip()] = value.strip()
    return Config(values)
