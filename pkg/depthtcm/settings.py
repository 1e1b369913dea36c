# -*- coding: utf-8 -*-
from __future__ import annotations
import copy
import logging
import pathlib

from typing import (
    Any,
    Dict,
    Iterable,
    List,
    Optional,
    Union,
)

from .exceptions import ConfigError

Path = Union[List[str], str]

TRUE_VALUES = ("1", "true", "yes", "on")
FALSE_VALUES = ("0", "false", "no", "off")


def _split(path: Path) -> List[str]:
    if isinstance(path, str):
        return path.split(".")
    return list(path)


class Settings:
    """Nested key/value settings addressed by key paths.

    Values come from the defaults, then an optional ``key=value`` file, then
    explicit overrides (usually command line flags).
    """

    def __init__(self, defaults: Dict[str, Any]) -> None:
        self._logger = logging.getLogger("depthtcm.settings")
        self._defaults = copy.deepcopy(defaults)
        self._data = copy.deepcopy(defaults)

    def _node(self, keys: List[str]) -> Dict[str, Any]:
        node = self._data
        for key in keys[:-1]:
            child = node.get(key)
            if not isinstance(child, dict):
                raise ConfigError(f"Unknown setting: {'.'.join(keys)}")
            node = child
        if keys[-1] not in node:
            raise ConfigError(f"Unknown setting: {'.'.join(keys)}")
        return node

    def get(self, path: Path) -> Any:
        keys = _split(path)
        return self._node(keys)[keys[-1]]

    def get_int(self, path: Path) -> int:
        value = self.get(path)
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigError(f"Setting {path} is not an integer: {value!r}")

    def get_float(self, path: Path) -> float:
        value = self.get(path)
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"Setting {path} is not a number: {value!r}")

    def get_boolean(self, path: Path) -> bool:
        value = self.get(path)
        if isinstance(value, bool):
            return value
        if str(value).lower() in TRUE_VALUES:
            return True
        if str(value).lower() in FALSE_VALUES:
            return False
        raise ConfigError(f"Setting {path} is not a boolean: {value!r}")

    def set(self, path: Path, value: Any) -> None:
        keys = _split(path)
        node = self._node(keys)
        default = node[keys[-1]]
        if isinstance(default, dict):
            raise ConfigError(f"Cannot overwrite setting group {'.'.join(keys)}")
        node[keys[-1]] = self._coerce(keys, default, value)

    def _coerce(self, keys: List[str], default: Any, value: Any) -> Any:
        if default is None or value is None:
            return value
        name = ".".join(keys)
        try:
            if isinstance(default, bool):
                if isinstance(value, bool):
                    return value
                text = str(value).strip().lower()
                if text in TRUE_VALUES:
                    return True
                if text in FALSE_VALUES:
                    return False
                raise ValueError(text)
            if isinstance(default, int):
                return int(value)
            if isinstance(default, float):
                return float(value)
            if isinstance(default, str):
                return str(value)
        except ValueError:
            raise ConfigError(f"Invalid value for {name}: {value!r}")
        return value

    def update(self, overrides: Dict[str, Any]) -> None:
        for key, value in overrides.items():
            if value is None:
                continue
            self.set(key, value)

    def load_file(self, fpath: Union[str, pathlib.Path]) -> None:
        path = pathlib.Path(fpath)
        try:
            lines = path.read_text(encoding="utf-8").splitlines()
        except OSError as e:
            raise ConfigError(f"Unable to read config file {path}: {e}") from e
        for lineno, line in enumerate(lines, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            self.set(key, value)
        self._logger.debug(f"Loaded settings from {path}")

    def as_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self._data)

    def flatten(self) -> Dict[str, Any]:
        flat: Dict[str, Any] = {}

        def _walk(prefix: str, node: Dict[str, Any]) -> None:
            for key, val in node.items():
                name = f"{prefix}.{key}" if prefix else key
                if isinstance(val, dict):
                    _walk(name, val)
                else:
                    flat[name] = val
        _walk("", self._data)
        return flat

    def dump(self, keys: Optional[Iterable[str]] = None) -> str:
        flat = self.flatten()
        names = sorted(flat) if keys is None else list(keys)
        return "\n".join(f"{name}={flat[name]}" for name in names)
