# -*- coding: utf-8 -*-
#
# depthtcm
# Copyright (C) 2025  depthtcm contributors
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU Affero General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Affero General Public License for more details.
#
# You should have received a copy of the GNU Affero General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.
#
from __future__ import annotations
import errno
import logging
import logging.handlers
import pathlib
import queue

import sentry_sdk

from typing import (
    Any,
    Callable,
    Dict,
    List,
    Optional,
    Sequence,
    TypeVar,
)

from .exceptions import (
    BadMagic,
    ConfigError,
    DepthTcmError,
    IoError,
    UnsupportedFormat,
    UnsupportedVersion,
)
from .settings import Settings

__version__ = "0.1.0"

T = TypeVar("T")

IGNORED_EXCEPTIONS = [
    # KeyboardInterrupts
    KeyboardInterrupt,
    # IOErrors of any kind due to a full file system
    (
        IOError,
        lambda exc, logger: getattr(exc, "errno", None) in (errno.ENOSPC,),
    ),
    # Bad user input, nothing to fix on our side
    BadMagic,
    UnsupportedVersion,
    UnsupportedFormat,
    IoError,
    ConfigError,
]


def _before_send(event: Dict[str, Any], hint: Dict[str, Any]) -> Optional[Dict[str, Any]]:
    if "exc_info" not in hint:
        # we only want exceptions
        return None
    logger = event.get("logger", "") or ""
    exc = hint["exc_info"][1]
    for ignore in IGNORED_EXCEPTIONS:
        if isinstance(ignore, tuple):
            ignored_exc, matcher = ignore
        else:
            ignored_exc, matcher = ignore, lambda *args: True
        if isinstance(exc, ignored_exc) and matcher(exc, logger):
            return None
    if logger.startswith("depthtcm"):
        return event
    return None


class DepthTcm:
    """Application object shared by the command line entry points."""

    def __init__(self, settings: Optional[Settings] = None) -> None:
        self._logger = logging.getLogger("depthtcm")
        self._settings = settings or Settings(self.get_settings_defaults())
        self._log_listener: Optional[logging.handlers.QueueListener] = None
        self._log_handler: Optional[logging.Handler] = None

    @property
    def settings(self) -> Settings:
        return self._settings

    @staticmethod
    def get_settings_defaults() -> Dict[str, Any]:
        return {
            "codec": {
                "name": "baseline",
                "bits": 4,
                "period": 8.0,
                "adaptive": False,
                "patch_size": 16,
                "bit_lo": 2,
                "bit_hi": 6,
                "checkpoint": "",
            },
            "ingest": {
                "format": "auto",
                "mask_sentinel": 0,
                "depth_scale": 0.001,
            },
            "train": {
                "lambda": 0.05,
                "learning_rate": 1e-4,
                "batch_size": 4,
                "steps": 200,
                "tau": 0.05,
                "w_tv": 0.001,
                "w_img": 1.0,
                "seed": 0,
                "backbone": "tcm",
                "log_every": 20,
            },
            "synthetic": {
                "count": 8,
                "height": 128,
                "width": 128,
                "seed": 0,
                "valid_fraction": 1.0,
                "near": 500.0,
                "far": 4000.0,
            },
            "sweep": {
                "timing": True,
                "original_bpp": 16,
            },
            "jobs": 1,
            "debug_logging": False,
            "log_file": "",
            "sentry_dsn": "",
        }

    def start(self) -> None:
        if self._settings.get_boolean(["debug_logging"]):
            self._logger.setLevel(logging.DEBUG)
        log_file = self._settings.get(["log_file"])
        if log_file:
            self._setup_logging(pathlib.Path(log_file))
        self._initialize_sentry()

    def _setup_logging(self, log_path: pathlib.Path) -> None:
        log_path.parent.mkdir(parents=True, exist_ok=True)
        log_queue: queue.Queue = queue.Queue()
        self._log_handler = logging.handlers.QueueHandler(log_queue)
        self._logger.addHandler(self._log_handler)
        file_hdlr = logging.handlers.TimedRotatingFileHandler(
            log_path, when='midnight', backupCount=2)
        formatter = logging.Formatter(
            '%(asctime)s [%(funcName)s()] - %(message)s')
        file_hdlr.setFormatter(formatter)
        self._log_listener = logging.handlers.QueueListener(log_queue, file_hdlr)
        self._log_listener.start()
        self._logger.debug(f"Logging to {log_path}")

    def _initialize_sentry(self) -> None:
        dsn = self._settings.get(["sentry_dsn"])
        if not dsn:
            return
        self._logger.debug("Initializing Sentry")
        sentry_sdk.init(
            dsn=dsn,
            traces_sample_rate=0.01,
            before_send=_before_send,
            release=f"depthtcm@{__version__}",
        )

    def run_jobs(self, fn: Callable[..., T], items: Sequence[Any]) -> List[T]:
        from .pipeline.jobs import run_jobs
        return run_jobs(fn, items, self._settings.get_int(["jobs"]))

    def shutdown(self) -> None:
        if self._log_listener is not None:
            self._log_listener.stop()
            self._log_listener = None
        if self._log_handler is not None:
            self._logger.removeHandler(self._log_handler)
            self._log_handler = None


__all__ = [
    "DepthTcm",
    "DepthTcmError",
    "Settings",
    "__version__",
]
