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
import asyncio
import logging
from concurrent.futures import ThreadPoolExecutor

from typing import (
    Any,
    Awaitable,
    Callable,
    List,
    Sequence,
    TypeVar,
)

from ..exceptions import ConfigError

T = TypeVar("T")


class JobRunner:
    """Runs independent per-file work on a bounded thread pool.

    Results always come back in input order, whatever order the jobs
    finish in.
    """

    def __init__(self, jobs: int = 1) -> None:
        if jobs < 1:
            raise ConfigError(f"jobs must be at least 1, got {jobs}")
        self.jobs = jobs
        self._logger = logging.getLogger("depthtcm.jobs")

    def submit(
        self, loop: asyncio.AbstractEventLoop, executor: ThreadPoolExecutor,
        fn: Callable[..., T], *args: Any
    ) -> Awaitable[T]:
        return loop.run_in_executor(executor, fn, *args)

    async def _run_all(self, fn: Callable[..., T], items: Sequence[Any]) -> List[T]:
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self.jobs) as executor:
            pending = [self.submit(loop, executor, fn, item) for item in items]
            return list(await asyncio.gather(*pending))

    def map(self, fn: Callable[..., T], items: Sequence[Any]) -> List[T]:
        items = list(items)
        if self.jobs == 1 or len(items) <= 1:
            return [fn(item) for item in items]
        self._logger.debug(f"Dispatching {len(items)} jobs on {self.jobs} workers")
        return asyncio.run(self._run_all(fn, items))


def run_jobs(fn: Callable[..., T], items: Sequence[Any], jobs: int = 1) -> List[T]:
    return JobRunner(jobs).map(fn, items)
