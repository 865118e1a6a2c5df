"""
Task scheduler for experiment sweeps.

This module runs independent tasks (BER points, sweep values) on a thread
pool and hands back their results in submission order.
"""

import datetime
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence

import psutil

from chaoscomm.core.errors import ChaosCommError

logger = logging.getLogger("chaoscomm.scheduler")

THREADS_ENV = "CHAOSCOMM_THREADS"


def default_workers() -> int:
    """Worker cap from CHAOSCOMM_THREADS, else the physical core count."""
    value = os.environ.get(THREADS_ENV)
    if value:
        try:
            workers = int(value)
        except ValueError:
            logger.warning(f"Ignoring {THREADS_ENV}={value!r}: not an integer")
        else:
            if workers >= 1:
                return workers
            logger.warning(f"Ignoring {THREADS_ENV}={value!r}: must be >= 1")
    return psutil.cpu_count(logical=False) or 1


class Task:
    """A named unit of work."""

    def __init__(self,
                 name: str,
                 callback: Callable,
                 args: List[Any] = None,
                 kwargs: Dict[str, Any] = None):
        """Initialize a task.

        Args:
            name: The name of the task, used in log messages.
            callback: The function to call when the task is executed.
            args: Positional arguments to pass to the callback.
            kwargs: Keyword arguments to pass to the callback.
        """
        self.name = name
        self.callback = callback
        self.args = args or []
        self.kwargs = kwargs or {}
        self.started: Optional[datetime.datetime] = None
        self.finished: Optional[datetime.datetime] = None

    def execute(self) -> Any:
        """Execute the task and return the callback's result.

        Errors propagate to the caller after being logged.
        """
        self.started = datetime.datetime.now()
        logger.info(f"Executing task: {self.name}")
        try:
            result = self.callback(*self.args, **self.kwargs)
        except Exception as e:
            logger.error(f"Error executing task '{self.name}': {str(e)}")
            raise
        finally:
            self.finished = datetime.datetime.now()
        logger.debug(f"Task '{self.name}' finished in {self.elapsed:.3f} s")
        return result

    @property
    def elapsed(self) -> float:
        if self.started is None or self.finished is None:
            return 0.0
        return (self.finished - self.started).total_seconds()


class TaskScheduler:
    """Runs batches of independent tasks on a bounded thread pool."""

    def __init__(self, max_workers: Optional[int] = None):
        """Initialize the task scheduler.

        Args:
            max_workers: Thread cap; CHAOSCOMM_THREADS or the core count when None.
        """
        self.max_workers = max_workers if max_workers else default_workers()
        if self.max_workers < 1:
            raise ChaosCommError("max_workers must be >= 1")

    def run_all(self, tasks: Sequence[Task]) -> List[Any]:
        """Execute every task and return the results in task order.

        Raises:
            The first error (in task order) raised by any task.
        """
        tasks = list(tasks)
        if not tasks:
            return []
        workers = min(self.max_workers, len(tasks))
        logger.info(f"Running {len(tasks)} task(s) on {workers} worker(s)")
        if workers == 1:
            return [task.execute() for task in tasks]
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="chaoscomm") as pool:
            futures = [pool.submit(task.execute) for task in tasks]
            return [future.result() for future in futures]

    def map(self, name: str, callback: Callable, items: Sequence[Any],
            **kwargs) -> List[Any]:
        """Run ``callback(index, item, **kwargs)`` for every item."""
        tasks = [Task(f"{name}[{index}]", callback, [index, item], dict(kwargs))
                 for index, item in enumerate(items)]
        return self.run_all(tasks)
