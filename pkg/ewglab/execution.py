"""Module that runs scenario jobs and handles their errors."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Generic, List, Optional, Sequence, Tuple, TypeVar

_log = logging.getLogger(__name__)

T = TypeVar('T')


@dataclass(frozen=True)
class JobOutcome(Generic[T]):
    """Result of one job. Exactly one of ``result`` and ``error`` is set."""
    key: str
    result: Optional[T] = None
    error: Optional[BaseException] = None

    @property
    def ok(self) -> bool:
        return self.error is None


class JobManager:
    """Runs independent jobs on a thread pool and returns their outcomes in
    submission order, whatever the order of completion. This should not be
    instantiated directly, it is created by the Harness and managed through it."""

    def __init__(self, max_workers: int = 4) -> None:
        self.max_workers: int = max_workers
        _log.info(f'Created JobManager with {max_workers} workers')

    @property
    def max_workers(self) -> int:
        return self._max_workers

    @max_workers.setter
    def max_workers(self, value: int) -> None:
        if value < 1:
            raise ValueError('max_workers must be a positive integer')
        self._max_workers = int(value)

    def _call(self, key: str, job: Callable[[], T]) -> JobOutcome[T]:
        try:
            result = job()
        except Exception as e:
            _log.error(f'job "{key}" raised {type(e).__name__}: {e}')
            return JobOutcome(key, error=e)
        return JobOutcome(key, result=result)

    def run(self, jobs: Sequence[Tuple[str, Callable[[], T]]]) -> List[JobOutcome[T]]:
        """Executes every job. Exceptions are caught and reported in the outcome,
        they never stop the other jobs.

        Args:
            jobs: (key, callable) pairs

        Returns:
            one outcome per job, in the order of ``jobs``
        """
        if self._max_workers == 1 or len(jobs) <= 1:
            return [self._call(key, job) for key, job in jobs]
        with ThreadPoolExecutor(max_workers=self._max_workers) as pool:
            futures = [pool.submit(self._call, key, job) for key, job in jobs]
            return [f.result() for f in futures]
