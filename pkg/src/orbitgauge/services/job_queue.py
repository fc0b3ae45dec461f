"""
Worker pool for parallel parameter sweeps.

A sweep submits one job per grid point and collects them by index, so the
assembled output never depends on the number of workers.
"""
import logging
import queue
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable, List, Optional

logger = logging.getLogger(__name__)


class JobStatus(Enum):
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class Job:
    """One grid point of a sweep."""
    index: int
    item: Any
    func: Callable[[Any], Any]
    status: JobStatus = JobStatus.PENDING
    result: Any = None
    exception: Optional[BaseException] = None
    seconds: float = 0.0
    done: threading.Event = field(default_factory=threading.Event, repr=False)

    def run(self):
        self.status = JobStatus.RUNNING
        started = time.perf_counter()
        try:
            self.result = self.func(self.item)
            self.status = JobStatus.COMPLETED
        except Exception as e:
            self.exception = e
            self.status = JobStatus.FAILED
            logger.debug(f"Sweep item {self.index} failed: {str(e)}")
        finally:
            self.seconds = time.perf_counter() - started
            self.done.set()


@dataclass(frozen=True)
class SweepSummary:
    name: str
    size: int
    workers: int
    failures: int
    seconds: float


class JobQueue:
    """Thread pool shared by every sweep in the process."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(JobQueue, cls).__new__(cls)
            cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        if self._initialized:
            return

        self._queue = queue.Queue()
        self._workers = []
        self._lock = threading.RLock()
        # Held for a whole parallel sweep so no other sweep can resize the pool under it
        self._sweep_lock = threading.Lock()
        self._running = False
        self.last_sweep: Optional[SweepSummary] = None
        self._initialized = True

    @property
    def running(self) -> bool:
        return self._running

    @property
    def num_workers(self) -> int:
        return len(self._workers)

    def start(self, num_workers: int = 2):
        with self._lock:
            if self._running:
                return
            self._running = True
            self._workers = [threading.Thread(target=self._work, name=f"sweep-worker-{i}", daemon=True)
                             for i in range(num_workers)]
            for worker in self._workers:
                worker.start()
            logger.debug(f"Started sweep pool with {num_workers} workers")

    def stop(self):
        """Stop the workers and wait for them to exit."""
        with self._lock:
            if not self._running:
                return
            self._running = False
            for _ in self._workers:
                self._queue.put(None)
            for worker in self._workers:
                worker.join()
            self._workers = []
            # drop sentinels left by workers that exited first
            self._queue = queue.Queue()
            logger.debug("Stopped sweep pool")

    def submit(self, job: Job) -> Job:
        if not self._running:
            raise RuntimeError("Sweep pool is not running")
        self._queue.put(job)
        return job

    def map(self, func: Callable[[Any], Any], items: Iterable[Any], num_workers: int = 1,
            name: str = 'sweep') -> List[Any]:
        """Apply func to every item and return the results in item order.

        With num_workers <= 1 the items run inline, as do sweeps started from a
        pool worker. Otherwise the pool is (re)started at the requested width,
        every job is awaited, and the first failure in item order is re-raised.
        Parallel sweeps from different threads run one after another.
        """
        jobs = [Job(index, item, func) for index, item in enumerate(items)]
        started = time.perf_counter()
        width = 1 if num_workers <= 1 or len(jobs) <= 1 or self._in_worker() else num_workers

        if width == 1:
            for job in jobs:
                job.run()
        else:
            with self._sweep_lock:
                with self._lock:
                    if self._running and self.num_workers != width:
                        self.stop()
                    self.start(width)
                    for job in jobs:
                        self.submit(job)
                for job in jobs:
                    job.done.wait()

        failed = [job for job in jobs if job.status is JobStatus.FAILED]
        self.last_sweep = SweepSummary(name, len(jobs), width, len(failed), time.perf_counter() - started)
        logger.info(f"{name}: {len(jobs)} items on {width} workers in {self.last_sweep.seconds:.2f}s")
        if failed:
            raise failed[0].exception
        return [job.result for job in jobs]

    def _in_worker(self) -> bool:
        return threading.current_thread() in self._workers

    def _work(self):
        while True:
            job = self._queue.get()
            if job is None:
                break
            job.run()


job_queue = JobQueue()
