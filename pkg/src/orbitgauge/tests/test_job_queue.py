import threading
import time

import pytest

from ..error_handlers import DegenerateInput
from ..services.job_queue import Job, JobQueue, JobStatus, job_queue


def test_job_queue_singleton():
    assert JobQueue() is job_queue


def test_job_records_result_and_failure():
    ok = Job(0, 4, lambda x: x * x)
    ok.run()
    assert ok.status is JobStatus.COMPLETED and ok.result == 16 and ok.done.is_set()

    def explode(_):
        raise ValueError("Test error")

    bad = Job(1, None, explode)
    bad.run()
    assert bad.status is JobStatus.FAILED
    assert str(bad.exception) == "Test error"


def test_submit_needs_running_pool():
    job_queue.stop()
    with pytest.raises(RuntimeError):
        job_queue.submit(Job(0, 1, abs))


def test_map_inline():
    """A single worker runs items inline, in order."""
    assert job_queue.map(lambda x: x * x, [3, 1, 2], num_workers=1) == [9, 1, 4]
    assert not job_queue.running
    assert job_queue.last_sweep.workers == 1


def test_map_keeps_submission_order():
    """Results come back in item order whatever the completion order."""
    def slow_identity(x):
        time.sleep(0.01 * (5 - x))
        return x

    assert job_queue.map(slow_identity, range(5), num_workers=3, name='order') == [0, 1, 2, 3, 4]
    assert job_queue.num_workers == 3
    summary = job_queue.last_sweep
    assert (summary.name, summary.size, summary.workers, summary.failures) == ('order', 5, 3, 0)


def test_map_reraises_first_failure():
    """The first failing item, in submission order, is re-raised unchanged."""
    def picky(x):
        if x >= 2:
            raise DegenerateInput(f"bad {x}")
        return x

    with pytest.raises(DegenerateInput, match="bad 2"):
        job_queue.map(picky, [0, 1, 2, 3], num_workers=2)
    assert job_queue.last_sweep.failures == 2


def test_map_restarts_at_new_width():
    """Changing the width restarts the pool and leaves no stale sentinels."""
    job_queue.map(lambda x: x, range(4), num_workers=2)
    assert job_queue.map(lambda x: x + 1, range(4), num_workers=4) == [1, 2, 3, 4]
    assert job_queue.num_workers == 4


def test_map_runs_concurrently():
    """Two items that wait on each other only finish with two workers."""
    barrier = threading.Barrier(2, timeout=5)

    def meet(x):
        barrier.wait()
        return x

    assert job_queue.map(meet, [1, 2], num_workers=2) == [1, 2]


def test_concurrent_sweeps_run_one_after_another():
    """A sweep asking for another width waits until the running sweep has finished."""
    first_running = threading.Event()
    release = threading.Event()
    widths = []
    results = {}

    def hold(x):
        first_running.set()
        release.wait(5)
        widths.append(job_queue.num_workers)
        return x

    def sweep(key, func, items, width):
        results[key] = job_queue.map(func, items, num_workers=width, name=key)

    first = threading.Thread(target=sweep, args=('first', hold, [1, 2], 2))
    first.start()
    assert first_running.wait(5)
    second = threading.Thread(target=sweep, args=('second', lambda x: -x, [1, 2, 3], 3))
    second.start()
    time.sleep(0.05)
    assert 'second' not in results
    release.set()
    first.join(5)
    second.join(5)

    assert results == {'first': [1, 2], 'second': [-1, -2, -3]}
    assert widths == [2, 2]
    assert job_queue.num_workers == 3


def test_sweep_inside_a_sweep_runs_inline():
    def inner(x):
        return job_queue.map(lambda y: x * y, [1, 2, 3], num_workers=3)

    assert job_queue.map(inner, [1, 2], num_workers=2) == [[1, 2, 3], [2, 4, 6]]
    assert job_queue.num_workers == 2
