from __future__ import annotations

import threading

import pytest

from reactorkit.reactor import EventLoop
from reactorkit.tasks import TaskExecutor


def call_on_loop(loop: EventLoop, fn, timeout: float = 10.0):
    """Run fn() on the loop thread and return its result (or re-raise)."""
    box: dict = {}
    done = threading.Event()

    def run():
        try:
            box["value"] = fn()
        except BaseException as exc:  # re-raised on the caller's thread below
            box["error"] = exc
        finally:
            done.set()

    loop.post(run)
    assert done.wait(timeout), "loop did not run the posted call in time"
    if "error" in box:
        raise box["error"]
    return box["value"]


@pytest.fixture
def loop():
    loop = EventLoop()
    loop.start_thread(name="test-loop")
    yield loop
    loop.shutdown()


@pytest.fixture
def loop_call(loop):
    return lambda fn, timeout=10.0: call_on_loop(loop, fn, timeout)


@pytest.fixture
def make_executor():
    executors: list[TaskExecutor] = []

    def factory(workers: int = 1) -> TaskExecutor:
        executor = TaskExecutor(workers)
        executors.append(executor)
        return executor

    yield factory
    for executor in executors:
        executor.shutdown(wait=False)
