#!/usr/bin/env python3
"""Compare the three prime-check execution modes under a mid-run cancel.

For each mode, starts a check of a large prime, injects a cancel shortly
after, and reports how long the cancel took to bite and what the slot ended
up showing. Foreground is expected to ignore the cancel entirely; the other
two should react within a few milliseconds.
"""

import argparse
import threading
import time

from reactorkit.prime import PrimeChecker, RunMode
from reactorkit.reactor import EventLoop
from reactorkit.tasks import TaskExecutor, TaskState


def run_mode(n: int, mode: RunMode, cancel_after_ms: int):
    loop = EventLoop()
    loop.start_thread()
    executor = TaskExecutor.pool(2)
    checker = PrimeChecker(loop, executor, slots=1)
    box = {}
    staged = threading.Event()

    def stage():
        box["t0"] = time.perf_counter()
        box["handle"] = checker.check(n, mode)
        staged.set()

    def cancel():
        box["cancel_at"] = time.perf_counter()
        checker.cancel_all()

    loop.post(stage)
    staged.wait()
    handle = box["handle"]
    if mode is not RunMode.FOREGROUND:
        deadline = time.monotonic() + 10
        while handle.state is TaskState.PENDING and time.monotonic() < deadline:
            time.sleep(0.001)
        time.sleep(cancel_after_ms / 1000)
    loop.post(cancel)
    handle.join()
    total = time.perf_counter() - box["t0"]

    done = threading.Event()
    view = {}

    def read():
        view.update(checker.view()[0])
        done.set()

    loop.post(read)
    done.wait()
    loop.shutdown()
    executor.shutdown(wait=False)

    reaction = time.perf_counter() - box.get("cancel_at", time.perf_counter())
    print(f"  {mode.value:>10}: finished in {total:6.2f}s, "
          f"cancel->settled {reaction * 1000:7.1f}ms, "
          f"slot shows {view.get('status')!r} at {view.get('percent')}%")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=100_000_007)
    parser.add_argument("--cancel-after", type=int, default=100, metavar="MS")
    args = parser.parse_args()

    print(f"checking n={args.n} with a cancel ~{args.cancel_after}ms in:")
    for mode in (RunMode.FOREGROUND, RunMode.CHUNKED, RunMode.ASYNC):
        run_mode(args.n, mode, args.cancel_after)


if __name__ == "__main__":
    main()
