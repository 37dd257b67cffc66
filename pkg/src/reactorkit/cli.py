"""Command-line entry points for the gateway service, demo apps, and the lab.

Exit codes: 0 on success, 1 when a scripted assertion fails, 2 on bad usage.
"""

from __future__ import annotations

import argparse
import sys
import threading
from pathlib import Path

from .config import load_config
from .gateway import serve as serve_gateway
from .lab import StepProgram, enumerate_interleavings, race_histogram
from .prime import NEUTRAL, PrimeChecker, RunMode
from .reactor import EventLoop
from .tasks import TaskExecutor
from .testkit import CounterScenarioEnv, ScenarioScript, TimerScenarioEnv, run_scenario


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reactorkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the gateway service")
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--config", type=Path, default=None)
    p_serve.add_argument("--static", type=Path, default=None,
                         help="directory with the web UI bundle")
    p_serve.add_argument("--stdio", action="store_true",
                         help="speak the protocol over stdin/stdout instead")

    p_counter = sub.add_parser("counter", help="replay a counter scenario script")
    p_counter.add_argument("--script", type=Path, required=True)

    p_timer = sub.add_parser("timer", help="replay a timer scenario script")
    p_timer.add_argument("--script", type=Path, required=True)
    p_timer.add_argument("--real-time", action="store_true",
                         help="use a real clock and sleeps (tolerance of one tick)")

    p_prime = sub.add_parser("prime", help="check one number for primality")
    p_prime.add_argument("--n", type=int, required=True)
    p_prime.add_argument("--mode", choices=[m.value for m in RunMode],
                         default="async")
    p_prime.add_argument("--cancel-after", type=int, default=None, metavar="MS")

    p_lab = sub.add_parser("lab", help="thread-safety demonstrations")
    lab_sub = p_lab.add_subparsers(dest="lab_command", required=True)
    p_race = lab_sub.add_parser("race", help="unsafe-increment delta histogram")
    p_race.add_argument("--threads", type=int, default=2)
    p_race.add_argument("--trials", type=int, default=1000)
    lab_sub.add_parser("enumerate", help="all interleavings of two increments")

    return parser


def _cmd_serve(args) -> int:
    config = load_config(args.config)
    if args.port is not None:
        from .config import RuntimeConfig
        config = RuntimeConfig(port=args.port, counter=config.counter,
                               timer=config.timer, prime=config.prime)
    if args.stdio:
        from .gateway import run_stdio
        return run_stdio(config)
    static = args.static
    if static is None:
        candidate = Path("frontend") / "dist"
        static = candidate if candidate.is_dir() else None
    serve_gateway(config, static_root=static)
    return 0


def _run_script(env, script_path: Path, tolerance: int) -> int:
    script = ScenarioScript.parse(script_path.read_text())
    try:
        result = run_scenario(script, env, tolerance=tolerance)
    finally:
        env.close()
    for line in result.trace:
        print(line)
    if not result.ok:
        print(f"FAILED: {result.failure}", file=sys.stderr)
        return 1
    return 0


def _cmd_counter(args) -> int:
    return _run_script(CounterScenarioEnv(), args.script, tolerance=0)


def _cmd_timer(args) -> int:
    env = TimerScenarioEnv(real_time=args.real_time)
    return _run_script(env, args.script, tolerance=1 if args.real_time else 0)


def _cmd_prime(args) -> int:
    loop = EventLoop()
    loop.start_thread(name="prime-cli-loop")
    executor = TaskExecutor.pool()
    checker = PrimeChecker(loop, executor, slots=1)
    started = threading.Event()
    holder: dict = {}

    def start():
        holder["handle"] = checker.check(args.n, RunMode(args.mode))
        started.set()

    loop.post(start)
    if args.cancel_after is not None:
        timer = threading.Timer(args.cancel_after / 1000.0,
                                lambda: loop.post(checker.cancel_all))
        timer.daemon = True
        timer.start()
    started.wait()
    handle = holder["handle"]
    handle.join()

    slot_view: dict = {}

    def read_slot():
        slot_view.update(checker.view()[0])
        started.set()

    started.clear()
    loop.post(read_slot)
    started.wait()
    loop.shutdown()
    executor.shutdown(wait=False)
    status = slot_view.get("status", NEUTRAL)
    outcome = status if status != NEUTRAL else "cancelled"
    print(f"{args.n}: {outcome} (progress {slot_view.get('percent', 0)}%)")
    return 0


def _cmd_lab(args) -> int:
    if args.lab_command == "race":
        histogram = race_histogram(args.threads, args.trials)
        print(f"unsafe increment, {args.threads} threads x {args.trials} trials:")
        for delta, count in histogram.items():
            print(f"  delta {delta}: {count}")
        return 0
    results = enumerate_interleavings(StepProgram.increment(1), StepProgram.increment(2))
    for r in results:
        print(f"  {' '.join(r.schedule)}  ->  +{r.final_delta}")
    lost = sum(1 for r in results if r.final_delta < 2)
    print(f"{len(results)} schedules, {len(results) - lost} correct (+2), {lost} lose an update")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "serve":
        return _cmd_serve(args)
    if args.command == "counter":
        return _cmd_counter(args)
    if args.command == "timer":
        return _cmd_timer(args)
    if args.command == "prime":
        return _cmd_prime(args)
    if args.command == "lab":
        return _cmd_lab(args)
    return 2


if __name__ == "__main__":
    sys.exit(main())
