"""Gateway service: one runtime, three apps, a JSON wire protocol, two transports.

Inbound messages are {"app", "event", "args"}; every one is turned into an
event on the runtime's single loop thread (socket readers never touch app
state). Outbound messages are {"app", "type": view|error|info, "body", "seq"}
with seq strictly increasing per connection. View messages are whole
snapshots, so a slow consumer may have intermediate ones coalesced
(latest-wins per app); the stdio transport disables coalescing because its
byte-exact traces double as protocol regression fixtures.
"""

from __future__ import annotations

import itertools
import json
import logging
import threading
from collections import deque
from pathlib import Path
from typing import Optional, TextIO

from .clocks import ThreadedClock
from .config import RuntimeConfig
from .counter import COUNTER_EVENTS, BoundedCounter, CounterAdapter, project_view
from .prime import NoFreeSlot, PrimeChecker, RunMode
from .reactor import EnqueueOnClosed, Event, EventLoop
from .tasks import TaskExecutor
from .timer import (
    ClockToMachine,
    PostedUIListener,
    TimeModel,
    TimerStateMachine,
    TimerView,
)

log = logging.getLogger(__name__)

APP_COUNTER = "counter"
APP_TIMER = "timer"
APP_PRIME = "prime"
APP_GATEWAY = "gateway"
APPS = (APP_COUNTER, APP_TIMER, APP_PRIME)

VIEW = "view"
ERROR = "error"
INFO = "info"


class BindFailure(RuntimeError):
    """The configured port could not be bound."""


def canonical(message: dict) -> str:
    return json.dumps(message, sort_keys=True, separators=(",", ":"))


class OutboundQueue:
    """Per-connection outbound FIFO; seq is assigned as messages are taken."""

    def __init__(self, coalesce: bool):
        self._cond = threading.Condition()
        self._entries: deque[tuple[str, str, dict]] = deque()
        self._closed = False
        self._seq = itertools.count(1)
        self._coalesce = coalesce

    def put(self, kind: str, app: str, body: dict) -> None:
        with self._cond:
            if self._closed:
                return
            if self._coalesce and kind == VIEW:
                self._entries = deque(
                    e for e in self._entries if not (e[0] == VIEW and e[1] == app))
            self._entries.append((kind, app, body))
            self._cond.notify()

    def pop(self, timeout: Optional[float] = None) -> Optional[dict]:
        """Next message, blocking; None once closed and fully drained."""
        with self._cond:
            while not self._entries and not self._closed:
                if not self._cond.wait(timeout):
                    raise TimeoutError("no outbound message")
            if not self._entries:
                return None
            kind, app, body = self._entries.popleft()
            return {"app": app, "type": kind, "body": body, "seq": next(self._seq)}

    def close(self) -> None:
        with self._cond:
            self._closed = True
            self._cond.notify_all()


class Connection:
    """One client: an outbound queue plus send helpers used on the loop thread."""

    def __init__(self, coalesce: bool):
        self.outbound = OutboundQueue(coalesce)

    def send_view(self, app: str, body: dict) -> None:
        self.outbound.put(VIEW, app, body)

    def send_error(self, app: str, message: str) -> None:
        self.outbound.put(ERROR, app, {"message": message})

    def send_info(self, app: str, body: dict) -> None:
        self.outbound.put(INFO, app, body)

    def next_outbound(self, timeout: Optional[float] = None) -> Optional[dict]:
        return self.outbound.pop(timeout)

    def close(self) -> None:
        self.outbound.close()


class GatewayRuntime:
    """Owns the loop thread, clocks, executor, the three apps, and broadcasting."""

    def __init__(self, config: Optional[RuntimeConfig] = None):
        self.config = config or RuntimeConfig()
        self.loop = EventLoop()
        self._executor = TaskExecutor.pool(self.config.prime.pool_size)
        self._clock = ThreadedClock(name="timer-clock")
        self._connections: set[Connection] = set()
        self._conn_lock = threading.Lock()
        self._loop_thread: Optional[threading.Thread] = None

        self._counter = BoundedCounter(self.config.counter.min_value,
                                       self.config.counter.max_value)
        self._counter_adapter = CounterAdapter(
            self._counter,
            lambda vs: self._broadcast(APP_COUNTER, vs.as_dict()),
            loop=self.loop,
        )

        self._timer_view = TimerView(
            sink=lambda vs: self._broadcast(APP_TIMER, vs.as_dict()))
        self._timer_machine = TimerStateMachine(
            TimeModel(self.config.timer.max_time),
            self._clock,
            PostedUIListener(self.loop.post, self._timer_view),
            idle_timeout_s=self.config.timer.idle_timeout_s,
            tick_period_s=self.config.timer.tick_period_s,
        )
        self._clock.set_listener(ClockToMachine(self._timer_machine))

        self._prime = PrimeChecker(
            self.loop,
            self._executor,
            slots=self.config.prime.slots,
            chunk_budget=self.config.prime.chunk_budget,
            view_sink=lambda slots: self._broadcast(APP_PRIME, {"slots": slots}),
        )

        self.loop.set_listener(APP_COUNTER, self._on_counter)
        self.loop.set_listener(APP_TIMER, self._on_timer)
        self.loop.set_listener(APP_PRIME, self._on_prime)
        self.loop.set_listener(APP_GATEWAY, self._on_protocol_error)

    # -- lifecycle -------------------------------------------------------------

    def start(self) -> None:
        self._loop_thread = self.loop.start_thread(name="gateway-loop")
        self.loop.post(self._timer_machine.start)
        # boot updates settle before any connection can attach, so the
        # first thing every client sees is a complete snapshot
        self.drain_quiescent()

    def shutdown(self) -> None:
        self.loop.shutdown()
        if self._loop_thread is not None:
            self._loop_thread.join(timeout=5)
        self._executor.shutdown(wait=False)
        self._clock.close()
        with self._conn_lock:
            connections = list(self._connections)
            self._connections.clear()
        for conn in connections:
            conn.close()

    # -- connections -------------------------------------------------------------

    def register(self, coalesce: bool = True) -> Connection:
        """Attach a client; it receives one snapshot per app before any update."""
        conn = Connection(coalesce)

        def attach():
            with self._conn_lock:
                self._connections.add(conn)
            conn.send_view(APP_COUNTER, project_view(self._counter).as_dict())
            conn.send_view(APP_TIMER, self._timer_view.current().as_dict())
            conn.send_view(APP_PRIME, {"slots": self._prime.view()})

        self.loop.post(attach)
        return conn

    def unregister(self, conn: Connection) -> None:
        with self._conn_lock:
            self._connections.discard(conn)
        conn.close()

    def _broadcast(self, app: str, body: dict) -> None:
        with self._conn_lock:
            connections = list(self._connections)
        for conn in connections:
            conn.send_view(app, body)

    # -- inbound -------------------------------------------------------------------

    def submit(self, conn: Connection, raw: str) -> None:
        """Parse an inbound line on the reader thread; queue it for the loop."""
        try:
            message = json.loads(raw)
            if not isinstance(message, dict):
                raise ValueError("not an object")
            app = message.get("app")
            name = message.get("event")
            args = message.get("args") or {}
            if app not in APPS:
                raise ValueError(f"unknown app {app!r}")
            if not isinstance(name, str) or not isinstance(args, dict):
                raise ValueError("event must be a string and args an object")
        except ValueError as exc:
            payload = (conn, f"bad message: {exc}")
            app = APP_GATEWAY
            name, args = "", {}
            try:
                self.loop.enqueue(app, payload)
            except EnqueueOnClosed:
                pass
            return
        try:
            self.loop.enqueue(app, (conn, name, args))
        except EnqueueOnClosed:
            pass

    def drain_barrier(self, timeout: float = 30.0) -> bool:
        """Wait until everything queued so far has been dispatched."""
        done = threading.Event()
        try:
            self.loop.post(done.set)
        except EnqueueOnClosed:
            return True
        return done.wait(timeout)

    def drain_quiescent(self, timeout: float = 30.0) -> bool:
        """Drain until handlers stop cascading follow-up posts onto the loop.

        Only meaningful once producers have gone quiet; a runaway chunked job
        would never quiesce.
        """
        while True:
            if not self.drain_barrier(timeout):
                return False
            if len(self.loop.queue) == 0:
                return True

    # -- app listeners (loop thread) -------------------------------------------------

    def _on_protocol_error(self, event: Event) -> None:
        conn, description = event.payload
        conn.send_error(APP_GATEWAY, description)

    def _on_counter(self, event: Event) -> None:
        conn, name, _args = event.payload
        if name not in COUNTER_EVENTS:
            conn.send_error(APP_COUNTER, f"unknown event {name!r}")
            return
        self._counter_adapter.on_event(name)

    def _on_timer(self, event: Event) -> None:
        conn, name, _args = event.payload
        if name != "button_press":
            conn.send_error(APP_TIMER, f"unknown event {name!r}")
            return
        self._timer_machine.on_button_press()

    def _on_prime(self, event: Event) -> None:
        conn, name, args = event.payload
        if name == "check":
            try:
                n = int(str(args.get("n", "")).strip())
                if n < 0:
                    raise ValueError
            except ValueError:
                conn.send_error(APP_PRIME, "invalid number")
                return
            mode_name = args.get("mode", "async")
            try:
                mode = RunMode(mode_name)
            except ValueError:
                conn.send_error(APP_PRIME, f"unknown mode {mode_name!r}")
                return
            try:
                self._prime.check(n, mode)
            except NoFreeSlot:
                conn.send_error(APP_PRIME, "no free slot")
        elif name == "cancel_all":
            accepted = self._prime.cancel_all()
            conn.send_info(APP_PRIME, {"cancelled": accepted})
        else:
            conn.send_error(APP_PRIME, f"unknown event {name!r}")


# -- stdio transport ---------------------------------------------------------------


def run_stdio(config: Optional[RuntimeConfig] = None,
              instream: Optional[TextIO] = None,
              outstream: Optional[TextIO] = None) -> int:
    """Speak the wire protocol over text streams; one JSON object per line.

    Reads until EOF, lets the loop finish everything submitted, then drains
    the outbound queue. Coalescing is off so a fixed inbound script always
    produces the identical outbound trace.
    """
    import sys

    instream = instream if instream is not None else sys.stdin
    outstream = outstream if outstream is not None else sys.stdout
    runtime = GatewayRuntime(config)
    runtime.start()
    conn = runtime.register(coalesce=False)

    def writer():
        while True:
            message = conn.next_outbound()
            if message is None:
                return
            outstream.write(canonical(message) + "\n")
            outstream.flush()

    writer_thread = threading.Thread(target=writer, name="stdio-writer", daemon=True)
    writer_thread.start()
    try:
        for raw in instream:
            if raw.strip():
                runtime.submit(conn, raw)
        runtime.drain_quiescent()
    finally:
        conn.close()
        writer_thread.join(timeout=10)
        runtime.shutdown()
    return 0


# -- websocket transport -------------------------------------------------------------

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".map": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
    ".txt": "text/plain; charset=utf-8",
}


class GatewayServer:
    """WebSocket endpoint at /ws plus static files at the HTTP root."""

    def __init__(self, config: Optional[RuntimeConfig] = None,
                 static_root: Optional[Path] = None, host: str = "127.0.0.1"):
        from websockets.sync.server import serve as ws_serve

        self.runtime = GatewayRuntime(config)
        self._static_root = Path(static_root).resolve() if static_root else None
        try:
            self._server = ws_serve(self._handle, host=host,
                                    port=self.runtime.config.port,
                                    process_request=self._process_request)
        except OSError as exc:
            self.runtime.shutdown()
            raise BindFailure(f"cannot bind port {self.runtime.config.port}: {exc}")
        self._thread: Optional[threading.Thread] = None

    @property
    def port(self) -> int:
        return self._server.socket.getsockname()[1]

    def start(self) -> None:
        self.runtime.start()
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        name="gateway-server", daemon=True)
        self._thread.start()

    def serve_forever(self) -> None:
        self.runtime.start()
        log.info("gateway listening on port %d", self.port)
        self._server.serve_forever()

    def stop(self) -> None:
        self._server.shutdown()
        if self._thread is not None:
            self._thread.join(timeout=5)
        self.runtime.shutdown()

    # one handler thread per connection; a writer thread pushes outbound
    def _handle(self, websocket) -> None:
        conn = self.runtime.register(coalesce=True)

        def writer():
            while True:
                message = conn.next_outbound()
                if message is None:
                    return
                try:
                    websocket.send(canonical(message))
                except Exception:
                    return

        writer_thread = threading.Thread(target=writer, name="ws-writer", daemon=True)
        writer_thread.start()
        try:
            for raw in websocket:
                self.runtime.submit(conn, raw)
        except Exception:
            pass
        finally:
            self.runtime.unregister(conn)
            writer_thread.join(timeout=5)

    def _process_request(self, connection, request):
        from websockets.datastructures import Headers
        from websockets.http11 import Response

        path = request.path.split("?", 1)[0]
        if path == "/ws":
            return None  # proceed with the websocket handshake

        def plain(status: int, text: str) -> Response:
            body = text.encode()
            headers = Headers([("Content-Type", "text/plain; charset=utf-8"),
                               ("Content-Length", str(len(body)))])
            return Response(status, "", headers, body)

        if self._static_root is None:
            return plain(404, "no frontend bundle configured; websocket lives at /ws\n")
        name = path.lstrip("/") or "index.html"
        target = (self._static_root / name).resolve()
        if not target.is_relative_to(self._static_root) or not target.is_file():
            return plain(404, "not found\n")
        body = target.read_bytes()
        content_type = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        headers = Headers([("Content-Type", content_type),
                           ("Content-Length", str(len(body)))])
        return Response(200, "", headers, body)


def serve(config: Optional[RuntimeConfig] = None,
          static_root: Optional[Path] = None) -> None:
    """Run the gateway until interrupted."""
    server = GatewayServer(config, static_root=static_root)
    try:
        server.serve_forever()
    finally:
        server.stop()
