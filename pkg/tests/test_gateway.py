from __future__ import annotations

import io
import json
import threading
from pathlib import Path

import pytest

from reactorkit.config import (
    PORT_ENV_VAR,
    RuntimeConfig,
    load_config,
    parse_config,
)
from reactorkit.gateway import (
    BindFailure,
    GatewayRuntime,
    GatewayServer,
    OutboundQueue,
    canonical,
    run_stdio,
)

DATA = Path(__file__).resolve().parent / "data"


# -- config --------------------------------------------------------------------


def test_config_defaults_match_app_parameters():
    config = RuntimeConfig()
    assert (config.counter.min_value, config.counter.max_value) == (0, 10)
    assert (config.timer.max_time, config.timer.idle_timeout_s,
            config.timer.tick_period_s) == (99, 3, 1)
    assert (config.prime.pool_size, config.prime.chunk_budget,
            config.prime.slots) == (2, 1000, 4)


def test_config_file_parsing():
    config = parse_config("""
# demo config
port = 9100
counter.max = 5
timer.idle_timeout_s = 2
prime.slots = 2
""")
    assert config.port == 9100
    assert config.counter.max_value == 5
    assert config.timer.idle_timeout_s == 2
    assert config.prime.slots == 2
    assert config.prime.pool_size == 2  # untouched default


def test_config_rejects_unknown_keys_and_bad_values():
    with pytest.raises(ValueError):
        parse_config("warp.factor = 9")
    with pytest.raises(ValueError):
        parse_config("port = many")
    with pytest.raises(ValueError):
        parse_config("prime.slots = 0")
    with pytest.raises(ValueError):
        parse_config("counter.min = 7\ncounter.max = 3")


def test_env_port_override(tmp_path, monkeypatch):
    path = tmp_path / "gw.conf"
    path.write_text("port = 9100\n")
    monkeypatch.setenv(PORT_ENV_VAR, "9200")
    assert load_config(path).port == 9200
    monkeypatch.setenv(PORT_ENV_VAR, "lots")
    with pytest.raises(ValueError):
        load_config(path)
    monkeypatch.delenv(PORT_ENV_VAR)
    assert load_config(path).port == 9100


# -- outbound queue ---------------------------------------------------------------


def test_outbound_seq_assigned_in_take_order():
    queue = OutboundQueue(coalesce=False)
    for i in range(3):
        queue.put("view", "counter", {"value": i})
    seqs = [queue.pop()["seq"] for _ in range(3)]
    assert seqs == [1, 2, 3]


def test_outbound_coalesces_views_per_app_latest_wins():
    queue = OutboundQueue(coalesce=True)
    queue.put("view", "counter", {"value": 1})
    queue.put("error", "counter", {"message": "kept"})
    queue.put("view", "timer", {"display": "01"})
    queue.put("view", "counter", {"value": 2})
    queue.put("view", "counter", {"value": 3})
    out = []
    while True:
        try:
            message = queue.pop(timeout=0.05)
        except TimeoutError:
            break
        out.append((message["type"], message["app"], message["body"]))
    assert out == [
        ("error", "counter", {"message": "kept"}),
        ("view", "timer", {"display": "01"}),
        ("view", "counter", {"value": 3}),
    ]


def test_outbound_close_drains_then_stops():
    queue = OutboundQueue(coalesce=False)
    queue.put("info", "prime", {"n": 1})
    queue.close()
    assert queue.pop()["body"] == {"n": 1}
    assert queue.pop() is None
    queue.put("info", "prime", {"n": 2})  # ignored after close
    assert queue.pop() is None


# -- stdio transport -----------------------------------------------------------------


def run_script(lines: list[str]) -> list[dict]:
    inp = io.StringIO("\n".join(lines) + "\n")
    out = io.StringIO()
    assert run_stdio(None, inp, out) == 0
    return [json.loads(line) for line in out.getvalue().splitlines()]


def test_connect_yields_one_snapshot_per_app():
    messages = run_script([])
    assert [m["app"] for m in messages] == ["counter", "timer", "prime"]
    assert all(m["type"] == "view" for m in messages)
    assert messages[0]["body"] == {"value": 0, "inc": True, "dec": False, "reset": True}
    assert messages[1]["body"]["display"] == "00"
    assert len(messages[2]["body"]["slots"]) == 4


def test_every_inbound_yields_at_least_one_outbound():
    messages = run_script([
        '{"app":"counter","event":"increment"}',
        '{"app":"counter","event":"decrement"}',
        '{"app":"prime","event":"cancel_all"}',
        '{"app":"prime","event":"check","args":{"n":"-3"}}',
        'garbage',
    ])
    beyond_snapshot = messages[3:]
    assert len(beyond_snapshot) >= 5
    kinds = [(m["app"], m["type"]) for m in beyond_snapshot]
    assert ("prime", "info") in kinds
    assert ("prime", "error") in kinds
    assert ("gateway", "error") in kinds


def test_seq_strictly_increasing_per_connection():
    messages = run_script([
        '{"app":"counter","event":"increment"}',
        '{"app":"counter","event":"increment"}',
        '{"app":"counter","event":"reset"}',
    ])
    seqs = [m["seq"] for m in messages]
    assert seqs == sorted(seqs)
    assert len(set(seqs)) == len(seqs)


def test_stdio_golden_trace_is_byte_identical():
    inp = io.StringIO((DATA / "golden_inbound.jsonl").read_text())
    out = io.StringIO()
    assert run_stdio(None, inp, out) == 0
    assert out.getvalue() == (DATA / "golden_outbound.jsonl").read_text()


def test_canonical_encoding_sorts_keys():
    assert canonical({"b": 1, "a": {"z": 1, "y": 2}}) == '{"a":{"y":2,"z":1},"b":1}'


# -- runtime inbound validation ------------------------------------------------------


@pytest.fixture
def runtime():
    rt = GatewayRuntime(RuntimeConfig())
    rt.start()
    yield rt
    rt.shutdown()


def collect(conn, count, timeout=5.0):
    messages = []
    for _ in range(count):
        messages.append(conn.next_outbound(timeout=timeout))
    return messages


def test_runtime_broadcasts_to_all_connections(runtime):
    first = runtime.register(coalesce=False)
    second = runtime.register(coalesce=False)
    collect(first, 3)
    collect(second, 3)
    runtime.submit(first, '{"app":"counter","event":"increment"}')
    got_first = first.next_outbound(timeout=5)
    got_second = second.next_outbound(timeout=5)
    assert got_first["body"]["value"] == 1
    assert got_second["body"]["value"] == 1


def test_runtime_timer_button_press_updates_display(runtime):
    conn = runtime.register(coalesce=False)
    collect(conn, 3)
    runtime.submit(conn, '{"app":"timer","event":"button_press"}')
    message = conn.next_outbound(timeout=5)
    assert message["app"] == "timer"
    assert message["body"]["display"] == "01"
    assert message["body"]["state"] == "stopped"


def test_runtime_rejects_unknown_timer_event(runtime):
    conn = runtime.register(coalesce=False)
    collect(conn, 3)
    runtime.submit(conn, '{"app":"timer","event":"snooze"}')
    message = conn.next_outbound(timeout=5)
    assert message["type"] == "error"


# -- websocket transport ----------------------------------------------------------------


@pytest.fixture
def server(tmp_path):
    static = tmp_path / "static"
    static.mkdir()
    (static / "index.html").write_text("<!doctype html><title>demo</title>")
    (static / "app.js").write_text("console.log('hi')")
    srv = GatewayServer(RuntimeConfig(port=0), static_root=static)
    srv.start()
    yield srv
    srv.stop()


def ws_url(server):
    return f"ws://127.0.0.1:{server.port}/ws"


def test_ws_snapshot_then_event_round_trip(server):
    from websockets.sync.client import connect

    with connect(ws_url(server)) as ws:
        snapshots = [json.loads(ws.recv(timeout=5)) for _ in range(3)]
        assert [m["app"] for m in snapshots] == ["counter", "timer", "prime"]
        ws.send('{"app":"counter","event":"increment"}')
        update = json.loads(ws.recv(timeout=5))
        assert update["app"] == "counter"
        assert update["body"]["value"] == 1


def test_ws_broadcast_reaches_other_clients(server):
    from websockets.sync.client import connect

    with connect(ws_url(server)) as sender, connect(ws_url(server)) as watcher:
        for _ in range(3):
            sender.recv(timeout=5)
            watcher.recv(timeout=5)
        sender.send('{"app":"counter","event":"increment"}')
        seen = json.loads(watcher.recv(timeout=5))
        assert seen["app"] == "counter"
        assert seen["body"]["value"] == 1


def test_ws_malformed_message_keeps_connection_alive(server):
    from websockets.sync.client import connect

    with connect(ws_url(server)) as ws:
        for _ in range(3):
            ws.recv(timeout=5)
        ws.send("not json at all")
        error = json.loads(ws.recv(timeout=5))
        assert error["type"] == "error"
        ws.send('{"app":"counter","event":"increment"}')
        update = json.loads(ws.recv(timeout=5))
        assert update["body"]["value"] == 1


def test_static_files_served_from_http_root(server):
    import urllib.request

    base = f"http://127.0.0.1:{server.port}"
    with urllib.request.urlopen(f"{base}/", timeout=5) as response:
        assert response.headers["Content-Type"].startswith("text/html")
        assert b"demo" in response.read()
    with urllib.request.urlopen(f"{base}/app.js", timeout=5) as response:
        assert response.headers["Content-Type"].startswith("text/javascript")
    with pytest.raises(Exception):
        urllib.request.urlopen(f"{base}/../secrets", timeout=5)


def test_bind_failure_raises(server):
    with pytest.raises(BindFailure):
        GatewayServer(RuntimeConfig(port=server.port))
