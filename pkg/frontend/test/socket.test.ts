import { describe, expect, it } from "vitest";

import { ReconnectingSocket, backoffDelay } from "../src/socket.js";
import type { WebSocketLike } from "../src/socket.js";

class FakeSocket implements WebSocketLike {
  sent: string[] = [];
  closed = false;
  private listeners = new Map<string, Array<(event: any) => void>>();

  addEventListener(type: string, listener: (event: any) => void): void {
    const existing = this.listeners.get(type) ?? [];
    existing.push(listener);
    this.listeners.set(type, existing);
  }

  fire(type: string, event: any = {}): void {
    for (const listener of this.listeners.get(type) ?? []) listener(event);
  }

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
  }
}

function rig() {
  const sockets: FakeSocket[] = [];
  const timers: Array<{ fn: () => void; delay: number }> = [];
  const statuses: string[] = [];
  const messages: string[] = [];
  const socket = new ReconnectingSocket(
    "ws://test/ws",
    {
      onMessage: (raw) => messages.push(raw),
      onStatus: (status) => statuses.push(status),
    },
    {
      factory: () => {
        const fake = new FakeSocket();
        sockets.push(fake);
        return fake;
      },
      schedule: (fn, delay) => timers.push({ fn, delay }),
    },
  );
  return { socket, sockets, timers, statuses, messages };
}

describe("backoffDelay", () => {
  it("doubles from the base and saturates at the cap", () => {
    expect([0, 1, 2, 3, 4, 10].map((n) => backoffDelay(n)))
      .toEqual([500, 1000, 2000, 4000, 5000, 5000]);
  });
});

describe("ReconnectingSocket", () => {
  it("reports open and forwards messages", () => {
    const { socket, sockets, statuses, messages } = rig();
    socket.connect();
    sockets[0]!.fire("open");
    sockets[0]!.fire("message", { data: "hello" });
    expect(statuses).toEqual(["connecting", "open"]);
    expect(messages).toEqual(["hello"]);
  });

  it("reconnects after close with growing delays", () => {
    const { socket, sockets, timers, statuses } = rig();
    socket.connect();
    sockets[0]!.fire("open");
    sockets[0]!.fire("close");
    expect(statuses).toEqual(["connecting", "open", "closed"]);
    expect(timers.map((t) => t.delay)).toEqual([500]);

    timers[0]!.fn(); // first retry attempt fails immediately
    sockets[1]!.fire("close");
    timers[1]!.fn();
    sockets[2]!.fire("close");
    expect(timers.map((t) => t.delay)).toEqual([500, 1000, 2000]);

    timers[2]!.fn(); // this retry succeeds, resetting the backoff
    sockets[3]!.fire("open");
    sockets[3]!.fire("close");
    expect(timers.map((t) => t.delay)).toEqual([500, 1000, 2000, 500]);
  });

  it("send fails gracefully while disconnected", () => {
    const { socket, sockets } = rig();
    expect(socket.send("x")).toBe(false);
    socket.connect();
    sockets[0]!.fire("open");
    expect(socket.send("x")).toBe(true);
    expect(sockets[0]!.sent).toEqual(["x"]);
  });

  it("close stops the reconnect cycle", () => {
    const { socket, sockets, timers } = rig();
    socket.connect();
    sockets[0]!.fire("open");
    socket.close();
    expect(sockets[0]!.closed).toBe(true);
    sockets[0]!.fire("close");
    expect(timers).toEqual([]); // closed for good: nothing scheduled
  });
});
