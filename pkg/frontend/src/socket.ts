// Reconnecting WebSocket wrapper with exponential backoff. The constructor
// is injectable so tests (and the node integration run) can supply their own
// WebSocket implementation and timer.

export type WebSocketLike = {
  send(data: string): void;
  close(): void;
  addEventListener(
    type: "open" | "close" | "error" | "message",
    listener: (event: any) => void,
  ): void;
};

export type SocketHooks = {
  onMessage: (raw: string) => void;
  onStatus: (status: "connecting" | "open" | "closed") => void;
};

export type SocketOptions = {
  factory?: (url: string) => WebSocketLike;
  schedule?: (fn: () => void, delayMs: number) => void;
  baseDelayMs?: number;
  maxDelayMs?: number;
};

export function backoffDelay(attempt: number, baseMs = 500, maxMs = 5000): number {
  return Math.min(baseMs * 2 ** attempt, maxMs);
}

export class ReconnectingSocket {
  private socket: WebSocketLike | null = null;
  private attempt = 0;
  private closed = false;
  private readonly factory: (url: string) => WebSocketLike;
  private readonly schedule: (fn: () => void, delayMs: number) => void;
  private readonly baseDelayMs: number;
  private readonly maxDelayMs: number;

  constructor(
    private readonly url: string,
    private readonly hooks: SocketHooks,
    options: SocketOptions = {},
  ) {
    this.factory = options.factory
      ?? ((target) => new (globalThis as any).WebSocket(target) as WebSocketLike);
    this.schedule = options.schedule ?? ((fn, ms) => setTimeout(fn, ms));
    this.baseDelayMs = options.baseDelayMs ?? 500;
    this.maxDelayMs = options.maxDelayMs ?? 5000;
  }

  connect(): void {
    if (this.closed) return;
    this.hooks.onStatus("connecting");
    let socket: WebSocketLike;
    try {
      socket = this.factory(this.url);
    } catch {
      this.scheduleReconnect();
      return;
    }
    this.socket = socket;
    let settled = false;
    socket.addEventListener("open", () => {
      settled = true;
      this.attempt = 0;
      this.hooks.onStatus("open");
    });
    socket.addEventListener("message", (event) => {
      const data = typeof event.data === "string" ? event.data : String(event.data);
      this.hooks.onMessage(data);
    });
    socket.addEventListener("close", () => {
      if (this.closed) return;
      this.socket = null;
      this.hooks.onStatus("closed");
      this.scheduleReconnect();
    });
    socket.addEventListener("error", () => {
      // the close event follows and drives the reconnect
      if (!settled) this.hooks.onStatus("closed");
    });
  }

  private scheduleReconnect(): void {
    const delay = backoffDelay(this.attempt, this.baseDelayMs, this.maxDelayMs);
    this.attempt += 1;
    this.schedule(() => this.connect(), delay);
  }

  send(text: string): boolean {
    if (this.socket === null) return false;
    try {
      this.socket.send(text);
      return true;
    } catch {
      return false;
    }
  }

  close(): void {
    this.closed = true;
    if (this.socket !== null) this.socket.close();
  }
}
