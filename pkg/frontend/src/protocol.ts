// Wire types for the gateway protocol: one JSON object per message in each
// direction. Outbound-from-server messages carry a per-connection seq the
// client uses to drop stale renders.

export type CounterView = {
  value: number;
  inc: boolean;
  dec: boolean;
  reset: boolean;
};

export type TimerState = "stopped" | "running" | "ringing";

export type TimerView = {
  display: string;
  state: TimerState;
  ringing: boolean;
  button_label: string;
};

export type SlotStatus = "neutral" | "checking" | "prime" | "composite";

export type PrimeSlot = {
  percent: number;
  status: SlotStatus;
};

export type PrimeView = {
  slots: PrimeSlot[];
};

export type ServerMessage = {
  app: string;
  type: "view" | "error" | "info";
  body: Record<string, unknown>;
  seq: number;
};

export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const msg = data as Record<string, unknown>;
  if (typeof msg.app !== "string") return null;
  if (msg.type !== "view" && msg.type !== "error" && msg.type !== "info") return null;
  if (typeof msg.body !== "object" || msg.body === null) return null;
  if (typeof msg.seq !== "number") return null;
  return {
    app: msg.app,
    type: msg.type,
    body: msg.body as Record<string, unknown>,
    seq: msg.seq,
  };
}

export function encodeEvent(
  app: string,
  event: string,
  args?: Record<string, unknown>,
): string {
  return JSON.stringify(args ? { app, event, args } : { app, event });
}
