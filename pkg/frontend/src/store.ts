// Client view model: the latest snapshot per app, connection status, and the
// local pending inputs. Rendering is a pure function of this state (see
// renderModel); there is no business logic here beyond mirroring what the
// server said, debouncing clicked controls until the next snapshot, and
// validating the prime input field before anything is sent.

import type {
  CounterView,
  PrimeSlot,
  PrimeView,
  ServerMessage,
  TimerView,
} from "./protocol.js";
import { parseServerMessage } from "./protocol.js";

export type ConnectionStatus = "connecting" | "open" | "closed";

export type SlotRender = {
  percent: number;
  status: string;
  color: "green" | "red" | "plain" | "busy";
};

export type RenderModel = {
  banner: { visible: boolean; text: string };
  counter: {
    value: string;
    incDisabled: boolean;
    decDisabled: boolean;
    resetDisabled: boolean;
  };
  timer: {
    display: string;
    stateLabel: string;
    buttonLabel: string;
    buttonDisabled: boolean;
    flash: boolean;
  };
  prime: {
    slots: SlotRender[];
    checkDisabled: boolean;
    cancelDisabled: boolean;
    inputError: string;
  };
  lastError: string;
};

const SLOT_COLORS: Record<string, SlotRender["color"]> = {
  prime: "green",
  composite: "red",
  neutral: "plain",
  checking: "busy",
};

export class Store {
  counter: CounterView | null = null;
  timer: TimerView | null = null;
  prime: PrimeView | null = null;
  status: ConnectionStatus = "connecting";
  lastSeq = 0;
  lastError = "";
  primeInput = "";
  primeMode = "async";
  inputError = "";

  private pending = new Set<string>();
  private listeners: Array<() => void> = [];

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  // -- inbound ----------------------------------------------------------------

  applyRaw(raw: string): void {
    const message = parseServerMessage(raw);
    if (message === null) return;
    this.applyMessage(message);
  }

  applyMessage(message: ServerMessage): void {
    if (message.seq <= this.lastSeq) return; // never render a stale snapshot
    this.lastSeq = message.seq;
    if (message.type === "error") {
      this.lastError = String(message.body.message ?? "error");
      this.emit();
      return;
    }
    if (message.type === "view") {
      // a fresh snapshot re-enables whatever control was debounced for it
      for (const key of [...this.pending]) {
        if (key.startsWith(message.app + ".")) this.pending.delete(key);
      }
      if (message.app === "counter") {
        this.counter = message.body as unknown as CounterView;
      } else if (message.app === "timer") {
        this.timer = message.body as unknown as TimerView;
      } else if (message.app === "prime") {
        this.prime = message.body as unknown as PrimeView;
      }
    }
    this.emit();
  }

  setStatus(status: ConnectionStatus): void {
    this.status = status;
    if (status === "open") {
      // a new connection starts a new seq space and sends full snapshots
      this.lastSeq = 0;
      this.pending.clear();
      this.lastError = "";
    }
    this.emit();
  }

  // -- local inputs ---------------------------------------------------------------

  markPending(app: string, control: string): void {
    this.pending.add(`${app}.${control}`);
    this.emit();
  }

  isPending(app: string, control: string): boolean {
    return this.pending.has(`${app}.${control}`);
  }

  setPrimeInput(text: string): void {
    this.primeInput = text;
    this.inputError = "";
    this.emit();
  }

  setPrimeMode(mode: string): void {
    this.primeMode = mode;
    this.emit();
  }

  /** The candidate to send, or null (setting an inline error) if not a number. */
  validatedCandidate(): string | null {
    const text = this.primeInput.trim();
    if (!/^\d+$/.test(text)) {
      this.inputError = "enter a whole number";
      this.emit();
      return null;
    }
    return text;
  }

  // -- projection --------------------------------------------------------------------

  renderModel(): RenderModel {
    const offline = this.status !== "open";
    const counter = this.counter;
    const timer = this.timer;
    const slots: PrimeSlot[] = this.prime ? this.prime.slots : [];
    const anyChecking = slots.some((slot) => slot.status === "checking");
    return {
      banner: {
        visible: offline,
        text: this.status === "closed" ? "disconnected - retrying" : "connecting",
      },
      counter: {
        value: counter ? String(counter.value) : "-",
        incDisabled: offline || !counter || !counter.inc
          || this.isPending("counter", "increment"),
        decDisabled: offline || !counter || !counter.dec
          || this.isPending("counter", "decrement"),
        resetDisabled: offline || !counter || !counter.reset
          || this.isPending("counter", "reset"),
      },
      timer: {
        display: timer ? timer.display : "--",
        stateLabel: timer ? timer.state : "",
        buttonLabel: timer ? timer.button_label : "button",
        buttonDisabled: offline || !timer || this.isPending("timer", "button_press"),
        flash: Boolean(timer && timer.ringing),
      },
      prime: {
        slots: slots.map((slot) => ({
          percent: slot.percent,
          status: slot.status,
          color: SLOT_COLORS[slot.status] ?? "plain",
        })),
        checkDisabled: offline || this.isPending("prime", "check"),
        cancelDisabled: offline || !anyChecking,
        inputError: this.inputError,
      },
      lastError: this.lastError,
    };
  }
}
