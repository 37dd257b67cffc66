// Entry point: one store, one reconnecting socket, renders at most once per
// animation frame.

import { encodeEvent } from "./protocol.js";
import { applyModel, collectRefs } from "./render.js";
import { ReconnectingSocket } from "./socket.js";
import { Store } from "./store.js";

const SLOT_COUNT = 4;

function start(): void {
  const store = new Store();
  const refs = collectRefs(document, SLOT_COUNT);

  const url = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;
  const socket = new ReconnectingSocket(url, {
    onMessage: (raw) => store.applyRaw(raw),
    onStatus: (status) => store.setStatus(status),
  });

  let framePending = false;
  store.subscribe(() => {
    if (framePending) return;
    framePending = true;
    requestAnimationFrame(() => {
      framePending = false;
      applyModel(refs, store.renderModel());
    });
  });

  const sendEvent = (app: string, event: string, args?: Record<string, unknown>) => {
    if (socket.send(encodeEvent(app, event, args))) {
      store.markPending(app, event);
    }
  };

  const on = (id: string, handler: () => void) => {
    const element = document.getElementById(id);
    if (element) element.addEventListener("click", handler);
  };

  on("counter-inc", () => sendEvent("counter", "increment"));
  on("counter-dec", () => sendEvent("counter", "decrement"));
  on("counter-reset", () => sendEvent("counter", "reset"));
  on("timer-button", () => sendEvent("timer", "button_press"));
  on("prime-cancel", () => sendEvent("prime", "cancel_all"));
  on("prime-check", () => {
    const candidate = store.validatedCandidate();
    if (candidate !== null) {
      sendEvent("prime", "check", { n: candidate, mode: store.primeMode });
    }
  });

  const input = document.getElementById("prime-input") as HTMLInputElement | null;
  if (input) input.addEventListener("input", () => store.setPrimeInput(input.value));
  const mode = document.getElementById("prime-mode") as HTMLSelectElement | null;
  if (mode) mode.addEventListener("change", () => store.setPrimeMode(mode.value));

  socket.connect();
  applyModel(refs, store.renderModel());
}

start();
