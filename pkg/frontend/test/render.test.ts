import { describe, expect, it } from "vitest";

import type { ElementLike, PageRefs } from "../src/render.js";
import { applyModel } from "../src/render.js";
import { Store } from "../src/store.js";

function stub(): ElementLike {
  return { textContent: null, className: "", hidden: false, disabled: false, style: {} };
}

function stubRefs(): PageRefs {
  return {
    banner: stub(),
    errorLine: stub(),
    counterValue: stub(),
    counterInc: stub(),
    counterDec: stub(),
    counterReset: stub(),
    timerDisplay: stub(),
    timerState: stub(),
    timerButton: stub(),
    primeCheck: stub(),
    primeCancel: stub(),
    primeError: stub(),
    slotBars: [stub(), stub()],
    slotFills: [stub(), stub()],
    slotLabels: [stub(), stub()],
  };
}

describe("applyModel", () => {
  it("paints a full snapshot onto the elements", () => {
    const store = new Store();
    store.setStatus("open");
    store.applyMessage({
      app: "counter", type: "view", seq: 1,
      body: { value: 7, inc: true, dec: true, reset: true },
    });
    store.applyMessage({
      app: "timer", type: "view", seq: 2,
      body: { display: "00", state: "ringing", ringing: true, button_label: "stop alarm" },
    });
    store.applyMessage({
      app: "prime", type: "view", seq: 3,
      body: { slots: [{ percent: 40, status: "checking" }, { percent: 100, status: "prime" }] },
    });

    const refs = stubRefs();
    applyModel(refs, store.renderModel());

    expect(refs.banner.hidden).toBe(true);
    expect(refs.counterValue.textContent).toBe("7");
    expect(refs.counterInc.disabled).toBe(false);
    expect(refs.timerDisplay.textContent).toBe("00");
    expect(refs.timerDisplay.className).toContain("flash");
    expect(refs.timerButton.textContent).toBe("stop alarm");
    expect(refs.slotFills[0]!.style!.width).toBe("40%");
    expect(refs.slotFills[0]!.className).toBe("fill busy");
    expect(refs.slotFills[1]!.className).toBe("fill green");
    expect(refs.slotLabels[1]!.textContent).toBe("prime 100%");
  });

  it("shows the banner and greys controls when disconnected", () => {
    const store = new Store();
    store.setStatus("closed");
    const refs = stubRefs();
    applyModel(refs, store.renderModel());
    expect(refs.banner.hidden).toBe(false);
    expect(refs.counterInc.disabled).toBe(true);
    expect(refs.timerButton.disabled).toBe(true);
    expect(refs.primeCheck.disabled).toBe(true);
  });
});
