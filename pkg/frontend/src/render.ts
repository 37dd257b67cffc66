// DOM application of a RenderModel. The heavy lifting happens in
// store.renderModel(); this file only copies that plain data onto elements,
// so it can be exercised against stub elements without a browser.

import type { RenderModel, SlotRender } from "./store.js";

export type ElementLike = {
  textContent: string | null;
  className: string;
  hidden: boolean;
  disabled?: boolean;
  style?: Record<string, string>;
};

export type PageRefs = {
  banner: ElementLike;
  errorLine: ElementLike;
  counterValue: ElementLike;
  counterInc: ElementLike;
  counterDec: ElementLike;
  counterReset: ElementLike;
  timerDisplay: ElementLike;
  timerState: ElementLike;
  timerButton: ElementLike;
  primeCheck: ElementLike;
  primeCancel: ElementLike;
  primeError: ElementLike;
  slotBars: ElementLike[];
  slotFills: ElementLike[];
  slotLabels: ElementLike[];
};

export function applyModel(refs: PageRefs, model: RenderModel): void {
  refs.banner.hidden = !model.banner.visible;
  refs.banner.textContent = model.banner.text;
  refs.errorLine.hidden = model.lastError === "";
  refs.errorLine.textContent = model.lastError;

  refs.counterValue.textContent = model.counter.value;
  refs.counterInc.disabled = model.counter.incDisabled;
  refs.counterDec.disabled = model.counter.decDisabled;
  refs.counterReset.disabled = model.counter.resetDisabled;

  refs.timerDisplay.textContent = model.timer.display;
  refs.timerDisplay.className = model.timer.flash ? "display flash" : "display";
  refs.timerState.textContent = model.timer.stateLabel;
  refs.timerButton.textContent = model.timer.buttonLabel;
  refs.timerButton.disabled = model.timer.buttonDisabled;

  refs.primeCheck.disabled = model.prime.checkDisabled;
  refs.primeCancel.disabled = model.prime.cancelDisabled;
  refs.primeError.hidden = model.prime.inputError === "";
  refs.primeError.textContent = model.prime.inputError;
  model.prime.slots.forEach((slot: SlotRender, index: number) => {
    const fill = refs.slotFills[index];
    const label = refs.slotLabels[index];
    const bar = refs.slotBars[index];
    if (!fill || !label || !bar) return;
    if (fill.style) fill.style.width = `${slot.percent}%`;
    fill.className = `fill ${slot.color}`;
    label.textContent = `${slot.status} ${slot.percent}%`;
    bar.hidden = false;
  });
}

function grab(doc: Document, id: string): ElementLike {
  const element = doc.getElementById(id);
  if (element === null) throw new Error(`missing element #${id}`);
  return element as unknown as ElementLike;
}

export function collectRefs(doc: Document, slotCount: number): PageRefs {
  const slotBars: ElementLike[] = [];
  const slotFills: ElementLike[] = [];
  const slotLabels: ElementLike[] = [];
  for (let i = 0; i < slotCount; i += 1) {
    slotBars.push(grab(doc, `slot-${i}`));
    slotFills.push(grab(doc, `slot-${i}-fill`));
    slotLabels.push(grab(doc, `slot-${i}-label`));
  }
  return {
    banner: grab(doc, "banner"),
    errorLine: grab(doc, "error-line"),
    counterValue: grab(doc, "counter-value"),
    counterInc: grab(doc, "counter-inc"),
    counterDec: grab(doc, "counter-dec"),
    counterReset: grab(doc, "counter-reset"),
    timerDisplay: grab(doc, "timer-display"),
    timerState: grab(doc, "timer-state"),
    timerButton: grab(doc, "timer-button"),
    primeCheck: grab(doc, "prime-check"),
    primeCancel: grab(doc, "prime-cancel"),
    primeError: grab(doc, "prime-error"),
    slotBars,
    slotFills,
    slotLabels,
  };
}
