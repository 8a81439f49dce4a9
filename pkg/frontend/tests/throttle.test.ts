import { expect, test } from "vitest";

import { IntentThrottle } from "../src/throttle.js";

interface Sent {
  t: number;
  gap: number;
  rig: number;
}

/** Deterministic clock + timer wheel so tests need no real time. */
function harness(maxRateHz?: number) {
  let now = 0;
  const sent: Sent[] = [];
  const timers: { at: number; fn: () => void }[] = [];
  const th = new IntentThrottle(
    (gap, rig) => sent.push({ t: now, gap, rig }),
    maxRateHz,
    () => now,
    (fn, ms) => timers.push({ at: now + ms, fn }),
  );
  const advanceTo = (t: number) => {
    for (;;) {
      timers.sort((a, b) => a.at - b.at);
      const next = timers[0];
      if (!next || next.at > t) break;
      timers.shift();
      now = Math.max(now, next.at);
      next.fn();
    }
    now = t;
  };
  return { push: (g: number, r: number) => th.push(g, r), advanceTo, sent };
}

test("a 1 kHz pointer flood never exceeds 60 sends per second", () => {
  const h = harness();
  for (let i = 0; i < 2000; i++) {
    h.advanceTo(i); // one event per millisecond
    h.push(i * 0.01, 0.5);
  }
  h.advanceTo(2100); // let the trailing send flush
  expect(h.sent.length).toBeLessThanOrEqual(2 * 60 + 1);
  for (let i = 1; i < h.sent.length; i++) {
    expect(h.sent[i]!.t - h.sent[i - 1]!.t).toBeGreaterThanOrEqual(1000 / 60 - 1e-9);
  }
});

test("the newest value wins the dead time (trailing send)", () => {
  const h = harness();
  h.push(10, 0.1); // immediate
  h.advanceTo(2);
  h.push(11, 0.2); // held
  h.advanceTo(5);
  h.push(12, 0.3); // replaces the held value
  h.advanceTo(1000);
  expect(h.sent.length).toBe(2);
  expect(h.sent[0]).toMatchObject({ gap: 10, rig: 0.1 });
  expect(h.sent[1]).toMatchObject({ gap: 12, rig: 0.3 });
  expect(h.sent[1]!.t).toBeGreaterThanOrEqual(1000 / 60);
});

test("slow events pass straight through", () => {
  const h = harness();
  for (let i = 0; i < 5; i++) {
    h.advanceTo(i * 100);
    h.push(i, 0);
  }
  expect(h.sent.map((s) => s.gap)).toEqual([0, 1, 2, 3, 4]);
});

test("bursts separated by idle gaps each start immediately", () => {
  const h = harness();
  h.push(1, 0);
  h.advanceTo(500);
  h.push(2, 0);
  expect(h.sent.map((s) => s.t)).toEqual([0, 500]);
});

test("a custom rate cap is honored", () => {
  const h = harness(10);
  for (let i = 0; i < 1000; i++) {
    h.advanceTo(i);
    h.push(i, 0);
  }
  h.advanceTo(1200);
  for (let i = 1; i < h.sent.length; i++) {
    expect(h.sent[i]!.t - h.sent[i - 1]!.t).toBeGreaterThanOrEqual(100 - 1e-9);
  }
  expect(h.sent.length).toBeLessThanOrEqual(11);
});

test("nonpositive rate cap is rejected", () => {
  expect(() => new IntentThrottle(() => undefined, 0)).toThrow(RangeError);
});
