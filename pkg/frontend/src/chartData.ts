// Pure chart-data preparation: aligned arrays for uPlot plus transition
// detection used to annotate event times on the LWC panel.

import type { SnapshotView } from "./state.js";
import { downsample } from "./buffer.js";

export type AlignedData = [number[], ...(number | null)[][]];

export function chartData(view: SnapshotView, channels: string[]): AlignedData {
  const aligned = view.buffer.aligned(channels);
  return [aligned[0] as number[], ...aligned.slice(1)] as AlignedData;
}

/** Overview variant: every channel downsampled onto its own min/max
 * skeleton, then re-aligned on the union of kept steps. */
export function overviewData(
  view: SnapshotView,
  channel: string,
  maxPoints = 600,
): { steps: number[]; values: (number | null)[] } {
  return downsample(view.buffer.steps, view.buffer.column(channel), maxPoints);
}

/** Steps at which a channel jumps by more than the threshold -- the LWC
 * trace moves only at setpoint/valve/wind events, so these mark the
 * scenario's event times. */
export function transitionSteps(
  steps: number[],
  values: (number | null)[],
  threshold: number,
): number[] {
  const out: number[] = [];
  for (let i = 1; i < values.length; i++) {
    const a = values[i - 1];
    const b = values[i];
    if (a === null || b === null) continue;
    if (Math.abs(b - a) > threshold) out.push(steps[i]);
  }
  return out;
}

/** Collapse bursts of transition steps into their first step (a PI
 * settling tail after one event is a single transition, not many). */
export function collapseTransitions(steps: number[], window: number): number[] {
  const out: number[] = [];
  for (const s of steps) {
    if (!out.length || s - out[out.length - 1] > window) out.push(s);
  }
  return out;
}
