// SnapshotView: the dashboard's model of the live session. Applies
// server frames to the telemetry buffers, tracks the latest snapshot,
// dropped-frame count and staleness. Every stored point carries the
// snapshot step it came from; the UI never manufactures data.

import { TelemetryBuffer } from "./buffer.js";
import type { Snapshot } from "./protocol.js";

export const SCALAR_CHANNELS = ["lwc", "mvd", "t_n", "h", "conduits"] as const;

export function valveChannels(nConduits: number): string[] {
  const names: string[] = [];
  for (let i = 1; i <= nConduits; i++) {
    names.push(`w${i}_flow`, `w${i}_open`, `a${i}_flow`, `a${i}_open`);
  }
  return names;
}

export class SnapshotView {
  readonly buffer: TelemetryBuffer;
  readonly nConduits: number;
  latest: Snapshot | null = null;
  done = false;

  constructor(nConduits: number, capacity = 3600) {
    this.nConduits = nConduits;
    this.buffer = new TelemetryBuffer(
      [...SCALAR_CHANNELS, ...valveChannels(nConduits)],
      capacity,
    );
  }

  /** Apply one snapshot; false when it was stale/out of order. */
  apply(snap: Snapshot): boolean {
    const row: Record<string, number | null> = {
      lwc: snap.lwc_gm3,
      mvd: snap.mvd_um, // stays null when there are no droplets
      t_n: snap.t_n_c,
      h: snap.h_m,
      conduits: snap.n_active_water,
    };
    for (let i = 0; i < this.nConduits; i++) {
      const w = snap.water[i];
      const a = snap.air[i];
      row[`w${i + 1}_flow`] = w ? w.flow_lph : null;
      row[`w${i + 1}_open`] = w ? w.opening : null;
      row[`a${i + 1}_flow`] = a ? a.flow_lpm : null;
      row[`a${i + 1}_open`] = a ? a.opening : null;
    }
    const accepted = this.buffer.push(snap.step, row);
    if (accepted) this.latest = snap;
    return accepted;
  }

  /** A session reset rewinds the step axis: start over. */
  resetIfRewound(snap: Snapshot): void {
    const last = this.buffer.lastStep();
    if (last !== null && snap.step < last) {
      this.buffer.clear();
      this.done = false;
    }
  }

  droppedFrames(): number {
    return this.buffer.dropped;
  }
}
