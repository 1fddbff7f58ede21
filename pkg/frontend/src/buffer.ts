// Shared-axis telemetry buffer: one step axis, many value channels,
// capped capacity. Charts read the aligned arrays directly. A null value
// is a gap (e.g. MVD while no water flows) and must stay a gap -- never
// zero. Out-of-order steps are rejected so the buffer stays
// time-ordered; skipped step indices are counted as dropped frames.

export class TelemetryBuffer {
  readonly capacity: number;
  steps: number[] = [];
  private channels = new Map<string, (number | null)[]>();
  dropped = 0;

  constructor(channelNames: string[], capacity = 3600) {
    this.capacity = capacity;
    for (const name of channelNames) this.channels.set(name, []);
  }

  get channelNames(): string[] {
    return [...this.channels.keys()];
  }

  lastStep(): number | null {
    return this.steps.length ? this.steps[this.steps.length - 1] : null;
  }

  /** Append one sample row; false when the step is not newer than the
   * last one (the row is discarded to preserve ordering). */
  push(step: number, values: Record<string, number | null>): boolean {
    const last = this.lastStep();
    if (last !== null) {
      if (step <= last) return false;
      if (step > last + 1) this.dropped += step - last - 1;
    }
    this.steps.push(step);
    for (const [name, column] of this.channels) {
      column.push(values[name] ?? null);
    }
    if (this.steps.length > this.capacity) {
      const excess = this.steps.length - this.capacity;
      this.steps.splice(0, excess);
      for (const column of this.channels.values()) column.splice(0, excess);
    }
    return true;
  }

  column(name: string): (number | null)[] {
    const col = this.channels.get(name);
    if (!col) throw new Error(`unknown channel: ${name}`);
    return col;
  }

  /** Aligned arrays for plotting: [steps, ...channels in the given
   * order]. */
  aligned(names: string[]): (number | null)[][] {
    return [this.steps.slice(), ...names.map((n) => this.column(n).slice())];
  }

  /** Buffer reset (session reset rewinds the step axis). */
  clear(): void {
    this.steps = [];
    for (const name of this.channelNames) this.channels.set(name, []);
    this.dropped = 0;
  }

  size(): number {
    return this.steps.length;
  }
}

/** Min/max-preserving downsample of an aligned series to at most
 * maxPoints; extremes survive so spikes stay visible in the overview. */
export function downsample(
  steps: number[],
  values: (number | null)[],
  maxPoints: number,
): { steps: number[]; values: (number | null)[] } {
  const n = steps.length;
  if (n <= maxPoints || maxPoints < 4) {
    return { steps: steps.slice(), values: values.slice() };
  }
  const buckets = Math.floor(maxPoints / 2);
  const outSteps: number[] = [];
  const outValues: (number | null)[] = [];
  const per = n / buckets;
  for (let b = 0; b < buckets; b++) {
    const lo = Math.floor(b * per);
    const hi = Math.min(n, Math.floor((b + 1) * per));
    let minI = -1;
    let maxI = -1;
    for (let i = lo; i < hi; i++) {
      const v = values[i];
      if (v === null) continue;
      if (minI < 0 || v < (values[minI] as number)) minI = i;
      if (maxI < 0 || v > (values[maxI] as number)) maxI = i;
    }
    if (minI < 0) {
      // bucket holds only gaps: keep one to preserve the hole
      outSteps.push(steps[lo]);
      outValues.push(null);
      continue;
    }
    const first = Math.min(minI, maxI);
    const second = Math.max(minI, maxI);
    outSteps.push(steps[first]);
    outValues.push(values[first]);
    if (second !== first) {
      outSteps.push(steps[second]);
      outValues.push(values[second]);
    }
  }
  return { steps: outSteps, values: outValues };
}
