// Control-panel logic kept free of DOM concerns so it is testable:
// range clamping for the exogenous sliders, setpoint validation, and the
// pending-command registry (a command stays pending from send until its
// ack arrives; the ack carries the step at which it takes effect).

export interface Range {
  lo: number;
  hi: number;
}

/** Clamp a requested value into the configured range. The UI clamps
 * locally; an out-of-range request is corrected, not sent. */
export function clamp(value: number, range: Range): number {
  return Math.min(Math.max(value, range.lo), range.hi);
}

/** Parse a setpoint input: finite, nonnegative, not beyond max; null
 * means "do not send". */
export function parseSetpoint(raw: string, max = 1000): number | null {
  const v = Number(raw);
  if (!Number.isFinite(v) || v < 0 || v > max) return null;
  return v;
}

export interface PendingCommand {
  id: number;
  label: string;
  sentAtMs: number;
}

export interface AckResult {
  id: number;
  label: string;
  effectiveStep: number;
}

export class PendingTracker {
  private nextId = 1;
  private pending = new Map<number, PendingCommand>();

  /** Register an outgoing command; returns the id to send with it. */
  track(label: string, nowMs: number): number {
    const id = this.nextId++;
    this.pending.set(id, { id, label, sentAtMs: nowMs });
    return id;
  }

  /** Resolve a pending command from its ack. Null for unknown ids
   * (e.g. acks addressed to another client's commands are impossible,
   * but a stale ack after reset is not). */
  ack(id: number, effectiveStep: number): AckResult | null {
    const cmd = this.pending.get(id);
    if (!cmd) return null;
    this.pending.delete(id);
    return { id, label: cmd.label, effectiveStep };
  }

  /** Drop a pending command on a rejection frame; returns its label. */
  reject(id: number | null): string | null {
    if (id === null) return null;
    const cmd = this.pending.get(id);
    if (!cmd) return null;
    this.pending.delete(id);
    return cmd.label;
  }

  isPending(label: string): boolean {
    for (const cmd of this.pending.values()) {
      if (cmd.label === label) return true;
    }
    return false;
  }

  count(): number {
    return this.pending.size;
  }

  clear(): void {
    this.pending.clear();
  }
}
