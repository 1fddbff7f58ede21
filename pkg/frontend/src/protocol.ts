// Wire protocol of the live session: typed frames plus structural guards.
// The server speaks JSON over the /live websocket; every frame carries a
// "type" discriminator. Snapshots mirror one trace row.

export interface WaterValveView {
  enabled: boolean;
  setpoint_lph: number;
  flow_lph: number;
  opening: number;
}

export interface AirValveView {
  enabled: boolean;
  setpoint_lpm: number;
  flow_lpm: number;
  opening: number;
}

export interface Snapshot {
  type: "snapshot";
  v: number;
  step: number;
  t: number;
  h_m: number;
  t_w_c: number;
  rho_a_kg_m3: number;
  t_a_c: number;
  t_ts_c: number;
  v_ts_mps: number;
  t_n_c: number;
  lwc_gm3: number;
  mvd_um: number | null;
  nozzle_v_out_mps: number;
  n_active_water: number;
  n_active_air: number;
  water: WaterValveView[];
  air: AirValveView[];
  warnings: string[];
}

export interface AckFrame {
  type: "ack";
  id: number;
  effective_step: number;
}

export interface ErrorFrame {
  type: "error";
  id: number | null;
  message: string;
}

export interface DoneFrame {
  type: "done";
  step: number;
}

export type ServerFrame = Snapshot | AckFrame | ErrorFrame | DoneFrame;

export type ActionCommand = {
  id: number;
  action:
    | "set_water_setpoint"
    | "set_air_setpoint"
    | "enable_valve"
    | "disable_valve"
    | "set_t_ts"
    | "set_v_ts"
    | "set_heater_power";
  args: Record<string, number | string>;
};

export type SessionCommand = { id: number; cmd: "pause" | "resume" | "reset" };

export type Command = ActionCommand | SessionCommand;

function isFiniteNumber(x: unknown): x is number {
  return typeof x === "number" && Number.isFinite(x);
}

function isValveArray(x: unknown): boolean {
  return (
    Array.isArray(x) &&
    x.every(
      (v) =>
        v !== null &&
        typeof v === "object" &&
        typeof (v as { enabled?: unknown }).enabled === "boolean" &&
        isFiniteNumber((v as { opening?: unknown }).opening),
    )
  );
}

export function isSnapshot(doc: unknown): doc is Snapshot {
  if (doc === null || typeof doc !== "object") return false;
  const d = doc as Record<string, unknown>;
  return (
    d.type === "snapshot" &&
    isFiniteNumber(d.step) &&
    isFiniteNumber(d.t) &&
    isFiniteNumber(d.lwc_gm3) &&
    (d.mvd_um === null || isFiniteNumber(d.mvd_um)) &&
    isFiniteNumber(d.t_n_c) &&
    isValveArray(d.water) &&
    isValveArray(d.air) &&
    Array.isArray(d.warnings)
  );
}

export function isAck(doc: unknown): doc is AckFrame {
  if (doc === null || typeof doc !== "object") return false;
  const d = doc as Record<string, unknown>;
  return d.type === "ack" && isFiniteNumber(d.effective_step);
}

export function isErrorFrame(doc: unknown): doc is ErrorFrame {
  if (doc === null || typeof doc !== "object") return false;
  const d = doc as Record<string, unknown>;
  return d.type === "error" && typeof d.message === "string";
}

export function isDone(doc: unknown): doc is DoneFrame {
  if (doc === null || typeof doc !== "object") return false;
  const d = doc as Record<string, unknown>;
  return d.type === "done" && isFiniteNumber(d.step);
}

/** Parse one raw websocket message; null when the payload is not a
 * recognisable frame. */
export function parseFrame(raw: string): ServerFrame | null {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch {
    return null;
  }
  if (isSnapshot(doc)) return doc;
  if (isAck(doc)) return doc;
  if (isErrorFrame(doc)) return doc;
  if (isDone(doc)) return doc;
  return null;
}

export interface PlantRanges {
  [variable: string]: [number, number];
}

export interface ConfigInfo {
  n_conduits: number;
  duration_s: number;
  step_s: number;
  ranges: PlantRanges;
}

/** Extract what the dashboard needs from GET /config. */
export function parseConfig(doc: unknown): ConfigInfo {
  const d = doc as {
    config?: { n_conduits?: number };
    scenario?: { duration_s?: number; step_s?: number };
    ranges?: PlantRanges;
  };
  return {
    n_conduits: d.config?.n_conduits ?? 12,
    duration_s: d.scenario?.duration_s ?? 1200,
    step_s: d.scenario?.step_s ?? 1,
    ranges: d.ranges ?? {},
  };
}
