// Dashboard bootstrap: fetch the plant config, open the live stream,
// wire charts and the operator control panel.

import { ChartDeck } from "./charts.js";
import { clamp, parseSetpoint, PendingTracker } from "./controls.js";
import type { ConfigInfo, Snapshot } from "./protocol.js";
import { parseConfig } from "./protocol.js";
import { LiveSocket } from "./socket.js";
import { SnapshotView } from "./state.js";

const STALE_AFTER_MS = 4000;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function fmt(x: number | null | undefined, digits = 2): string {
  return x === null || x === undefined ? "—" : x.toFixed(digits);
}

async function boot(): Promise<void> {
  const cfgDoc = await fetch("/config").then((r) => r.json());
  const cfg: ConfigInfo = parseConfig(cfgDoc);
  const view = new SnapshotView(cfg.n_conduits);
  const deck = new ChartDeck(view);
  const pending = new PendingTracker();
  const socket = new LiveSocket(
    `${location.origin.replace(/^http/, "ws")}/live`,
  );

  // --- charts -----------------------------------------------------------
  deck.addPanel(el("chart-lwc"), "Liquid water content", "g/m³", [
    { name: "lwc", label: "LWC" },
  ]);
  deck.addPanel(el("chart-mvd"), "Median volumetric diameter", "µm", [
    { name: "mvd", label: "MVD" },
  ]);
  deck.addPanel(el("chart-tn"), "Nozzle mix temperature", "°C", [
    { name: "t_n", label: "T_n" },
  ]);
  const flowChannels = [];
  const openChannels = [];
  const airChannels = [];
  for (let i = 1; i <= cfg.n_conduits; i++) {
    flowChannels.push({ name: `w${i}_flow`, label: `valve ${i}` });
    openChannels.push({ name: `w${i}_open`, label: `valve ${i}` });
    airChannels.push({ name: `a${i}_flow`, label: `valve ${i}` });
  }
  deck.addPanel(el("chart-wflow"), "Water flow per conduit", "L/h", flowChannels);
  deck.addPanel(el("chart-aflow"), "Air flow per conduit", "L/min", airChannels);
  deck.addPanel(el("chart-open"), "Water valve opening", "fraction", openChannels);

  // --- status bar ---------------------------------------------------------
  const statusBadge = el<HTMLSpanElement>("status");
  const staleBadge = el<HTMLSpanElement>("stale");
  const stepLabel = el<HTMLSpanElement>("step");
  const droppedLabel = el<HTMLSpanElement>("dropped");
  const pendingLabel = el<HTMLSpanElement>("pending");
  const warnBox = el<HTMLDivElement>("warnings");
  const ackLog = el<HTMLUListElement>("acklog");
  let lastFrameAt = 0;

  function logLine(text: string, cls = ""): void {
    const li = document.createElement("li");
    li.textContent = text;
    if (cls) li.className = cls;
    ackLog.prepend(li);
    while (ackLog.children.length > 12) ackLog.removeChild(ackLog.lastChild!);
  }

  function refreshStatus(): void {
    droppedLabel.textContent = String(view.droppedFrames());
    pendingLabel.textContent = String(pending.count());
    const snap = view.latest;
    if (snap) {
      stepLabel.textContent = `step ${snap.step} / ${cfg.duration_s}`;
      el("kpi-lwc").textContent = fmt(snap.lwc_gm3, 3);
      el("kpi-mvd").textContent = fmt(snap.mvd_um, 2);
      el("kpi-tn").textContent = fmt(snap.t_n_c, 2);
      el("kpi-h").textContent = fmt(snap.h_m, 3);
      el("kpi-conduits").textContent = String(snap.n_active_water);
      warnBox.textContent = snap.warnings.join("; ");
      warnBox.style.display = snap.warnings.length ? "block" : "none";
    }
  }

  setInterval(() => {
    const stale = lastFrameAt > 0 && Date.now() - lastFrameAt > STALE_AFTER_MS;
    staleBadge.style.display = stale ? "inline-block" : "none";
  }, 1000);

  // --- commands -------------------------------------------------------------
  function sendAction(
    label: string,
    action:
      | "set_water_setpoint"
      | "set_air_setpoint"
      | "enable_valve"
      | "disable_valve"
      | "set_t_ts"
      | "set_v_ts"
      | "set_heater_power",
    args: Record<string, number | string>,
  ): void {
    const id = pending.track(label, Date.now());
    if (!socket.send({ id, action, args })) {
      pending.reject(id);
      logLine(`${label}: not connected`, "err");
    }
    refreshStatus();
  }

  function sendSession(cmd: "pause" | "resume" | "reset"): void {
    const id = pending.track(cmd, Date.now());
    if (!socket.send({ id, cmd })) pending.reject(id);
    refreshStatus();
  }

  // --- control panel ----------------------------------------------------------
  const valveGrid = el<HTMLDivElement>("valves");
  const valveButtons: HTMLButtonElement[] = [];
  for (let i = 1; i <= cfg.n_conduits; i++) {
    const btn = document.createElement("button");
    btn.textContent = String(i);
    btn.title = `toggle conduit ${i} (water + air)`;
    btn.addEventListener("click", () => {
      const enabled = view.latest?.water[i - 1]?.enabled ?? true;
      sendAction(
        `valve ${i} ${enabled ? "off" : "on"}`,
        enabled ? "disable_valve" : "enable_valve",
        { valve: i },
      );
    });
    valveGrid.appendChild(btn);
    valveButtons.push(btn);
  }

  function refreshValveButtons(snap: Snapshot): void {
    valveButtons.forEach((btn, idx) => {
      const on = snap.water[idx]?.enabled ?? false;
      btn.classList.toggle("on", on);
      btn.classList.toggle("off", !on);
    });
  }

  el<HTMLButtonElement>("apply-water").addEventListener("click", () => {
    const raw = el<HTMLInputElement>("water-setpoint").value;
    const value = parseSetpoint(raw);
    if (value === null) {
      logLine(`water setpoint ${raw} rejected locally`, "err");
      return;
    }
    sendAction(`water ${value} L/h`, "set_water_setpoint", { value_lph: value });
  });

  el<HTMLButtonElement>("apply-air").addEventListener("click", () => {
    const raw = el<HTMLInputElement>("air-setpoint").value;
    const value = parseSetpoint(raw);
    if (value === null) {
      logLine(`air setpoint ${raw} rejected locally`, "err");
      return;
    }
    sendAction(`air ${value} L/min`, "set_air_setpoint", { value_lpm: value });
  });

  function wireSlider(
    sliderId: string,
    labelId: string,
    rangeName: string,
    label: string,
    action: "set_t_ts" | "set_v_ts",
    argName: string,
  ): void {
    const slider = el<HTMLInputElement>(sliderId);
    const readout = el<HTMLSpanElement>(labelId);
    const range = cfg.ranges[rangeName];
    if (range) {
      slider.min = String(range[0]);
      slider.max = String(range[1]);
      slider.step = "0.1";
    }
    slider.addEventListener("input", () => {
      readout.textContent = slider.value;
    });
    slider.addEventListener("change", () => {
      const bounds = { lo: Number(slider.min), hi: Number(slider.max) };
      const value = clamp(Number(slider.value), bounds);
      slider.value = String(value);
      readout.textContent = slider.value;
      sendAction(`${label} ${value}`, action, { [argName]: value });
    });
  }

  wireSlider("tts", "tts-value", "T_TS", "T_TS", "set_t_ts", "value_c");
  wireSlider("vts", "vts-value", "v_TS", "v_TS", "set_v_ts", "value_mps");

  el<HTMLButtonElement>("pause").addEventListener("click", () => sendSession("pause"));
  el<HTMLButtonElement>("resume").addEventListener("click", () => sendSession("resume"));
  el<HTMLButtonElement>("reset").addEventListener("click", () => sendSession("reset"));

  // --- stream ---------------------------------------------------------------
  socket.onStatus((status) => {
    statusBadge.textContent = status;
    statusBadge.className = `badge ${status}`;
  });

  socket.onFrame((frame) => {
    lastFrameAt = Date.now();
    if (frame.type === "snapshot") {
      view.resetIfRewound(frame);
      if (view.apply(frame)) {
        deck.markDirty();
        refreshValveButtons(frame);
        refreshStatus();
      }
    } else if (frame.type === "ack") {
      const result = pending.ack(frame.id, frame.effective_step);
      if (result) {
        logLine(`${result.label} → effective at step ${result.effectiveStep}`, "ok");
      }
      refreshStatus();
    } else if (frame.type === "error") {
      const label = pending.reject(frame.id);
      logLine(`${label ?? "server"}: ${frame.message}`, "err");
      refreshStatus();
    } else if (frame.type === "done") {
      view.done = true;
      logLine(`scenario finished at step ${frame.step}`);
    }
  });

  socket.connect();
}

boot().catch((err) => {
  document.body.innerHTML = `<pre>dashboard failed to start: ${err}</pre>`;
});
