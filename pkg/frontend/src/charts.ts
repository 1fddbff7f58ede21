// uPlot panel wiring. Rendering is coalesced per animation frame: apply()
// marks panels dirty and a single rAF callback flushes them.

import uPlot from "uplot";

import { chartData } from "./chartData.js";
import type { SnapshotView } from "./state.js";

const PALETTE = [
  "#2563eb", "#ea580c", "#16a34a", "#dc2626", "#7c3aed", "#0891b2",
  "#ca8a04", "#db2777", "#4b5563", "#059669", "#9333ea", "#b91c1c",
];

interface Panel {
  plot: uPlot;
  channels: string[];
}

export class ChartDeck {
  private panels: Panel[] = [];
  private view: SnapshotView;
  private dirty = false;

  constructor(view: SnapshotView) {
    this.view = view;
  }

  addPanel(
    host: HTMLElement,
    title: string,
    unit: string,
    channels: { name: string; label: string }[],
    opts: Partial<uPlot.Options> = {},
  ): void {
    const series: uPlot.Series[] = [
      { label: "step (s)" },
      ...channels.map((c, i) => ({
        label: c.label,
        stroke: PALETTE[i % PALETTE.length],
        width: 1.5,
        spanGaps: false,
        points: { show: false },
      })),
    ];
    const options: uPlot.Options = {
      title: `${title} (${unit})`,
      width: Math.max(320, host.clientWidth || 560),
      height: 180,
      series,
      scales: { x: { time: false } },
      axes: [{ label: "step (s)" }, { label: unit }],
      legend: { show: channels.length > 1 },
      ...opts,
    };
    const names = channels.map((c) => c.name);
    const plot = new uPlot(options, chartData(this.view, names) as uPlot.AlignedData, host);
    this.panels.push({ plot, channels: names });
  }

  markDirty(): void {
    if (this.dirty) return;
    this.dirty = true;
    requestAnimationFrame(() => this.flush());
  }

  flush(): void {
    this.dirty = false;
    for (const panel of this.panels) {
      panel.plot.setData(chartData(this.view, panel.channels) as uPlot.AlignedData);
    }
  }
}
