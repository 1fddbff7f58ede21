// Thin websocket client for the live session. The WebSocket constructor
// is injectable so the logic is testable without a browser. Reconnects
// with a fixed backoff; consumers learn about connection state through
// the status callback and freeze/badge the UI while disconnected.

import type { Command, ServerFrame } from "./protocol.js";
import { parseFrame } from "./protocol.js";

export type SocketStatus = "connecting" | "open" | "closed";

export interface WebSocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
}

export type WebSocketFactory = (url: string) => WebSocketLike;

export class LiveSocket {
  private url: string;
  private factory: WebSocketFactory;
  private ws: WebSocketLike | null = null;
  private frameHandlers: ((frame: ServerFrame) => void)[] = [];
  private statusHandlers: ((status: SocketStatus) => void)[] = [];
  private reconnectMs: number;
  private closedByUser = false;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(url: string, factory?: WebSocketFactory, reconnectMs = 2000) {
    this.url = url;
    this.factory =
      factory ??
      ((u) => new WebSocket(u) as unknown as WebSocketLike);
    this.reconnectMs = reconnectMs;
  }

  onFrame(cb: (frame: ServerFrame) => void): void {
    this.frameHandlers.push(cb);
  }

  onStatus(cb: (status: SocketStatus) => void): void {
    this.statusHandlers.push(cb);
  }

  private emitStatus(status: SocketStatus): void {
    for (const cb of this.statusHandlers) cb(status);
  }

  connect(): void {
    this.closedByUser = false;
    this.emitStatus("connecting");
    this.ws = this.factory(this.url);
    this.ws.onopen = () => this.emitStatus("open");
    this.ws.onmessage = (ev) => {
      const frame = parseFrame(ev.data);
      if (frame) {
        for (const cb of this.frameHandlers) cb(frame);
      }
    };
    this.ws.onclose = () => {
      this.ws = null;
      this.emitStatus("closed");
      if (!this.closedByUser) {
        this.timer = setTimeout(() => this.connect(), this.reconnectMs);
      }
    };
  }

  /** Serialise and send one command; false while disconnected. */
  send(command: Command): boolean {
    if (!this.ws) return false;
    this.ws.send(JSON.stringify(command));
    return true;
  }

  close(): void {
    this.closedByUser = true;
    if (this.timer !== null) clearTimeout(this.timer);
    this.ws?.close();
    this.ws = null;
  }
}
