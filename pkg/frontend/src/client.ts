// WebSocket client for one node. Reconnects with a fixed backoff; the node
// replays a status snapshot on every (re)connect, so the store heals itself.

import type { Command, NodeEvent } from "./protocol";

export type SocketFactory = (url: string) => WebSocket;

export interface NodeClientOptions {
  url: string; // ws://host:port/ws
  onEvent: (event: NodeEvent) => void;
  onOpen?: () => void;
  onClose?: () => void;
  socketFactory?: SocketFactory;
  reconnectDelayMs?: number;
}

export class NodeClient {
  private socket: WebSocket | null = null;
  private closed = false;
  private readonly opts: Required<Pick<NodeClientOptions, "url" | "onEvent">> &
    NodeClientOptions;

  constructor(opts: NodeClientOptions) {
    this.opts = opts;
  }

  start(): void {
    this.closed = false;
    this.dial();
  }

  stop(): void {
    this.closed = true;
    this.socket?.close();
    this.socket = null;
  }

  private dial(): void {
    const factory = this.opts.socketFactory ?? ((url) => new WebSocket(url));
    const socket = factory(this.opts.url);
    this.socket = socket;

    socket.onopen = () => this.opts.onOpen?.();
    socket.onmessage = (msg: MessageEvent) => {
      let event: NodeEvent;
      try {
        event = JSON.parse(String(msg.data));
      } catch {
        return; // not ours; ignore
      }
      this.opts.onEvent(event);
    };
    socket.onclose = () => {
      this.opts.onClose?.();
      if (!this.closed) {
        setTimeout(() => this.dial(), this.opts.reconnectDelayMs ?? 1000);
      }
    };
    socket.onerror = () => socket.close();
  }

  send(command: Command): boolean {
    if (!this.socket || this.socket.readyState !== 1 /* OPEN */) {
      return false;
    }
    this.socket.send(JSON.stringify(command));
    return true;
  }

  connect(dst: number): boolean {
    return this.send({ cmd: "connect", dst });
  }

  sendText(text: string): boolean {
    return this.send({ cmd: "send_text", text });
  }

  requestVoice(): boolean {
    return this.send({ cmd: "request_voice" });
  }

  releaseMedia(): boolean {
    return this.send({ cmd: "release_media" });
  }
}
