// Session state assembled from the node's event stream.
//
// Events carry monotonically increasing ids; the transcript is append-only
// and kept in id order, so a reconnect (snapshot followed by replayed live
// events) can never reorder or duplicate what is already displayed.

import type {
  LinkStateName,
  MediaStateName,
  NodeEvent,
} from "./protocol";

export interface TranscriptEntry {
  dir: "tx" | "rx";
  char: string;
  id: number;
}

export interface Toast {
  reason: string;
  id: number;
}

export interface SessionView {
  connected: boolean; // websocket to the node is up
  address: number | null;
  state: LinkStateName;
  peer: number | null;
  media: MediaStateName;
  lastDecision: string | null;
  transcript: TranscriptEntry[];
  toasts: Toast[];
  lastEventId: number;
}

export function initialView(): SessionView {
  return {
    connected: false,
    address: null,
    state: "idle",
    peer: null,
    media: "idle",
    lastDecision: null,
    transcript: [],
    toasts: [],
    lastEventId: 0,
  };
}

export function canSend(view: SessionView): boolean {
  return view.connected && view.state === "established";
}

let toastCounter = 0;

export function applyEvent(view: SessionView, event: NodeEvent): SessionView {
  const next = { ...view, transcript: view.transcript, toasts: view.toasts };
  switch (event.kind) {
    case "status": {
      if (event.state !== undefined) next.state = event.state;
      if (event.peer !== undefined) next.peer = event.peer;
      if (event.media !== undefined) next.media = event.media;
      if (event.address !== undefined) next.address = event.address;
      if (event.decision !== undefined) next.lastDecision = event.decision;
      break;
    }
    case "handshake": {
      next.state = event.to_state;
      next.peer = event.peer;
      break;
    }
    case "tx_char":
    case "rx_char": {
      // Ignore anything at or before what we already hold: replays after a
      // reconnect must not duplicate entries.
      const last = view.transcript[view.transcript.length - 1];
      if (!last || event.id > last.id) {
        next.transcript = [
          ...view.transcript,
          {
            dir: event.kind === "tx_char" ? "tx" : "rx",
            char: event.char,
            id: event.id,
          },
        ];
      }
      break;
    }
    case "error": {
      next.toasts = [...view.toasts, { reason: event.reason, id: toastCounter++ }];
      break;
    }
  }
  if (event.id !== undefined && event.id > next.lastEventId) {
    next.lastEventId = event.id;
  }
  return next;
}

export function dismissToast(view: SessionView, id: number): SessionView {
  return { ...view, toasts: view.toasts.filter((t) => t.id !== id) };
}

export function setConnected(view: SessionView, connected: boolean): SessionView {
  return { ...view, connected };
}

export function receivePane(view: SessionView): TranscriptEntry[] {
  return view.transcript.filter((entry) => entry.dir === "rx");
}

export function transmitPane(view: SessionView): TranscriptEntry[] {
  return view.transcript.filter((entry) => entry.dir === "tx");
}
