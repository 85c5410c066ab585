// JSON message shapes spoken by the node's /ws endpoint.

export type LinkStateName = "idle" | "awaitingack" | "established" | "failed";
export type MediaStateName = "idle" | "voice" | "data";

export interface StatusEvent {
  kind: "status";
  id: number;
  snapshot?: boolean;
  address?: number;
  profile?: string;
  state?: LinkStateName;
  peer?: number | null;
  media?: MediaStateName;
  decision?: string;
  voice_marker?: boolean;
}

export interface HandshakeEvent {
  kind: "handshake";
  id: number;
  from_state: LinkStateName;
  to_state: LinkStateName;
  peer: number | null;
}

export interface CharEvent {
  kind: "tx_char" | "rx_char";
  id: number;
  ts?: number;
  char: string;
}

export interface ErrorEvent {
  kind: "error";
  id?: number;
  reason: string;
}

export type NodeEvent = StatusEvent | HandshakeEvent | CharEvent | ErrorEvent;

export type Command =
  | { cmd: "connect"; dst: number }
  | { cmd: "send_text"; text: string }
  | { cmd: "request_voice" }
  | { cmd: "release_media" };

// The tone alphabet the node can carry; everything else is refused client-side.
export const CHARSET = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

// Rendered for bursts the peer's decoder could not identify.
export const SUBSTITUTION = "?";
