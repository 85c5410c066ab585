// DOM layer: renders a SessionView and forwards user intent to the client.
//
// Characters are displayed one at a time as they decode on the far side,
// so typing into the transmit pane sends each keystroke immediately.

import { NodeClient } from "./client";
import { foldCharacter, validateAddress } from "./input";
import { SUBSTITUTION } from "./protocol";
import {
  SessionView,
  canSend,
  dismissToast,
  receivePane,
  transmitPane,
} from "./store";

export interface UiRefs {
  root: HTMLElement;
  addressInput: HTMLInputElement;
  connectButton: HTMLButtonElement;
  addressError: HTMLElement;
  badge: HTMLElement;
  mediaIndicator: HTMLElement;
  voiceToggle: HTMLButtonElement;
  transmitInput: HTMLInputElement;
  transmitHint: HTMLElement;
  transmitLog: HTMLElement;
  receiveLog: HTMLElement;
  toasts: HTMLElement;
}

export function buildUi(root: HTMLElement): UiRefs {
  root.innerHTML = `
    <header>
      <h1>slink chat</h1>
      <span id="node-id" class="muted"></span>
    </header>
    <section class="panel" id="connect-panel">
      <label for="address">Peer address</label>
      <input id="address" inputmode="numeric" placeholder="1-63" size="4" />
      <button id="connect">Connect</button>
      <span id="address-error" class="error" hidden></span>
      <span id="badge" class="badge badge-idle">idle</span>
    </section>
    <section class="panel" id="media-panel">
      <button id="voice-toggle">Request voice</button>
      <span id="media-indicator" class="muted">media: idle</span>
    </section>
    <main class="panes">
      <section class="pane">
        <h2>Transmit</h2>
        <input id="transmit" placeholder="type to send" disabled />
        <p id="transmit-hint" class="muted">connect before sending</p>
        <div id="transmit-log" class="log" aria-live="polite"></div>
      </section>
      <section class="pane">
        <h2>Receive</h2>
        <div id="receive-log" class="log" aria-live="polite"></div>
      </section>
    </main>
    <div id="toasts"></div>
  `;
  return {
    root,
    addressInput: root.querySelector("#address")!,
    connectButton: root.querySelector("#connect")!,
    addressError: root.querySelector("#address-error")!,
    badge: root.querySelector("#badge")!,
    mediaIndicator: root.querySelector("#media-indicator")!,
    voiceToggle: root.querySelector("#voice-toggle")!,
    transmitInput: root.querySelector("#transmit")!,
    transmitHint: root.querySelector("#transmit-hint")!,
    transmitLog: root.querySelector("#transmit-log")!,
    receiveLog: root.querySelector("#receive-log")!,
    toasts: root.querySelector("#toasts")!,
  };
}

function renderLog(element: HTMLElement, entries: { char: string; id: number }[]) {
  element.textContent = "";
  for (const entry of entries) {
    const span = document.createElement("span");
    span.className =
      entry.char === SUBSTITUTION ? "char char-substitution" : "char";
    span.textContent = entry.char;
    element.appendChild(span);
  }
}

export function render(refs: UiRefs, view: SessionView): void {
  const nodeId = refs.root.querySelector("#node-id")!;
  nodeId.textContent = view.address !== null
    ? `node ${view.address}${view.connected ? "" : " (reconnecting)"}`
    : view.connected
      ? "node"
      : "connecting to node";

  refs.badge.className = `badge badge-${view.state}`;
  refs.badge.textContent =
    view.state === "established" && view.peer !== null
      ? `established(${view.peer})`
      : view.state;

  const sendable = canSend(view);
  refs.transmitInput.disabled = !sendable;
  refs.transmitHint.hidden = sendable;

  refs.mediaIndicator.textContent =
    `media: ${view.media}` +
    (view.lastDecision ? ` (${view.lastDecision})` : "");
  refs.voiceToggle.textContent =
    view.media === "voice" ? "Release voice" : "Request voice";
  refs.voiceToggle.disabled = !sendable;

  renderLog(refs.transmitLog, transmitPane(view));
  renderLog(refs.receiveLog, receivePane(view));

  refs.toasts.textContent = "";
  for (const toast of view.toasts) {
    const div = document.createElement("div");
    div.className = "toast";
    div.textContent = toast.reason;
    div.dataset.toastId = String(toast.id);
    refs.toasts.appendChild(div);
  }
}

export interface Controller {
  refs: UiRefs;
  view: SessionView;
  update(next: SessionView): void;
}

export function wire(
  refs: UiRefs,
  client: NodeClient,
  getView: () => SessionView,
  setView: (view: SessionView) => void,
): void {
  refs.connectButton.addEventListener("click", () => {
    const address = validateAddress(refs.addressInput.value);
    if (address === null) {
      refs.addressError.textContent = "address must be 1-63";
      refs.addressError.hidden = false;
      return;
    }
    refs.addressError.hidden = true;
    client.connect(address);
  });

  refs.voiceToggle.addEventListener("click", () => {
    if (getView().media === "voice") {
      client.releaseMedia();
    } else {
      client.requestVoice();
    }
  });

  refs.transmitInput.addEventListener("keydown", (keyEvent: KeyboardEvent) => {
    if (keyEvent.key.length !== 1) return; // let navigation keys be
    keyEvent.preventDefault();
    const folded = foldCharacter(keyEvent.key);
    if (folded === null) {
      refs.transmitHint.textContent = `'${keyEvent.key}' is not codable (A-Z, 0-9)`;
      refs.transmitHint.hidden = false;
      return;
    }
    refs.transmitHint.hidden = true;
    client.sendText(folded);
  });

  refs.toasts.addEventListener("click", (clickEvent) => {
    const target = clickEvent.target as HTMLElement;
    if (target.dataset.toastId !== undefined) {
      setView(dismissToast(getView(), Number(target.dataset.toastId)));
    }
  });
}
