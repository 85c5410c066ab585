function initialView() {
  return {
    connected: false,
    address: null,
    state: "idle",
    peer: null,
    media: "idle",
    lastDecision: null,
    transcript: [],
    toasts: [],
    lastEventId: 0
  };
}
function canSend(view) {
  return view.connected && view.state === "established";
}
let toastCounter = 0;
function applyEvent(view, event) {
  const next = { ...view, transcript: view.transcript, toasts: view.toasts };
  switch (event.kind) {
    case "status": {
      if (event.state !== void 0) next.state = event.state;
      if (event.peer !== void 0) next.peer = event.peer;
      if (event.media !== void 0) next.media = event.media;
      if (event.address !== void 0) next.address = event.address;
      if (event.decision !== void 0) next.lastDecision = event.decision;
      break;
    }
    case "handshake": {
      next.state = event.to_state;
      next.peer = event.peer;
      break;
    }
    case "tx_char":
    case "rx_char": {
      const last = view.transcript[view.transcript.length - 1];
      if (!last || event.id > last.id) {
        next.transcript = [
          ...view.transcript,
          {
            dir: event.kind === "tx_char" ? "tx" : "rx",
            char: event.char,
            id: event.id
          }
        ];
      }
      break;
    }
    case "error": {
      next.toasts = [...view.toasts, { reason: event.reason, id: toastCounter++ }];
      break;
    }
  }
  if (event.id !== void 0 && event.id > next.lastEventId) {
    next.lastEventId = event.id;
  }
  return next;
}
function dismissToast(view, id) {
  return { ...view, toasts: view.toasts.filter((t) => t.id !== id) };
}
function setConnected(view, connected) {
  return { ...view, connected };
}
function receivePane(view) {
  return view.transcript.filter((entry) => entry.dir === "rx");
}
function transmitPane(view) {
  return view.transcript.filter((entry) => entry.dir === "tx");
}
export {
  applyEvent,
  canSend,
  dismissToast,
  initialView,
  receivePane,
  setConnected,
  transmitPane
};
