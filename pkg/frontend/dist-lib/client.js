class NodeClient {
  constructor(opts) {
    this.socket = null;
    this.closed = false;
    this.opts = opts;
  }
  start() {
    this.closed = false;
    this.dial();
  }
  stop() {
    this.closed = true;
    this.socket?.close();
    this.socket = null;
  }
  dial() {
    const factory = this.opts.socketFactory ?? ((url) => new WebSocket(url));
    const socket = factory(this.opts.url);
    this.socket = socket;
    socket.onopen = () => this.opts.onOpen?.();
    socket.onmessage = (msg) => {
      let event;
      try {
        event = JSON.parse(String(msg.data));
      } catch {
        return;
      }
      this.opts.onEvent(event);
    };
    socket.onclose = () => {
      this.opts.onClose?.();
      if (!this.closed) {
        setTimeout(() => this.dial(), this.opts.reconnectDelayMs ?? 1e3);
      }
    };
    socket.onerror = () => socket.close();
  }
  send(command) {
    if (!this.socket || this.socket.readyState !== 1) {
      return false;
    }
    this.socket.send(JSON.stringify(command));
    return true;
  }
  connect(dst) {
    return this.send({ cmd: "connect", dst });
  }
  sendText(text) {
    return this.send({ cmd: "send_text", text });
  }
  requestVoice() {
    return this.send({ cmd: "request_voice" });
  }
  releaseMedia() {
    return this.send({ cmd: "release_media" });
  }
}
export {
  NodeClient
};
