import { NodeClient } from "./client";
import { applyEvent, initialView, setConnected } from "./store";
import { buildUi, render, wire } from "./ui";
import "./style.css";

function nodeWsUrl(): string {
  const params = new URLSearchParams(window.location.search);
  const node = params.get("node") ?? "127.0.0.1:8800";
  return `ws://${node}/ws`;
}

const root = document.getElementById("app")!;
const refs = buildUi(root);

let view = initialView();
const update = (next: typeof view) => {
  view = next;
  render(refs, view);
};

const client = new NodeClient({
  url: nodeWsUrl(),
  onEvent: (event) => update(applyEvent(view, event)),
  onOpen: () => update(setConnected(view, true)),
  onClose: () => update(setConnected(view, false)),
});

wire(refs, client, () => view, update);
render(refs, view);
client.start();
