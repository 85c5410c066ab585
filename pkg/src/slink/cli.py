"""Command line front end: run a node daemon or drive one remotely.

`slink run` starts the long-running node service; every other
subcommand is a thin HTTP/WebSocket client against a running node.

Exit codes: 0 clean, 1 configuration error, 2 runtime fatal.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import ConfigError, SlinkError

DEFAULT_NODE_URL = "http://127.0.0.1:8800"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slink", description="software-defined two-node link simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="start a node daemon")
    run.add_argument("--config", help="JSON config file")
    run.add_argument("--address", type=int, help="node address (1-63)")
    run.add_argument("--listen", help="node-to-node UDP endpoint host:port")
    run.add_argument("--peer", help="peer UDP endpoint host:port")
    run.add_argument("--ui", help="UI HTTP endpoint host:port")
    run.add_argument("--profile", choices=("baseband", "fsk", "dsss"))
    run.add_argument("--snr-db", type=float, help="channel AWGN level")
    run.add_argument("--seed", type=int, help="channel noise seed")
    run.add_argument("--log", help="chat log path (line-delimited JSON)")

    for name, helptext in (
        ("status", "print node status"),
        ("connect", "request a connection"),
        ("send", "transmit chat text"),
        ("media", "request or release the voice/data channel"),
        ("watch", "stream UI events to stdout"),
    ):
        cmd = sub.add_parser(name, help=helptext)
        cmd.add_argument("--node", default=DEFAULT_NODE_URL, help="node base URL")
        if name == "connect":
            cmd.add_argument("dst", type=int, help="destination address (1-63)")
        elif name == "send":
            cmd.add_argument("text", help="message text (A-Z, 0-9)")
        elif name == "media":
            cmd.add_argument("action", choices=("voice", "data", "release"))

    # Offline tone codec, for corpus round trips against fixture files.
    dtmf = sub.add_parser("dtmf", help="encode/decode tone messages offline")
    dtmf_sub = dtmf.add_subparsers(dest="dtmf_command", required=True)
    enc = dtmf_sub.add_parser("encode", help="text -> waveform fixture file")
    enc.add_argument("text", help="message text (A-Z, 0-9)")
    enc.add_argument("-o", "--output", required=True, help="fixture file to write")
    dec = dtmf_sub.add_parser("decode", help="waveform fixture file -> text")
    dec.add_argument("input", help="fixture file to read")
    return parser


def _load_config(args) -> "NodeConfig":
    from .channel import ChannelConfig
    from .node import NodeConfig

    if args.config:
        cfg = NodeConfig.from_file(args.config)
    else:
        if args.address is None:
            raise ConfigError("either --config or --address is required")
        cfg = NodeConfig(address=args.address)

    overrides = {}
    for attr, key in (
        ("address", "address"),
        ("listen", "listen"),
        ("peer", "peer"),
        ("ui", "ui"),
        ("profile", "profile"),
        ("log", "log_path"),
    ):
        value = getattr(args, attr)
        if value is not None:
            overrides[key] = value
    channel = cfg.channel
    if args.snr_db is not None or args.seed is not None:
        import dataclasses

        channel = dataclasses.replace(
            channel,
            **({"snr_db": args.snr_db} if args.snr_db is not None else {}),
            **({"seed": args.seed} if args.seed is not None else {}),
        )
    import dataclasses

    return dataclasses.replace(cfg, channel=channel, **overrides)


def _cmd_run(args) -> int:
    import uvicorn

    from .node import NodeRuntime, parse_endpoint
    from .service import create_app

    logging.basicConfig(
        level=logging.INFO, format="%(asctime)s %(name)s %(levelname)s %(message)s"
    )
    cfg = _load_config(args)
    runtime = NodeRuntime(cfg)
    try:
        runtime.start()
    except SlinkError as exc:
        print(f"startup refused: {exc}", file=sys.stderr)
        return 1
    host, port = parse_endpoint(cfg.ui)
    server = uvicorn.Server(
        uvicorn.Config(create_app(runtime), host=host, port=port, log_level="warning")
    )
    try:
        server.run()
    except KeyboardInterrupt:
        pass
    finally:
        runtime.stop()
    if not server.started:
        print(f"could not serve the UI on {cfg.ui}", file=sys.stderr)
        return 1
    return 0


def _post(url: str, payload: dict) -> int:
    import httpx

    response = httpx.post(url, json=payload, timeout=5.0)
    if response.status_code >= 400:
        print(f"node refused: {response.status_code} {response.text}", file=sys.stderr)
        return 2
    print(response.text)
    return 0


def _cmd_status(args) -> int:
    import httpx

    response = httpx.get(f"{args.node}/status", timeout=5.0)
    print(json.dumps(response.json(), indent=2))
    return 0


def _cmd_watch(args) -> int:
    from websockets.sync.client import connect

    ws_url = args.node.replace("http://", "ws://").replace("https://", "wss://")
    with connect(f"{ws_url}/ws") as ws:
        try:
            while True:
                print(ws.recv(), flush=True)
        except KeyboardInterrupt:
            pass
    return 0


def _cmd_dtmf(args) -> int:
    from .dtmf import decode_message, encode_message
    from .waveform import read_fixture, write_fixture

    if args.dtmf_command == "encode":
        write_fixture(args.output, encode_message(args.text))
        print(f"wrote {args.output}")
        return 0
    print(decode_message(read_fixture(args.input)))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "status":
            return _cmd_status(args)
        if args.command == "connect":
            return _post(f"{args.node}/connect", {"dst": args.dst})
        if args.command == "send":
            return _post(f"{args.node}/send", {"text": args.text})
        if args.command == "media":
            return _post(f"{args.node}/media", {"action": args.action})
        if args.command == "watch":
            return _cmd_watch(args)
        if args.command == "dtmf":
            return _cmd_dtmf(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except SlinkError as exc:
        print(f"fatal: {exc}", file=sys.stderr)
        return 2
    except ConnectionError as exc:
        print(f"cannot reach node: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
