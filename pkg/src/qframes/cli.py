"""Command-line client.

Each subcommand builds a request payload from its flags, overlays the
``--config`` file (config wins), and runs it in-process or against a
running service (``--server``). Records go to stdout one JSON object per
line; diagnostics go to stderr.

Exit codes: 0 success, 1 domain error, 2 config error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

import yaml

from . import __version__
from .errors import QFramesError
from .service.handlers import COMMANDS, ConfigError, run_command

FORMAT_ENV = "QFRAMES_FORMAT"


class RemoteError(Exception):
    def __init__(self, name: str, detail: str, code: int):
        super().__init__(detail)
        self.name, self.detail, self.code = name, detail, code


def _json_arg(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"invalid JSON: {exc.msg}") from None


def _csv_arg(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


# flag name -> (payload key, argparse kwargs); None default means "not given"
_COMMON = {
    "encode": [
        ("--k", dict(type=int)),
        ("--text", dict()),
        ("--value", dict(help="rational such as 1/3 or -12.71")),
    ],
    "arith": [
        ("--k", dict(type=int)),
        ("--op", dict()),
        ("--a", dict()),
        ("--b", dict()),
        ("--L", dict(type=int)),
        ("--m", dict(type=int)),
    ],
    "convert": [
        ("--k", dict(type=int)),
        ("--a", dict()),
        ("--to", dict(type=int)),
        ("--prefix-digits", dict(type=int)),
    ],
    "cauchy": [
        ("--k", dict(type=int)),
        ("--mode", dict()),
        ("--sequence", dict(type=_json_arg, help='JSON, e.g. {"family":"truncation","value":"1/3"}')),
        ("--other", dict(type=_json_arg)),
        ("--ell-max", dict(type=int)),
        ("--p-max", dict(type=int)),
        ("--n", dict(type=int)),
    ],
    "lattice": [
        ("--k", dict(type=int)),
        ("--L", dict(type=int)),
        ("--m", dict(type=int)),
        ("--D", dict(type=int)),
        ("--j", dict(type=int)),
        ("--g", dict()),
    ],
    "evolve": [
        ("--lattice", dict(type=_json_arg, help='JSON, e.g. {"k":2,"L":4,"m":0,"D":1}')),
        ("--initial", dict(type=_json_arg, help='JSON, e.g. {"family":"point","index":[3]}')),
        ("--potential", dict(type=_json_arg)),
        ("--dt", dict(type=float)),
        ("--steps", dict(type=int)),
        ("--boundary", dict()),
        ("--mass", dict(type=float)),
        ("--hbar", dict(type=float)),
        ("--energy-model", dict()),
        ("--site-cap", dict(type=int)),
    ],
    "energy": [
        ("--k", dict(type=int)),
        ("--model", dict()),
        ("--scale", dict(type=float)),
        ("--states", dict(type=_csv_arg, help="comma-separated compact states")),
        ("--tuple-states", dict(type=_csv_arg)),
        ("--sequence", dict(type=_json_arg)),
        ("--n-max", dict(type=int)),
    ],
    "frames": [
        ("--topology", dict(type=_json_arg, help='JSON, e.g. {"kind":"cyclic","period":3}')),
        ("--frames", dict(type=_json_arg, help='JSON list of {"j","k","g"}')),
        ("--queries", dict(type=_json_arg)),
    ],
}
_COMMON["image"] = _COMMON["lattice"] + [("--limit", dict(type=int))]

_SWITCHES = {
    "image": [("--space-only", "include_time", False)],
    "evolve": [
        ("--unitary-reference", "unitary_reference", True),
        ("--image-labels", "image_labels", True),
        ("--dump-states", "dump_states", True),
    ],
}


def _key(flag: str) -> str:
    return flag.lstrip("-").replace("-", "_")


def build_parser() -> argparse.ArgumentParser:
    glob = argparse.ArgumentParser(add_help=False)
    glob.add_argument("--config", type=Path, help="JSON or YAML request file; overrides flags")
    glob.add_argument("--format", choices=("json", "table"), default=None,
                      help=f"output format (default: ${FORMAT_ENV} or json)")
    glob.add_argument("--output", type=Path, help="write records here instead of stdout")
    glob.add_argument("--server", help="base URL of a running qframes service")
    glob.add_argument("--seed", type=int, help="seed for randomized initial states")
    glob.add_argument("--quiet", action="store_true", help="no version banner")

    p = argparse.ArgumentParser(prog="qframes", description="qukit-string numerals, frames and lattice dynamics")
    p.add_argument("--version", action="version", version=f"qframes {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[glob])
        for flag, kw in _COMMON.get(name, []):
            sp.add_argument(flag, dest=_key(flag), default=None, **kw)
        for flag, dest, val in _SWITCHES.get(name, []):
            sp.add_argument(flag, dest=dest, action="store_const", const=val, default=None)
    srv = sub.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    return p


_GLOBAL_KEYS = {"config", "format", "output", "server", "seed", "quiet", "command"}


def load_config(path: Path) -> dict:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text) if path.suffix in (".yaml", ".yml") else json.loads(text)
    except (yaml.YAMLError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    return data


def build_payload(args: argparse.Namespace) -> dict:
    payload = {k: v for k, v in vars(args).items() if k not in _GLOBAL_KEYS and v is not None}
    if args.seed is not None:
        payload["seed"] = args.seed
    if args.config is not None:
        payload.update(load_config(args.config))
    return payload


def _remote(server: str, command: str, payload: dict) -> list[dict]:
    import httpx

    try:
        r = httpx.post(f"{server.rstrip('/')}/run/{command}", json=payload, timeout=600)
    except httpx.HTTPError as exc:
        raise RemoteError("ConnectionError", str(exc), 2) from None
    body = r.json()
    if r.status_code == 200:
        return body["records"]
    raise RemoteError(body.get("error", "HTTPError"), body.get("detail", r.text), 1 if r.status_code == 400 else 2)


def render_table(records: list[dict]) -> str:
    if not records:
        return ""
    cols: list[str] = []
    for r in records:
        cols.extend(c for c in r if c not in cols)

    def cell(v):
        return v if isinstance(v, str) else json.dumps(v, sort_keys=True)

    rows = [[cell(r.get(c, "")) for c in cols] for r in records]
    widths = [max(len(c), *(len(row[i]) for row in rows)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


def render(records: list[dict], fmt: str) -> str:
    if fmt == "table":
        return render_table(records)
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)


def _fail(name: str, detail: str, code: int) -> int:
    print(json.dumps({"error": name, "detail": detail}, sort_keys=True), file=sys.stderr)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        uvicorn.run("qframes.service.api:app", host=args.host, port=args.port)
        return 0
    if not args.quiet:
        print(f"qframes {__version__}", file=sys.stderr)
    fmt = args.format or os.environ.get(FORMAT_ENV, "json")
    if fmt not in ("json", "table"):
        return _fail("ConfigError", f"{FORMAT_ENV} must be json or table, got {fmt!r}", 2)
    try:
        payload = build_payload(args)
        if args.server:
            records = _remote(args.server, args.command, payload)
        else:
            records = run_command(args.command, payload)
    except ConfigError as exc:
        return _fail("ConfigError", str(exc), 2)
    except RemoteError as exc:
        return _fail(exc.name, exc.detail, exc.code)
    except QFramesError as exc:
        return _fail(exc.name, str(exc), 1)
    except (ValueError, ArithmeticError) as exc:
        return _fail(type(exc).__name__, str(exc), 1)
    text = render(records, fmt)
    if args.output:
        args.output.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
