"""`sim` command-line client.

The CLI is a thin client of the experiment service: it builds the same
request models the HTTP API accepts and talks to an in-process service
instance by default, or to a remote one via --server. File outputs are
written client-side from the returned report.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

import httpx

from .metrics import emit
from .scenarios import SCENARIO_ALIASES, ConfigError, read_config_file

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2

_CLI_SCENARIOS = ("vanilla1", "vanilla2", "vanilla3", "delay-tolerant", "reflexive-push")
_TOP_LEVEL_KEYS = {"scenario", "retx", "loss", "requests", "seed"}


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server.rstrip("/"), timeout=600.0)
    # In-process mode: drive the ASGI app directly over the same HTTP surface.
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import app  # local import keeps plain library use light

    return TestClient(app)


def _parse_seeds(text: str) -> list[int]:
    text = text.strip()
    if ".." in text:
        lo, _, hi = text.partition("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",") if part.strip()]


def _gather_request(args: argparse.Namespace) -> dict[str, Any]:
    values: dict[str, Any] = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for key in ("scenario", "retx", "loss", "requests", "seed"):
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    for assignment in getattr(args, "set", None) or []:
        if "=" not in assignment:
            raise ConfigError(f"--set expects key=value, got {assignment!r}")
        key, _, raw = assignment.partition("=")
        values[key.strip()] = raw.strip()
    if "scenario" not in values:
        raise ConfigError("a scenario is required (--scenario or config file)")
    scenario = str(values.pop("scenario"))
    if scenario not in SCENARIO_ALIASES:
        raise ConfigError(f"unknown scenario {scenario!r}")

    payload: dict[str, Any] = {"scenario": scenario}
    options: dict[str, Any] = {}
    for key, value in values.items():
        if key in _TOP_LEVEL_KEYS:
            payload[key] = value
        else:
            options[key] = value
    if options:
        payload["options"] = options
    return payload


def _fail(response: httpx.Response) -> int:
    try:
        detail = response.json().get("detail", response.text)
    except Exception:
        detail = response.text
    if isinstance(detail, list):  # pydantic validation errors
        detail = "; ".join(
            f"{'.'.join(str(p) for p in err.get('loc', []))}: {err.get('msg', '')}"
            for err in detail
        )
    print(f"error: {detail}", file=sys.stderr)
    return EXIT_CONFIG if response.status_code in (400, 422) else EXIT_ERROR


def _cmd_run(args: argparse.Namespace) -> int:
    payload = _gather_request(args)
    with _client(args.server) as client:
        response = client.post("/run", json=payload)
    if response.status_code != 200:
        return _fail(response)
    body = response.json()
    summary = body["summary"]
    if args.out:
        fmts = ("csv", "json") if args.format == "both" else (args.format,)
        for fmt in fmts:
            emit(body["report"], fmt, args.out)
    rate = summary["success_rate"]
    rate_text = "n/a" if rate is None else f"{rate:.4f}"
    tx = summary["tx_per_content"].get("total")
    tx_text = "n/a" if tx is None else f"{tx:.2f}"
    print(
        f"{summary['scenario']} retx={summary['retx_mode']} loss={summary['loss']:g} "
        f"seed={summary['seed']} n={summary['requests']}: "
        f"success_rate={rate_text} tx_per_content={tx_text}"
    )
    if args.out:
        print(f"wrote {args.format} output to {Path(args.out).resolve()}")
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    payload = _gather_request(args)
    payload.pop("seed", None)
    payload["seeds"] = _parse_seeds(args.seeds)
    with _client(args.server) as client:
        response = client.post("/sweep", json=payload)
    if response.status_code != 200:
        return _fail(response)
    body = response.json()
    for agg in body["aggregates"]:
        print(
            f"{agg['metric']}: mean={agg['mean']:.4f} std={agg['std']:.4f} "
            f"ci99=+-{agg['ci99_halfwidth']:.4f}"
        )
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "sweep.json").write_text(json.dumps(body, sort_keys=True, indent=2) + "\n")
        print(f"wrote sweep.json to {out.resolve()}")
    return EXIT_OK


def _cmd_energy(args: argparse.Namespace) -> int:
    with _client(args.server) as client:
        if args.protocol:
            response = client.get(f"/energy/{args.protocol}")
        else:
            response = client.get("/energy")
    if response.status_code == 404:
        print(f"error: {response.json()['detail']}", file=sys.stderr)
        return EXIT_CONFIG
    if response.status_code != 200:
        return _fail(response)
    rows = response.json()
    if isinstance(rows, dict):
        rows = [rows]
    for row in rows:
        print(
            f"{row['protocol']}: {row['energy_mj_per_msf']:.2f} mJ/msf -> "
            f"{row['lifetime_days']:.1f} days"
        )
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute one scenario and emit metrics")
    run_p.add_argument("--scenario", choices=_CLI_SCENARIOS)
    run_p.add_argument("--retx", choices=("inr", "cr"))
    run_p.add_argument("--loss", type=float)
    run_p.add_argument("--requests", type=int)
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--out", help="directory for emitted metric files")
    run_p.add_argument("--config", help="flat key = value experiment file")
    run_p.add_argument("--format", choices=("csv", "json", "both"), default="csv")
    run_p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config key")
    run_p.add_argument("--server", help="remote service URL (default: in-process)")
    run_p.set_defaults(fn=_cmd_run)

    sweep_p = sub.add_parser("sweep", help="run one configuration across many seeds")
    sweep_p.add_argument("--seeds", required=True, help='e.g. "1..20" or "1,5,9"')
    sweep_p.add_argument("--scenario", choices=_CLI_SCENARIOS)
    sweep_p.add_argument("--retx", choices=("inr", "cr"))
    sweep_p.add_argument("--loss", type=float)
    sweep_p.add_argument("--requests", type=int)
    sweep_p.add_argument("--out")
    sweep_p.add_argument("--config")
    sweep_p.add_argument("--set", action="append", metavar="KEY=VALUE")
    sweep_p.add_argument("--server")
    sweep_p.set_defaults(fn=_cmd_sweep)

    energy_p = sub.add_parser("energy", help="battery lifetime per protocol variant")
    energy_p.add_argument("--protocol")
    energy_p.add_argument("--server")
    energy_p.set_defaults(fn=_cmd_energy)

    serve_p = sub.add_parser("serve", help="start the HTTP service")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.set_defaults(fn=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except httpx.HTTPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
