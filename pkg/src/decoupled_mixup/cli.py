"""Batch CLI: a thin client for the HTTP service.

Without --server, requests are handled by an in-process instance of the
service over an ASGI transport, so no daemon is needed; with --server they go
to a remote instance, which must share a filesystem with the caller for batch
runs (paths travel in the request, images do not).

Exit codes: 0 success, 1 at least one item failed, 2 invalid config/manifest.
Set DECOUPLED_MIX_LOG=debug|info|warning|error to control log verbosity.
"""

from __future__ import annotations

import argparse
import base64
import logging
import os
import sys
from pathlib import Path

import httpx

LOG_ENV_VAR = "DECOUPLED_MIX_LOG"

logger = logging.getLogger("decoupled_mixup.cli")


def _configure_logging() -> None:
    level_name = os.environ.get(LOG_ENV_VAR, "warning").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(name)s %(levelname)s %(message)s")


def parse_grid_spec(spec: str) -> tuple[list[float], list[float]]:
    """Parse "l1,l2,...xa1,a2,..." into (lambda list, alpha list)."""
    parts = spec.split("x")
    if len(parts) != 2:
        raise ValueError("grid spec must look like '0.25,0.5,0.75x0.2,0.6'")
    try:
        lambdas = [float(v) for v in parts[0].split(",") if v.strip()]
        alphas = [float(v) for v in parts[1].split(",") if v.strip()]
    except ValueError:
        raise ValueError(f"grid spec contains a non-numeric value: {spec!r}") from None
    if not lambdas or not alphas:
        raise ValueError("grid spec needs at least one lambda and one alpha")
    return lambdas, alphas


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decoupled-mixup",
        description="Mix image pairs from a manifest and write images, fused "
        "soft labels and run reports; or render a parameter-sweep grid.",
    )
    parser.add_argument(
        "--mode", required=True, choices=["mixup", "cutmix", "fd", "cd", "style"]
    )
    parser.add_argument("--manifest", required=True, help="input manifest (JSON lines)")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=0, help="64-bit run seed")
    parser.add_argument(
        "--beta", type=float, default=1.0, help="Beta shape for the lambda_v draw"
    )
    parser.add_argument(
        "--alpha",
        type=float,
        default=None,
        help="common-pattern weight (default 0.2, or 1.0 in cd mode)",
    )
    parser.add_argument(
        "--lambda-v", type=float, default=None, help="fix lambda_v instead of drawing"
    )
    parser.add_argument(
        "--lambda-delta",
        type=float,
        default=None,
        help="fix lambda_delta instead of drawing",
    )
    parser.add_argument(
        "--phase-source", choices=["first", "second"], default="first"
    )
    parser.add_argument(
        "--grid",
        default=None,
        metavar="SPEC",
        help="render a sweep grid instead of a batch: 'l1,l2,...xa1,a2,...'",
    )
    parser.add_argument("--jobs", type=int, default=1, help="parallel workers")
    parser.add_argument("--format", choices=["png", "ppm"], default="png")
    parser.add_argument(
        "--server",
        default=None,
        metavar="URL",
        help="send requests to a running service instead of in-process",
    )
    return parser


def _open_client(server: str | None):
    if server is not None:
        return httpx.Client(base_url=server, timeout=600.0)
    # In-process transport: same HTTP surface, no socket. The import is
    # scoped here and its deprecation chatter silenced so plain CLI runs
    # stay quiet.
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import create_app

    return TestClient(create_app())


def _run_grid(client, args) -> int:
    lambdas, alphas = parse_grid_spec(args.grid)
    payload = {
        "manifest": str(Path(args.manifest).resolve()),
        "mode": args.mode,
        "lambdas": lambdas,
        "alphas": alphas,
        "phase_source": args.phase_source,
        "seed": args.seed,
    }
    if args.lambda_delta is not None:
        payload["lambda_delta"] = args.lambda_delta
    response = client.post("/grid", json=payload)
    if response.status_code != 200:
        print(f"grid request failed: {_detail(response)}", file=sys.stderr)
        return 2
    body = response.json()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    grid_path = out_dir / "grid.png"
    grid_path.write_bytes(base64.b64decode(body["image"]))
    print(f"wrote {body['height']}x{body['width']} grid to {grid_path}")
    return 0


def _run_batch(client, args) -> int:
    payload = {
        "manifest": str(Path(args.manifest).resolve()),
        "out": str(Path(args.out).resolve()),
        "mode": args.mode,
        "seed": args.seed,
        "beta_shape": args.beta,
        "alpha": args.alpha,
        "lambda_v": args.lambda_v,
        "lambda_delta": args.lambda_delta,
        "phase_source": args.phase_source,
        "image_format": args.format,
        "jobs": args.jobs,
    }
    response = client.post("/runs", json=payload)
    if response.status_code != 200:
        print(f"run request failed: {_detail(response)}", file=sys.stderr)
        return 2
    body = response.json()
    for warning in body["warnings"]:
        logger.warning("%s", warning)
    for failure in body["failures"]:
        print(f"item {failure['index']} failed: {failure['error']}", file=sys.stderr)
    print(
        f"{body['total']} items: {body['ok']} ok, {body['failed']} failed "
        f"-> {body['output_dir']}"
    )
    return 1 if body["failed"] > 0 else 0


def _detail(response) -> str:
    try:
        return str(response.json().get("detail"))
    except ValueError:
        return response.text


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    if args.grid is not None:
        try:
            parse_grid_spec(args.grid)
        except ValueError as exc:
            print(str(exc), file=sys.stderr)
            return 2
    try:
        with _open_client(args.server) as client:
            if args.grid is not None:
                return _run_grid(client, args)
            return _run_batch(client, args)
    except httpx.HTTPError as exc:
        print(f"cannot reach service: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    raise SystemExit(main())


def serve_main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = argparse.ArgumentParser(
        prog="decoupled-mixup-serve", description="Run the mixing service."
    )
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    args = parser.parse_args(argv)

    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def serve_entrypoint() -> None:
    raise SystemExit(serve_main())
