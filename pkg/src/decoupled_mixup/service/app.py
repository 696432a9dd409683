"""FastAPI application wrapping the mixing library.

Library errors surface as HTTP 400 with the message in `detail`; per-item
batch failures are reported in the run response body instead, mirroring the
skip-and-report batch policy.
"""

from __future__ import annotations

import base64
import binascii
import logging

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import MixupError
from ..image_io import decode_image, encode_image
from ..manifest import load_manifest
from ..pipeline import RunConfig, mix_pair, render_grid_for_entries, run_batch
from ..rng import RngStream
from ..tensors import as_label, one_hot
from .schemas import (
    GridRequest,
    GridResponse,
    HealthResponse,
    ItemFailure,
    MixRequest,
    MixResponse,
    RunRequest,
    RunResponse,
)

logger = logging.getLogger("decoupled_mixup.service")


def _bad_request(exc: Exception) -> HTTPException:
    return HTTPException(status_code=400, detail=f"{type(exc).__name__}: {exc}")


def _decode_b64_image(payload: str, what: str) -> np.ndarray:
    try:
        raw = base64.b64decode(payload, validate=True)
        return decode_image(raw)
    except (binascii.Error, ValueError, OSError, MixupError) as exc:
        raise HTTPException(
            status_code=400, detail=f"cannot decode {what}: {exc}"
        ) from None


def _encode_b64_image(image: np.ndarray) -> str:
    return base64.b64encode(encode_image(image, "png")).decode("ascii")


def _resolve_label(raw: int | list[float], classes: int, what: str) -> np.ndarray:
    try:
        if isinstance(raw, int):
            return one_hot(raw, classes)
        return as_label(raw, classes)
    except MixupError as exc:
        raise HTTPException(status_code=400, detail=f"bad {what}: {exc}") from None


def create_app() -> FastAPI:
    app = FastAPI(title="decoupled-mixup", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/mix", response_model=MixResponse)
    def mix(request: MixRequest) -> MixResponse:
        x_i = _decode_b64_image(request.image_i, "image_i")
        x_j = _decode_b64_image(request.image_j, "image_j")
        y_i = _resolve_label(request.label_i, request.classes, "label_i")
        y_j = _resolve_label(request.label_j, request.classes, "label_j")
        m_i = _decode_b64_image(request.mask_i, "mask_i")[:, :, 0] if request.mask_i else None
        m_j = _decode_b64_image(request.mask_j, "mask_j")[:, :, 0] if request.mask_j else None
        try:
            outcome = mix_pair(
                request.mode,
                x_i,
                x_j,
                y_i,
                y_j,
                RngStream(request.seed, 0),
                m_i=m_i,
                m_j=m_j,
                beta_shape=request.beta_shape,
                alpha=request.alpha,
                lambda_v=request.lambda_v,
                lambda_delta=request.lambda_delta,
                style_t=request.style_t,
                phase_source=request.phase_source,
            )
        except MixupError as exc:
            raise _bad_request(exc) from None
        return MixResponse(
            image=_encode_b64_image(outcome.image),
            label=[float(v) for v in outcome.label],
            lambda_v=outcome.lambda_v,
            lambda_delta=outcome.lambda_delta,
            alpha=outcome.alpha,
            style_t=outcome.style_t,
            box=list(outcome.box) if outcome.box is not None else None,
            warnings=outcome.warnings,
        )

    @app.post("/runs", response_model=RunResponse)
    def runs(request: RunRequest) -> RunResponse:
        try:
            config = RunConfig(
                mode=request.mode,
                output_dir=request.out,
                seed=request.seed,
                beta_shape=request.beta_shape,
                alpha=request.alpha,
                fixed_lambda_v=request.lambda_v,
                fixed_lambda_delta=request.lambda_delta,
                phase_source=request.phase_source,
                image_format=request.image_format,
                jobs=request.jobs,
            )
            entries, classes = load_manifest(request.manifest)
        except (MixupError, OSError) as exc:
            raise _bad_request(exc) from None
        logger.info("run: mode=%s items=%d out=%s", request.mode, len(entries), request.out)
        report = run_batch(config, entries, classes)
        return RunResponse(
            total=report.total,
            ok=report.ok,
            failed=report.failed,
            failures=[ItemFailure(**f) for f in report.failures],
            warnings=report.warnings,
            output_dir=str(report.output_dir),
            manifest_path=str(report.manifest_path),
            report_path=str(report.report_path),
        )

    @app.post("/grid", response_model=GridResponse)
    def grid(request: GridRequest) -> GridResponse:
        try:
            entries, _ = load_manifest(request.manifest)
            image = render_grid_for_entries(
                entries,
                request.mode,
                request.lambdas,
                request.alphas,
                phase_source=request.phase_source,
                lambda_delta=request.lambda_delta,
                seed=request.seed,
            )
        except (MixupError, OSError) as exc:
            raise _bad_request(exc) from None
        return GridResponse(
            image=_encode_b64_image(image),
            height=image.shape[0],
            width=image.shape[1],
        )

    return app
