"""Pydantic request/response models for the HTTP service.

Images travel as base64-encoded PNG or binary PPM/PGM payloads; batch runs
exchange filesystem paths, so the server must share a filesystem with the
caller (it does by construction when the CLI uses its in-process transport).
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

Mode = Literal["mixup", "cutmix", "fd", "cd", "style"]
PhaseSource = Literal["first", "second"]


class HealthResponse(BaseModel):
    status: str
    version: str


class MixRequest(BaseModel):
    mode: Mode
    image_i: str = Field(description="base64 PNG/PPM payload, first operand")
    image_j: str = Field(description="base64 PNG/PPM payload, second operand")
    label_i: int | list[float]
    label_j: int | list[float]
    classes: int = Field(ge=1)
    seed: int = 0
    lambda_v: float | None = None
    lambda_delta: float | None = None
    alpha: float | None = None
    beta_shape: float = 1.0
    style_t: float | None = None
    phase_source: PhaseSource = "first"
    mask_i: str | None = None
    mask_j: str | None = None


class MixResponse(BaseModel):
    image: str = Field(description="base64 PNG payload of the mixed image")
    label: list[float]
    lambda_v: float
    lambda_delta: float | None = None
    alpha: float | None = None
    style_t: float | None = None
    box: list[int] | None = None
    warnings: list[str] = []


class RunRequest(BaseModel):
    manifest: str = Field(description="path to the input manifest on the server")
    out: str = Field(description="output directory on the server")
    mode: Mode
    seed: int = 0
    beta_shape: float = 1.0
    alpha: float | None = None
    lambda_v: float | None = None
    lambda_delta: float | None = None
    phase_source: PhaseSource = "first"
    image_format: Literal["png", "ppm"] = "png"
    jobs: int = Field(default=1, ge=1)


class ItemFailure(BaseModel):
    index: int
    error: str


class RunResponse(BaseModel):
    total: int
    ok: int
    failed: int
    failures: list[ItemFailure]
    warnings: list[str]
    output_dir: str
    manifest_path: str
    report_path: str


class GridRequest(BaseModel):
    manifest: str
    mode: Mode
    lambdas: list[float] = Field(min_length=1)
    alphas: list[float] = Field(min_length=1)
    phase_source: PhaseSource = "first"
    lambda_delta: float = 1.0
    seed: int = 0


class GridResponse(BaseModel):
    image: str = Field(description="base64 PNG payload of the rendered grid")
    height: int
    width: int
