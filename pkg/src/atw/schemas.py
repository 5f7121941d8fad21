"""Request/response models shared by the HTTP service and the CLI client."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from .reswarp import ReswarpConfig

DEFAULT_ALPHAS = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]


class ReswarpParams(BaseModel):
    mode: Literal["vanilla", "multiscale"] = "vanilla"
    base_size: int = 128
    upsample_method: Literal["nearest", "bilinear", "bicubic"] = "bilinear"

    @field_validator("base_size")
    @classmethod
    def _base_pow2(cls, v: int) -> int:
        if v < 16 or v % 16 or (v // 16) & (v // 16 - 1):
            raise ValueError(f"base_size must be 16 * 2^k, got {v}")
        return v

    def to_config(self) -> ReswarpConfig:
        return ReswarpConfig(mode=self.mode, base_size=self.base_size,
                             upsample_method=self.upsample_method)


class DecomposeRequest(BaseModel):
    input_path: str
    out_dir: str
    params: ReswarpParams = Field(default_factory=ReswarpParams)
    pad: bool = False


class PadInfo(BaseModel):
    original_width: int
    original_height: int
    padded_width: int
    padded_height: int


class DecomposeResponse(BaseModel):
    out_dir: str
    mode: str
    base_size: int
    upsample_method: str
    width: int
    height: int
    channels: int
    low_png: str
    low_raster: str
    residual_raster: Optional[str] = None
    residual_preview: Optional[str] = None
    pyramid_dir: Optional[str] = None
    levels: int = 0
    reconstruction_error: float
    manifest_path: str
    padded: Optional[PadInfo] = None


class FieldSource(BaseModel):
    """Exactly one of field_path / field_dir / mock selects the motion input."""

    field_path: Optional[str] = None
    field_dir: Optional[str] = None
    mock: Optional[str] = None

    def _count(self) -> int:
        return sum(v is not None for v in (self.field_path, self.field_dir, self.mock))


class AnimateRequest(FieldSource):
    input_path: str
    out_dir: str
    params: ReswarpParams = Field(default_factory=ReswarpParams)
    alphas: list[float] = Field(default_factory=lambda: list(DEFAULT_ALPHAS))
    low_result_path: Optional[str] = None
    threads: int = 1
    pad: bool = False

    @field_validator("alphas")
    @classmethod
    def _alpha_schedule(cls, v: list[float]) -> list[float]:
        if not v:
            raise ValueError("alpha schedule must be nonempty")
        if any(not 0.0 <= a <= 1.0 for a in v):
            raise ValueError(f"alphas must be within [0, 1], got {v}")
        if any(b < a for a, b in zip(v, v[1:])):
            raise ValueError(f"alpha schedule must be nondecreasing, got {v}")
        return v

    @field_validator("threads")
    @classmethod
    def _threads_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("threads must be >= 1")
        return v

    @model_validator(mode="after")
    def _one_field_source(self):
        if self._count() != 1:
            raise ValueError("provide exactly one of field_path, field_dir, mock")
        return self


class ReswarpRequest(FieldSource):
    """Single-frame run: decompose the input and recompose one warped frame."""

    input_path: str
    out_path: str
    params: ReswarpParams = Field(default_factory=ReswarpParams)
    alpha: float = 1.0
    low_result_path: Optional[str] = None
    pad: bool = False

    @field_validator("alpha")
    @classmethod
    def _alpha_range(cls, v: float) -> float:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"alpha must be within [0, 1], got {v}")
        return v

    @model_validator(mode="after")
    def _one_field_source(self):
        if self.field_dir is not None:
            raise ValueError("single-frame reswarp takes field_path or mock, not field_dir")
        if self._count() != 1:
            raise ValueError("provide exactly one of field_path, mock")
        return self


class FrameInfo(BaseModel):
    index: int
    alpha: Optional[float] = None
    path: str
    sidecar: str
    clamp_count: int
    ms: float


class AnimateResponse(BaseModel):
    out_dir: str
    params: ReswarpParams
    frames: list[FrameInfo]
    coherency: Optional[float] = None
    total_ms: float
    report_path: str
    padded: Optional[PadInfo] = None


class ReswarpResponse(BaseModel):
    out_path: str
    sidecar: str
    alpha: float
    clamp_count: int
    ms: float
    padded: Optional[PadInfo] = None


class MockgenRequest(BaseModel):
    spec: str
    base_size: int = 128
    out_path: str


class MockgenResponse(BaseModel):
    out_path: str
    kind: str
    params: list[float]
    width: int
    height: int
    max_displacement: float


class BenchRequest(BaseModel):
    sizes: list[int] = Field(default_factory=lambda: [256, 512, 1024])
    modes: list[Literal["vanilla", "multiscale"]] = Field(
        default_factory=lambda: ["vanilla", "multiscale"])
    iterations: int = 5
    seed: int = 0
    base_size: int = 128
    upsample_method: Literal["nearest", "bilinear", "bicubic"] = "bilinear"
    out_csv: Optional[str] = None

    @field_validator("iterations")
    @classmethod
    def _iters_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("iterations must be >= 1")
        return v

    @field_validator("sizes")
    @classmethod
    def _sizes_nonempty(cls, v: list[int]) -> list[int]:
        if not v:
            raise ValueError("sizes must be nonempty")
        return v


class BenchRow(BaseModel):
    size: int
    mode: str
    median_ms: float
    p95_ms: float


class BenchResponse(BaseModel):
    rows: list[BenchRow]
    csv_text: str
    csv_path: Optional[str] = None


class HealthResponse(BaseModel):
    status: str
    version: str


class ErrorInfo(BaseModel):
    error: str
    message: str
