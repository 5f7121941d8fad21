"""Job runners behind the service endpoints and CLI subcommands.

Each runner consumes a request model from schemas.py, touches the filesystem,
and returns the matching response model. Pure raster math lives in the core
modules; this layer owns paths, manifests, padding, timing and threading.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .errors import AtwError, DimensionMismatch, TooFewFrames
from .formats import (
    load_image,
    load_raster,
    residual_preview,
    save_image,
    save_raster,
    write_pyramid_dir,
)
from .image import ImageBuffer
from .mock import generate_mock_field, max_displacement, parse_mock_spec
from .motion import MotionField, interpolate_field, load_field, save_field
from .pyramid import reconstruct_pyramid
from .reswarp import (
    Decomposition,
    ReswarpConfig,
    ReswarpMode,
    ReswarpResult,
    decompose,
    multiscale_reswarp,
    vanilla_reswarp,
)
from .resample import upsample
from .schemas import (
    AnimateRequest,
    AnimateResponse,
    BenchRequest,
    BenchResponse,
    BenchRow,
    DecomposeRequest,
    DecomposeResponse,
    FrameInfo,
    MockgenRequest,
    MockgenResponse,
    PadInfo,
    ReswarpRequest,
    ReswarpResponse,
)

__all__ = [
    "metric_coherency",
    "run_decompose",
    "run_animate",
    "run_reswarp",
    "run_mockgen",
    "run_bench",
]


def metric_coherency(frames: list[ImageBuffer]) -> float:
    """Mean absolute per-sample difference, averaged over consecutive pairs.

    A cheap frame-difference proxy for temporal smoothness; lower is smoother.
    """
    if len(frames) < 2:
        raise TooFewFrames(f"coherency needs >= 2 frames, got {len(frames)}")
    diffs = []
    for a, b in zip(frames, frames[1:]):
        a.require_same_shape(b, "coherency frames")
        diffs.append(float(np.mean(np.abs(b.data.astype(np.float64) - a.data))))
    return float(np.mean(diffs))


def _padded_size(width: int, height: int, cfg: ReswarpConfig) -> tuple[int, int]:
    base = cfg.base_size
    if cfg.mode == ReswarpMode.VANILLA:
        return (math.ceil(width / base) * base, math.ceil(height / base) * base)
    side = max(width, height, base)
    exponent = math.ceil(math.log2(side / base))
    return (base << exponent,) * 2


def _maybe_pad(img: ImageBuffer, cfg: ReswarpConfig, pad: bool):
    """Reflect-pad right/bottom to the nearest valid size when requested."""
    tw, th = _padded_size(img.width, img.height, cfg)
    if (tw, th) == (img.width, img.height):
        return img, None
    if not pad:
        return img, None  # let decompose raise its dimension error
    padded = np.pad(img.data, ((0, th - img.height), (0, tw - img.width), (0, 0)),
                    mode="symmetric")
    info = PadInfo(original_width=img.width, original_height=img.height,
                   padded_width=tw, padded_height=th)
    return ImageBuffer(padded), info


def _crop(result: ImageBuffer, pad_info: PadInfo | None) -> ImageBuffer:
    if pad_info is None:
        return result
    return ImageBuffer(
        result.data[: pad_info.original_height, : pad_info.original_width].copy()
    )


def _self_check_error(raw: ImageBuffer, decomp: Decomposition, cfg: ReswarpConfig) -> float:
    """Max abs reconstruction error of the decomposition round trip."""
    if decomp.mode == ReswarpMode.VANILLA:
        approx = upsample(decomp.low, raw.width, raw.height, cfg.upsample_method)
        rebuilt = approx.data + decomp.residual.data
    else:
        rebuilt = reconstruct_pyramid(decomp.pyramid, cfg.upsample_method).data
    return float(np.max(np.abs(rebuilt.astype(np.float64) - raw.data)))


def run_decompose(req: DecomposeRequest) -> DecomposeResponse:
    cfg = req.params.to_config()
    raw = load_image(req.input_path)
    original = raw
    raw, pad_info = _maybe_pad(raw, cfg, req.pad)
    decomp = decompose(raw, cfg)
    out_dir = Path(req.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    save_image(decomp.low, out_dir / "low.png")
    save_raster(decomp.low, out_dir / "low.atwr")
    resp = DecomposeResponse(
        out_dir=str(out_dir),
        mode=cfg.mode.value,
        base_size=cfg.base_size,
        upsample_method=cfg.upsample_method.value,
        width=original.width,
        height=original.height,
        channels=original.channels,
        low_png=str(out_dir / "low.png"),
        low_raster=str(out_dir / "low.atwr"),
        reconstruction_error=_self_check_error(raw, decomp, cfg),
        manifest_path=str(out_dir / "manifest.json"),
        padded=pad_info,
    )
    if decomp.mode == ReswarpMode.VANILLA:
        save_raster(decomp.residual, out_dir / "residual.atwr")
        residual_preview(decomp.residual).save(out_dir / "residual.png")
        resp = resp.model_copy(update={
            "residual_raster": str(out_dir / "residual.atwr"),
            "residual_preview": str(out_dir / "residual.png"),
        })
    else:
        write_pyramid_dir(decomp.pyramid, out_dir / "pyramid")
        resp = resp.model_copy(update={
            "pyramid_dir": str(out_dir / "pyramid"),
            "levels": decomp.pyramid.depth,
        })
    (out_dir / "manifest.json").write_text(resp.model_dump_json(indent=2))
    return resp


def _load_low_result(path: str | None, decomp: Decomposition, cfg: ReswarpConfig) -> ImageBuffer:
    """Supplied low-res generated result, or the decomposed low component."""
    if path is None:
        return decomp.low
    p = Path(path)
    low = load_raster(p) if p.suffix.lower() == ".atwr" else load_image(p)
    if low.size != (cfg.base_size, cfg.base_size):
        raise DimensionMismatch(
            f"low result {low.size} does not match base_size {cfg.base_size}"
        )
    return low


def _base_field(req, cfg: ReswarpConfig) -> MotionField:
    if req.mock is not None:
        return generate_mock_field(parse_mock_spec(req.mock), cfg.base_size)
    field = load_field(req.field_path)
    if field.size != (cfg.base_size, cfg.base_size):
        raise DimensionMismatch(
            f"field {field.size} does not match base_size {cfg.base_size}"
        )
    return field


def _recompose(decomp: Decomposition, low_result: ImageBuffer, field: MotionField,
               cfg: ReswarpConfig) -> ReswarpResult:
    if decomp.mode == ReswarpMode.VANILLA:
        return vanilla_reswarp(low_result, decomp.residual, field, cfg)
    return multiscale_reswarp(low_result, decomp.pyramid, field, cfg)


def run_animate(req: AnimateRequest) -> AnimateResponse:
    cfg = req.params.to_config()
    t_start = time.perf_counter()
    raw = load_image(req.input_path)
    raw, pad_info = _maybe_pad(raw, cfg, req.pad)
    decomp = decompose(raw, cfg)
    low_result = _load_low_result(req.low_result_path, decomp, cfg)

    if req.field_dir is not None:
        field_paths = sorted(Path(req.field_dir).glob("*.atwf"))
        if not field_paths:
            raise AtwError(f"no .atwf files found in {req.field_dir}")
        plan = [(i, None, load_field(p)) for i, p in enumerate(field_paths)]
        for _, _, f in plan:
            if f.size != (cfg.base_size, cfg.base_size):
                raise DimensionMismatch(
                    f"field {f.size} does not match base_size {cfg.base_size}"
                )
    else:
        base = _base_field(req, cfg)
        plan = [(i, a, interpolate_field(base, a)) for i, a in enumerate(req.alphas)]

    out_dir = Path(req.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def render(entry) -> tuple[FrameInfo, ImageBuffer]:
        index, alpha, field = entry
        label = f"alpha={alpha}" if alpha is not None else f"field #{index}"
        try:
            t0 = time.perf_counter()
            result = _recompose(decomp, low_result, field, cfg)
            frame = _crop(result.image, pad_info)
            ms = (time.perf_counter() - t0) * 1e3
            path = out_dir / f"frame_{index:03d}.png"
            sidecar = out_dir / f"frame_{index:03d}.json"
            save_image(frame, path)
            sidecar.write_text(json.dumps({
                "mode": cfg.mode.value,
                "base_size": cfg.base_size,
                "upsample_method": cfg.upsample_method.value,
                "alpha": alpha,
                "clamp_count": result.clamped,
                "timing_ms": ms,
            }, indent=2))
        except AtwError as exc:
            raise exc.__class__(f"frame {index} ({label}): {exc}") from exc
        info = FrameInfo(index=index, alpha=alpha, path=str(path),
                         sidecar=str(sidecar), clamp_count=result.clamped, ms=ms)
        return info, frame

    threads = int(os.environ.get("ATW_THREADS", req.threads))
    if threads > 1 and len(plan) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rendered = list(pool.map(render, plan))
    else:
        rendered = [render(entry) for entry in plan]

    frames = [info for info, _ in rendered]
    images = [img for _, img in rendered]
    coherency = metric_coherency(images) if len(images) >= 2 else None
    resp = AnimateResponse(
        out_dir=str(out_dir),
        params=req.params,
        frames=frames,
        coherency=coherency,
        total_ms=(time.perf_counter() - t_start) * 1e3,
        report_path=str(out_dir / "report.json"),
        padded=pad_info,
    )
    (out_dir / "report.json").write_text(resp.model_dump_json(indent=2))
    return resp


def run_reswarp(req: ReswarpRequest) -> ReswarpResponse:
    cfg = req.params.to_config()
    raw = load_image(req.input_path)
    raw, pad_info = _maybe_pad(raw, cfg, req.pad)
    decomp = decompose(raw, cfg)
    low_result = _load_low_result(req.low_result_path, decomp, cfg)
    field = interpolate_field(_base_field(req, cfg), req.alpha)
    t0 = time.perf_counter()
    result = _recompose(decomp, low_result, field, cfg)
    ms = (time.perf_counter() - t0) * 1e3
    frame = _crop(result.image, pad_info)
    out_path = Path(req.out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_image(frame, out_path)
    sidecar = out_path.with_suffix(".json")
    payload = {
        "mode": cfg.mode.value,
        "base_size": cfg.base_size,
        "upsample_method": cfg.upsample_method.value,
        "alpha": req.alpha,
        "clamp_count": result.clamped,
        "timing_ms": ms,
    }
    sidecar.write_text(json.dumps(payload, indent=2))
    return ReswarpResponse(out_path=str(out_path), sidecar=str(sidecar),
                           alpha=req.alpha, clamp_count=result.clamped, ms=ms,
                           padded=pad_info)


def run_mockgen(req: MockgenRequest) -> MockgenResponse:
    spec = parse_mock_spec(req.spec)
    field = generate_mock_field(spec, req.base_size)
    out_path = Path(req.out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_field(field, out_path)
    return MockgenResponse(
        out_path=str(out_path),
        kind=spec.kind,
        params=list(spec.params),
        width=field.width,
        height=field.height,
        max_displacement=max_displacement(spec, req.base_size),
    )


def _bench_image(size: int, rng: np.random.Generator) -> ImageBuffer:
    # smooth base plus fine detail, away from the clamp boundary
    coarse = rng.uniform(-0.7, 0.7, (32, 32, 3)).astype(np.float32)
    smooth = upsample(ImageBuffer(coarse), size, size)
    noise = rng.uniform(-0.2, 0.2, (size, size, 3)).astype(np.float32)
    return ImageBuffer(smooth.data + noise)


def run_bench(req: BenchRequest) -> BenchResponse:
    rng = np.random.default_rng(req.seed)
    rows: list[BenchRow] = []
    for size in req.sizes:
        img = _bench_image(size, rng)
        for mode in req.modes:
            cfg = ReswarpConfig(mode=mode, base_size=req.base_size,
                                upsample_method=req.upsample_method)
            decomp = decompose(img, cfg)
            field = generate_mock_field(parse_mock_spec("radial:64,64,0.05"),
                                        cfg.base_size)
            _recompose(decomp, decomp.low, field, cfg)  # warm path
            times = []
            for _ in range(req.iterations):
                t0 = time.perf_counter()
                _recompose(decomp, decomp.low, field, cfg)
                times.append((time.perf_counter() - t0) * 1e3)
            rows.append(BenchRow(
                size=size,
                mode=mode,
                median_ms=float(np.median(times)),
                p95_ms=float(np.percentile(times, 95)),
            ))
    lines = ["size,mode,median_ms,p95_ms"]
    lines += [f"{r.size},{r.mode},{r.median_ms:.3f},{r.p95_ms:.3f}" for r in rows]
    csv_text = "\n".join(lines) + "\n"
    csv_path = None
    if req.out_csv:
        Path(req.out_csv).parent.mkdir(parents=True, exist_ok=True)
        Path(req.out_csv).write_text(csv_text)
        csv_path = req.out_csv
    return BenchResponse(rows=rows, csv_text=csv_text, csv_path=csv_path)


def service_version() -> str:
    return __version__
