import json
import os
from pathlib import Path

import numpy as np
import pytest

from atw import ImageBuffer, load_field, load_image, save_field, save_image
from atw.errors import (
    BadSpec,
    DimensionMismatch,
    NonDivisibleDimensions,
    TooFewFrames,
)
from atw.jobs import (
    metric_coherency,
    run_animate,
    run_bench,
    run_decompose,
    run_mockgen,
    run_reswarp,
)
from atw.mock import generate_mock_field, max_displacement, parse_mock_spec
from atw.motion import MotionField
from atw.schemas import (
    AnimateRequest,
    BenchRequest,
    DecomposeRequest,
    MockgenRequest,
    ReswarpRequest,
)

from conftest import random_image


# ---- coherency metric ----

def test_coherency_identical_frames_is_zero(rng):
    frame = random_image(rng, 8, 8)
    assert metric_coherency([frame, frame, frame]) == 0.0


def test_coherency_constant_extremes_is_two():
    a = ImageBuffer.constant(4, 4, -1.0)
    b = ImageBuffer.constant(4, 4, 1.0)
    assert metric_coherency([a, b]) == pytest.approx(2.0)


def test_coherency_needs_two_frames(rng):
    with pytest.raises(TooFewFrames):
        metric_coherency([random_image(rng, 4, 4)])


# ---- mock fields ----

def test_parse_mock_specs():
    assert parse_mock_spec("zero").kind == "zero"
    spec = parse_mock_spec("translate:3,-2")
    assert spec.params == (3.0, -2.0)
    assert str(spec) == "translate:3,-2"
    assert parse_mock_spec("radial:64,64,0.1").params == (64.0, 64.0, 0.1)


@pytest.mark.parametrize("bad", ["spin", "translate:1", "radial:1,2", "translate:a,b",
                                 "shear:0,1"])
def test_bad_mock_specs_rejected(bad):
    with pytest.raises(BadSpec):
        spec = parse_mock_spec(bad)
        generate_mock_field(spec, 16)


def test_zero_mock_field():
    f = generate_mock_field(parse_mock_spec("zero"), 32)
    assert f.size == (32, 32)
    assert not f.data.any()


def test_translate_mock_field():
    f = generate_mock_field(parse_mock_spec("translate:3,-2"), 16)
    assert np.all(f.dx == np.float32(3.0))
    assert np.all(f.dy == np.float32(-2.0))


def test_radial_mock_field_grows_linearly():
    f = generate_mock_field(parse_mock_spec("radial:64,64,0.1"), 128)
    assert f.dx[64, 64] == 0.0 and f.dy[64, 64] == 0.0
    # displacement magnitude is gain * distance from the center
    mag = np.hypot(f.dx, f.dy)
    assert mag[64, 74] == pytest.approx(0.1 * 10.0, abs=1e-5)
    assert mag[34, 64] == pytest.approx(0.1 * 30.0, abs=1e-5)
    assert np.max(mag) <= max_displacement(parse_mock_spec("radial:64,64,0.1"), 128) + 1e-5


def test_shear_mock_field_is_bounded():
    spec = parse_mock_spec("shear:16,0.5")
    f = generate_mock_field(spec, 64)
    assert np.max(np.abs(f.dx)) <= max_displacement(spec, 64) + 1e-6
    assert not f.dy.any()


# ---- decompose job ----

def save_random_png(rng, path, size_w, size_h):
    img = random_image(rng, size_w, size_h)
    save_image(img, path)
    return load_image(path)  # quantized version, what the jobs will see


def test_run_decompose_vanilla(tmp_path, rng):
    src = tmp_path / "in.png"
    save_random_png(rng, src, 256, 256)
    resp = run_decompose(DecomposeRequest(input_path=str(src), out_dir=str(tmp_path / "d"),
                                          params={"mode": "vanilla"}))
    assert resp.reconstruction_error <= 1e-5
    assert Path(resp.low_png).exists()
    assert Path(resp.residual_raster).exists()
    manifest = json.loads(Path(resp.manifest_path).read_text())
    assert manifest["mode"] == "vanilla"
    assert manifest["reconstruction_error"] <= 1e-5


def test_run_decompose_multiscale_levels(tmp_path, rng):
    src = tmp_path / "in.png"
    save_random_png(rng, src, 512, 512)
    resp = run_decompose(DecomposeRequest(input_path=str(src), out_dir=str(tmp_path / "d"),
                                          params={"mode": "multiscale"}))
    assert resp.levels == 2
    assert Path(resp.pyramid_dir, "level_02.atwr").exists()
    assert resp.reconstruction_error <= 1e-5


def test_run_decompose_rejects_bad_dims(tmp_path, rng):
    src = tmp_path / "in.png"
    save_random_png(rng, src, 130, 130)
    with pytest.raises(NonDivisibleDimensions):
        run_decompose(DecomposeRequest(input_path=str(src), out_dir=str(tmp_path / "d")))


def test_run_decompose_pads_when_asked(tmp_path, rng):
    src = tmp_path / "in.png"
    save_random_png(rng, src, 200, 300)
    resp = run_decompose(DecomposeRequest(input_path=str(src), out_dir=str(tmp_path / "d"),
                                          params={"mode": "multiscale"}, pad=True))
    assert resp.padded.padded_width == 512
    assert resp.padded.padded_height == 512
    assert resp.levels == 2


# ---- animate job ----

def test_animate_alpha_zero_reproduces_input(tmp_path, rng):
    src = tmp_path / "in.png"
    original = save_random_png(rng, src, 256, 256)
    resp = run_animate(AnimateRequest(
        input_path=str(src), out_dir=str(tmp_path / "a"),
        mock="translate:4,-3", alphas=[0.0]))
    frame = load_image(resp.frames[0].path)
    # identity reconstruction stays within u8 rounding of the source pixels
    assert np.array_equal(frame.data, original.data)
    sidecar = json.loads(Path(resp.frames[0].sidecar).read_text())
    assert sidecar["alpha"] == 0.0
    assert sidecar["clamp_count"] == 0


def test_animate_zero_field_gives_identical_frames(tmp_path, rng):
    src = tmp_path / "in.png"
    save_random_png(rng, src, 256, 256)
    resp = run_animate(AnimateRequest(
        input_path=str(src), out_dir=str(tmp_path / "a"), mock="zero"))
    assert len(resp.frames) == 6
    blobs = {Path(f.path).read_bytes() for f in resp.frames}
    assert len(blobs) == 1
    assert resp.coherency == 0.0


def test_animate_with_field_file_and_low_result(tmp_path, rng):
    src = tmp_path / "in.png"
    save_random_png(rng, src, 256, 256)
    dec = run_decompose(DecomposeRequest(input_path=str(src), out_dir=str(tmp_path / "d")))
    field = MotionField(rng.uniform(-3, 3, (128, 128, 2)).astype(np.float32))
    fpath = tmp_path / "f.atwf"
    save_field(field, fpath)
    resp = run_animate(AnimateRequest(
        input_path=str(src), out_dir=str(tmp_path / "a"), field_path=str(fpath),
        alphas=[0.0, 0.5, 1.0], low_result_path=dec.low_raster))
    assert len(resp.frames) == 3
    assert resp.coherency is not None and resp.coherency > 0.0


def test_animate_field_dir_mode(tmp_path, rng):
    src = tmp_path / "in.png"
    save_random_png(rng, src, 256, 256)
    fdir = tmp_path / "fields"
    fdir.mkdir()
    for i in range(3):
        f = MotionField(np.full((128, 128, 2), float(i), dtype=np.float32))
        save_field(f, fdir / f"seq_{i:02d}.atwf")
    resp = run_animate(AnimateRequest(
        input_path=str(src), out_dir=str(tmp_path / "a"), field_dir=str(fdir)))
    assert len(resp.frames) == 3
    assert all(f.alpha is None for f in resp.frames)


def test_animate_error_names_the_frame(tmp_path, rng):
    src = tmp_path / "in.png"
    save_random_png(rng, src, 256, 256)
    field = MotionField.zeros(64, 64)  # wrong base size
    fpath = tmp_path / "f.atwf"
    save_field(field, fpath)
    with pytest.raises(DimensionMismatch):
        run_animate(AnimateRequest(input_path=str(src), out_dir=str(tmp_path / "a"),
                                   field_path=str(fpath)))


def test_animate_threading_is_deterministic(tmp_path, rng):
    src = tmp_path / "in.png"
    save_random_png(rng, src, 256, 256)
    kwargs = dict(input_path=str(src), mock="radial:64,64,0.05",
                  alphas=[0.0, 0.25, 0.5, 0.75, 1.0])
    r1 = run_animate(AnimateRequest(out_dir=str(tmp_path / "t1"), threads=1, **kwargs))
    r4 = run_animate(AnimateRequest(out_dir=str(tmp_path / "t4"), threads=4, **kwargs))
    for a, b in zip(r1.frames, r4.frames):
        assert Path(a.path).read_bytes() == Path(b.path).read_bytes()


def test_animate_env_thread_override(tmp_path, rng, monkeypatch):
    src = tmp_path / "in.png"
    save_random_png(rng, src, 256, 256)
    monkeypatch.setenv("ATW_THREADS", "2")
    resp = run_animate(AnimateRequest(input_path=str(src), out_dir=str(tmp_path / "a"),
                                      mock="zero", alphas=[0.0, 1.0]))
    assert len(resp.frames) == 2


def test_animate_multiscale_with_padding(tmp_path, rng):
    src = tmp_path / "in.png"
    original = save_random_png(rng, src, 200, 264)
    resp = run_animate(AnimateRequest(
        input_path=str(src), out_dir=str(tmp_path / "a"), mock="zero", alphas=[0.0],
        params={"mode": "multiscale"}, pad=True))
    frame = load_image(resp.frames[0].path)
    assert frame.size == (200, 264)
    assert np.array_equal(frame.data, original.data)


# ---- single-frame reswarp job ----

def test_run_reswarp_single_frame(tmp_path, rng):
    src = tmp_path / "in.png"
    save_random_png(rng, src, 256, 256)
    resp = run_reswarp(ReswarpRequest(
        input_path=str(src), out_path=str(tmp_path / "frame.png"),
        mock="translate:2,0", alpha=0.5))
    assert Path(resp.out_path).exists()
    sidecar = json.loads(Path(resp.sidecar).read_text())
    assert sidecar["alpha"] == 0.5


# ---- mockgen job ----

def test_run_mockgen_round_trip(tmp_path):
    resp = run_mockgen(MockgenRequest(spec="translate:3,-2", base_size=64,
                                      out_path=str(tmp_path / "f.atwf")))
    f = load_field(resp.out_path)
    assert f.size == (64, 64)
    assert np.all(f.dx == np.float32(3.0))
    assert resp.max_displacement == pytest.approx(np.hypot(3, 2))


def test_run_mockgen_zero_payload(tmp_path):
    resp = run_mockgen(MockgenRequest(spec="zero", out_path=str(tmp_path / "z.atwf")))
    assert not load_field(resp.out_path).data.any()


# ---- bench job ----

def test_run_bench_rows_and_csv(tmp_path):
    resp = run_bench(BenchRequest(sizes=[256], modes=["vanilla", "multiscale"],
                                  iterations=2, out_csv=str(tmp_path / "b.csv")))
    assert len(resp.rows) == 2
    lines = (tmp_path / "b.csv").read_text().strip().splitlines()
    assert lines[0] == "size,mode,median_ms,p95_ms"
    assert len(lines) == 3
    for row in resp.rows:
        assert row.median_ms > 0.0
        assert row.p95_ms >= row.median_ms * 0.5


def test_run_bench_single_iteration_is_well_formed():
    resp = run_bench(BenchRequest(sizes=[256], modes=["vanilla"], iterations=1))
    assert len(resp.rows) == 1
    assert "vanilla" in resp.csv_text


def test_run_bench_median_monotone_in_pixel_count():
    resp = run_bench(BenchRequest(sizes=[256, 1024], modes=["vanilla"], iterations=3))
    by_size = {r.size: r.median_ms for r in resp.rows}
    assert by_size[1024] >= by_size[256]
