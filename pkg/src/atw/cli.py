"""Command-line client for the warping engine.

Subcommands: decompose, reswarp, animate, mockgen, bench, serve. By default
requests are executed in-process; with --server URL the same request models
are POSTed to a running service. Reports print as JSON on stdout.
Environment: ATW_THREADS overrides --threads.
"""

from __future__ import annotations

import argparse
import json
import sys

from pydantic import BaseModel, ValidationError

from . import __version__, jobs
from .errors import AtwError
from .schemas import (
    AnimateRequest,
    BenchRequest,
    DecomposeRequest,
    MockgenRequest,
    ReswarpRequest,
)

_ENDPOINTS = {
    "decompose": ("/decompose", DecomposeRequest, jobs.run_decompose),
    "reswarp": ("/reswarp", ReswarpRequest, jobs.run_reswarp),
    "animate": ("/animate", AnimateRequest, jobs.run_animate),
    "mockgen": ("/mockgen", MockgenRequest, jobs.run_mockgen),
    "bench": ("/bench", BenchRequest, jobs.run_bench),
}


def _add_params(parser: argparse.ArgumentParser):
    parser.add_argument("--mode", choices=["vanilla", "multiscale"], default="vanilla")
    parser.add_argument("--base", type=int, default=128, metavar="N",
                        help="low-resolution base size (default 128)")
    parser.add_argument("--upsample", choices=["nearest", "bilinear", "bicubic"],
                        default="bilinear")


def _params_dict(args) -> dict:
    return {"mode": args.mode, "base_size": args.base, "upsample_method": args.upsample}


def _parse_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip() != ""]


def _parse_ints(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip() != ""]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="atw",
                                     description="Residual-warping animation engine")
    parser.add_argument("--version", action="version", version=f"atw {__version__}")
    parser.add_argument("--server", metavar="URL", default=None,
                        help="POST to a running service instead of running in-process")
    # accepted before or after the subcommand; SUPPRESS keeps the root value
    # when the subcommand does not restate it
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--server", metavar="URL", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="split an image into low + residuals",
                       parents=[common])
    p.add_argument("input")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--pad", action="store_true",
                   help="reflect-pad to the nearest valid size instead of failing")
    _add_params(p)

    p = sub.add_parser("reswarp", help="render a single warped frame", parents=[common])
    p.add_argument("input")
    p.add_argument("--out", required=True, metavar="FILE.png")
    p.add_argument("--field", metavar="F.atwf")
    p.add_argument("--mock", metavar="KIND:PARAMS")
    p.add_argument("--low-result", dest="low_result", metavar="PATH")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--pad", action="store_true")
    _add_params(p)

    p = sub.add_parser("animate", help="render an alpha-scheduled frame sequence", parents=[common])
    p.add_argument("input")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--field", metavar="F.atwf")
    p.add_argument("--field-dir", dest="field_dir", metavar="DIR",
                   help="one .atwf per frame, sorted order (alphas ignored)")
    p.add_argument("--mock", metavar="KIND:PARAMS")
    p.add_argument("--alphas", default="0,0.2,0.4,0.6,0.8,1.0", metavar="LIST")
    p.add_argument("--low-result", dest="low_result", metavar="PATH")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--pad", action="store_true")
    _add_params(p)

    p = sub.add_parser("mockgen", help="write an analytic motion field as ATWF", parents=[common])
    p.add_argument("spec", help='e.g. "zero", "translate:3,-2", "radial:64,64,0.1"')
    p.add_argument("--out", required=True, metavar="FILE.atwf")
    p.add_argument("--base", type=int, default=128)

    p = sub.add_parser("bench", help="time both recomposition modes", parents=[common])
    p.add_argument("--sizes", default="256,512,1024", metavar="LIST")
    p.add_argument("--modes", default="vanilla,multiscale", metavar="LIST")
    p.add_argument("--iterations", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="FILE.csv")
    p.add_argument("--base", type=int, default=128)
    p.add_argument("--upsample", choices=["nearest", "bilinear", "bicubic"],
                   default="bilinear")

    p = sub.add_parser("serve", help="run the HTTP service", parents=[common])
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8971)

    return parser


def _build_request(args) -> BaseModel:
    if args.command == "decompose":
        return DecomposeRequest(input_path=args.input, out_dir=args.out,
                                params=_params_dict(args), pad=args.pad)
    if args.command == "reswarp":
        return ReswarpRequest(input_path=args.input, out_path=args.out,
                              params=_params_dict(args), field_path=args.field,
                              mock=args.mock, low_result_path=args.low_result,
                              alpha=args.alpha, pad=args.pad)
    if args.command == "animate":
        return AnimateRequest(input_path=args.input, out_dir=args.out,
                              params=_params_dict(args), field_path=args.field,
                              field_dir=args.field_dir, mock=args.mock,
                              alphas=_parse_floats(args.alphas),
                              low_result_path=args.low_result,
                              threads=args.threads, pad=args.pad)
    if args.command == "mockgen":
        return MockgenRequest(spec=args.spec, base_size=args.base, out_path=args.out)
    if args.command == "bench":
        return BenchRequest(sizes=_parse_ints(args.sizes),
                            modes=[m.strip() for m in args.modes.split(",") if m.strip()],
                            iterations=args.iterations, seed=args.seed,
                            base_size=args.base, upsample_method=args.upsample,
                            out_csv=args.out)
    raise AssertionError(f"unhandled command {args.command}")


def _post(server: str, endpoint: str, req: BaseModel) -> int:
    import httpx

    url = server.rstrip("/") + endpoint
    reply = httpx.post(url, json=req.model_dump(), timeout=600.0)
    print(json.dumps(reply.json(), indent=2))
    return 0 if reply.status_code == 200 else 2


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        uvicorn.run("atw.service:app", host=args.host, port=args.port)
        return 0
    try:
        req = _build_request(args)
    except ValidationError as exc:
        print(f"invalid request: {exc}", file=sys.stderr)
        return 2
    endpoint, _, runner = _ENDPOINTS[args.command]
    if args.server:
        return _post(args.server, endpoint, req)
    try:
        resp = runner(req)
    except AtwError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    print(resp.model_dump_json(indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
