"""Command-line interface.

Subcommands: encode, decode, calibrate, experiment, bench. Output is a
pure function of input files and flags (timing excluded). No color is
ever emitted, so ``NO_COLOR`` is trivially honored.

Exit codes: 0 success, 2 file/format/usage errors, 3 contract errors
(bad decoder parameters, calibration failure, invalid plans).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import _backend
from .calibration import CalibrationSpec, Objective, calibrate, default_candidates
from .decoding import STATUS_EMPTY_REGION, DecoderConfig, Method, Pattern, decode_batch
from .errors import CalibrationError, ConfigError, FormatError
from .harness import bench, load_plan, run_experiment, write_bench_csv
from .heatmaps import Coord, Space, encode
from .hmz import read_hmz, write_hmz
from .metrics import SyntheticSample


def paper_default_delta(sigma: float) -> int:
    """Documented default trim for unsmoothed decoding: ``sigma + 2``."""
    return int(round(sigma)) + 2


def _parse_presmooth(text: str) -> float | None:
    if text.lower() == "off":
        return None
    value = float(text)
    if not (value > 0):
        raise ValueError("presmooth must be a positive kernel sigma or 'off'")
    return value


def cmd_encode(args) -> int:
    doc = json.loads(Path(args.centers).read_text())
    centers = doc["centers"] if isinstance(doc, dict) else doc
    if not isinstance(centers, list) or not centers:
        raise FormatError("centers document must be a non-empty list of [x, y] pairs")
    hms = []
    for pt in centers:
        center = Coord(float(pt[0]), float(pt[1]), Space.IMAGE)
        hms.append(
            encode(center, args.width, args.height, args.stride, args.sigma, args.normalized)
        )
    write_hmz(args.output, hms)
    return 0


def _resolve_delta(text: str, sigma: float) -> int:
    if text == "auto-paper":
        return paper_default_delta(sigma)
    return int(text)


def cmd_decode(args) -> int:
    bundle = read_hmz(args.input)
    method = Method(args.method)
    delta = _resolve_delta(args.delta, bundle.sigma) if method is Method.DAEC else 0
    config = DecoderConfig(
        method=method,
        delta=delta,
        pattern=Pattern(args.pattern),
        presmooth=_parse_presmooth(args.presmooth),
    )
    coords, status = decode_batch(bundle.values, bundle.stride, bundle.sigma, config)
    bad = np.flatnonzero(status == STATUS_EMPTY_REGION)
    if bad.size:
        raise ValueError(f"empty integration window for heatmap index {int(bad[0])}")
    lines = []
    for i in range(coords.shape[0]):
        lines.append(
            json.dumps(
                {
                    "index": i,
                    "x": float(coords[i, 0]),
                    "y": float(coords[i, 1]),
                    "space": "image",
                    "method": method.value,
                    "delta": delta if method is Method.DAEC else None,
                }
            )
        )
    text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _load_truth(path: str, count: int) -> tuple[list[list[float]], list[bool], float]:
    doc = json.loads(Path(path).read_text())
    if not isinstance(doc, dict) or "coords" not in doc:
        raise FormatError("truth document must be an object with a 'coords' list")
    coords = doc["coords"]
    if len(coords) != count:
        raise FormatError(f"truth has {len(coords)} coords for {count} heatmaps")
    visible = doc.get("visible", [True] * count)
    if len(visible) != count:
        raise FormatError("visible list must align with coords")
    return coords, [bool(v) for v in visible], float(doc.get("norm_length", 1.0))


def _parse_candidates(text: str | None, sigma: float) -> tuple[int, ...]:
    if not text:
        return default_candidates(sigma)
    if ".." in text:
        lo, hi = text.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(tok) for tok in text.split(","))


def cmd_calibrate(args) -> int:
    bundle = read_hmz(args.dataset)
    coords, visible, norm_length = _load_truth(args.truth, len(bundle))
    samples = [
        SyntheticSample(
            heatmaps=[bundle[i]],
            truth=[Coord(float(coords[i][0]), float(coords[i][1]), Space.IMAGE)],
            visible=[visible[i]],
            norm_length=norm_length,
        )
        for i in range(len(bundle))
    ]
    spec = CalibrationSpec(
        candidates=_parse_candidates(args.candidates, bundle.sigma),
        pattern=Pattern(args.pattern),
        presmooth=_parse_presmooth(args.presmooth),
        objective=Objective.parse(args.objective),
    )
    report = calibrate(samples, spec)
    print(f"objective: {report.objective}  pattern: {report.pattern}  samples: {report.samples}")
    print(f"{'delta':>6}  {'score':>14}")
    for delta, score in report.curve:
        mark = " *" if delta == report.delta_opt else ""
        if math.isinf(score):
            print(f"{delta:>6}  {'flagged':>14}{mark}")
        else:
            print(f"{delta:>6}  {score:>14.6f}{mark}")
    print(f"selected delta: {report.delta_opt}")
    if args.output:
        Path(args.output).write_text(report.to_json(indent=2) + "\n")
    return 0


def cmd_experiment(args) -> int:
    plan = load_plan(args.plan)
    result = run_experiment(plan, args.out)
    print(f"wrote {len(result.cells)} cells to {args.out}/results.csv")
    if result.curve_rows:
        print(f"wrote {len(result.curve_rows)} curve rows to {args.out}/curves.csv")
    return 0


def cmd_bench(args) -> int:
    plan = load_plan(args.plan)
    backends: list[str | None]
    if args.compare_backends:
        backends = list(_backend.available_backends())
    else:
        backends = [None if args.backend == "auto" else args.backend]
    results = []
    for run in range(args.runs):
        for backend in backends:
            results.append(bench(plan, iterations=args.iterations, backend=backend))
    write_bench_csv(args.output, results)
    for i, res in enumerate(results):
        for entry in res.entries:
            print(
                f"run {i} [{res.backend}] {entry.decoder_id}: "
                f"median {entry.median_ns:.0f} ns/heatmap, "
                f"extra {entry.extra_median_ns:.0f} ns/heatmap"
            )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hmdecode",
        description="Sub-pixel coordinate decoding for 2D activation heatmaps",
        allow_abbrev=False,
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("encode", help="encode image-space centers into a .hmz container")
    p.add_argument("centers", help="JSON file: [[x, y], ...] or {'centers': [...]}")
    p.add_argument("-o", "--output", required=True, help="output .hmz path")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--stride", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=2.0)
    p.add_argument("--normalized", action="store_true", help="use the density normalization")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a .hmz container to JSONL keypoints")
    p.add_argument("input", help=".hmz path")
    p.add_argument("-o", "--output", default=None, help="output JSONL path (default stdout)")
    p.add_argument("--method", choices=[m.value for m in Method], default="daec")
    p.add_argument("--delta", default="0", help="integer trim or 'auto-paper' (sigma + 2)")
    p.add_argument("--pattern", choices=[p.value for p in Pattern], default="br")
    p.add_argument("--presmooth", default="off", help="kernel sigma or 'off'")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("calibrate", help="grid-search the trim on a labeled dataset")
    p.add_argument("dataset", help=".hmz path")
    p.add_argument("--truth", required=True, help="JSON truth document")
    p.add_argument("-o", "--output", default=None, help="report JSON path")
    p.add_argument("--pattern", choices=[p.value for p in Pattern], default="br")
    p.add_argument("--presmooth", default="off", help="kernel sigma or 'off'")
    p.add_argument("--objective", default="mean_error_neg", help="mean_error_neg or pck@T")
    p.add_argument("--candidates", default=None, help="'lo..hi' or comma list (default -2..sigma+4)")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("experiment", help="run a (noise x decoder) grid from a plan")
    p.add_argument("plan", help="plan JSON path")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("bench", help="time decoders against the argmax baseline")
    p.add_argument("plan", help="plan JSON path")
    p.add_argument("-o", "--output", required=True, help="bench CSV path")
    p.add_argument("--iterations", type=int, default=50)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--backend", choices=["auto", "compiled", "python"], default="auto")
    p.add_argument(
        "--compare-backends",
        action="store_true",
        help="bench every available kernel backend",
    )
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, CalibrationError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
