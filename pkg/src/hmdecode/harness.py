"""Synthetic dataset generation, experiment grids and micro-benchmarks.

Everything here is deterministic under the plan seed: sub-pixel centers
come from one seeded generator, and each noise spec gets a per-sample
seed derived from ``(spec.seed, sample_index)`` so datasets are
reproducible byte for byte. Timing outputs are the only non-deterministic
artifacts.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import _backend
from .calibration import CalibrationSpec, Objective, calibrate, default_candidates
from .decoding import (
    STATUS_OK,
    DecoderConfig,
    Method,
    Pattern,
    _METHOD_CODE,
    _PATTERN_CODE,
    decode_batch,
)
from .errors import ConfigError
from .heatmaps import Coord, NoiseKind, NoiseSpec, Space, encode, gaussian_kernel1d, inject_noise
from .hmz import write_hmz
from .metrics import DEFAULT_PCK_THRESHOLDS, EvalReport, SyntheticSample, evaluate


@dataclass(frozen=True)
class NoiseChain:
    """A named sequence of noise specs applied in order to each sample."""

    id: str
    specs: tuple[NoiseSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "specs", tuple(self.specs))


CLEAN = NoiseChain("clean", ())


@dataclass
class ExperimentPlan:
    """Grid geometry, sampling policy and the noise/decoder matrices."""

    width: int = 64
    height: int = 48
    stride: float = 4.0
    sigma: float = 2.0
    samples: int = 2000
    margin: float | None = None
    seed: int = 0
    norm_length: float | None = None
    allow_border: bool = False
    noises: list[NoiseChain] = field(default_factory=lambda: [CLEAN])
    decoders: list[tuple[str, DecoderConfig]] = field(default_factory=list)
    pck_thresholds: tuple[float, ...] = DEFAULT_PCK_THRESHOLDS
    curve_patterns: tuple[Pattern, ...] = ()
    curve_candidates: tuple[int, ...] | None = None
    dump_datasets: bool = False

    def __post_init__(self):
        if self.samples < 1:
            raise ConfigError("plan needs at least one sample")
        if not (self.stride > 0 and self.sigma > 0):
            raise ConfigError("stride and sigma must be > 0")
        min_margin = 3.0 * self.sigma + 2.0
        if self.margin is None:
            self.margin = min_margin
        if self.margin < min_margin and not self.allow_border:
            raise ConfigError(
                f"margin {self.margin:g} < {min_margin:g} keeps windows from staying "
                "interior; set allow_border for border runs"
            )
        lo = float(self.margin)
        if lo > (self.width - 1) - lo or lo > (self.height - 1) - lo:
            raise ConfigError(
                f"margin {self.margin:g} is infeasible for a {self.width}x{self.height} grid"
            )
        if self.norm_length is None:
            self.norm_length = 5.0 * self.stride
        seen = set()
        for name, _ in self.decoders:
            if name in seen:
                raise ConfigError(f"duplicate decoder id {name!r}")
            seen.add(name)
        seen = set()
        for chain in self.noises:
            if chain.id in seen:
                raise ConfigError(f"duplicate noise id {chain.id!r}")
            seen.add(chain.id)

    def chain(self, noise_id: str) -> NoiseChain:
        for chain in self.noises:
            if chain.id == noise_id:
                return chain
        raise ConfigError(f"no noise chain named {noise_id!r}")


def _plan_decoder(entry: dict) -> tuple[str, DecoderConfig]:
    config = DecoderConfig(
        method=Method(entry["method"]),
        delta=int(entry.get("delta", 0)),
        pattern=Pattern(entry.get("pattern", "br")),
        presmooth=entry.get("presmooth"),
    )
    return str(entry.get("id", config.label())), config


def plan_from_dict(data: dict) -> ExperimentPlan:
    """Build a plan from its JSON document form."""
    try:
        noises = [
            NoiseChain(
                id=str(entry.get("id", f"noise{i}")),
                specs=tuple(NoiseSpec.from_dict(s) for s in entry.get("specs", [])),
            )
            for i, entry in enumerate(data.get("noises", [{"id": "clean", "specs": []}]))
        ]
        decoders = [_plan_decoder(entry) for entry in data.get("decoders", [])]
        return ExperimentPlan(
            width=int(data.get("width", 64)),
            height=int(data.get("height", 48)),
            stride=float(data.get("stride", 4.0)),
            sigma=float(data.get("sigma", 2.0)),
            samples=int(data.get("samples", 2000)),
            margin=None if data.get("margin") is None else float(data["margin"]),
            seed=int(data.get("seed", 0)),
            norm_length=None if data.get("norm_length") is None else float(data["norm_length"]),
            allow_border=bool(data.get("allow_border", False)),
            noises=noises,
            decoders=decoders,
            pck_thresholds=tuple(float(t) for t in data.get("pck_thresholds", DEFAULT_PCK_THRESHOLDS)),
            curve_patterns=tuple(Pattern(p) for p in data.get("curve_patterns", [])),
            curve_candidates=(
                None
                if data.get("curve_candidates") is None
                else tuple(int(c) for c in data["curve_candidates"])
            ),
            dump_datasets=bool(data.get("dump_datasets", False)),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad plan document: {exc}") from exc


def load_plan(path: str | Path) -> ExperimentPlan:
    return plan_from_dict(json.loads(Path(path).read_text()))


def sample_centers(plan: ExperimentPlan) -> np.ndarray:
    """Deterministic (N, 2) image-space centers, uniform over the interior."""
    rng = np.random.default_rng(np.random.SeedSequence(plan.seed))
    lo = float(plan.margin)
    hi_x = (plan.width - 1) - lo
    hi_y = (plan.height - 1) - lo
    pts = rng.uniform((lo, lo), (hi_x, hi_y), size=(plan.samples, 2))
    return pts * plan.stride


def _per_sample_spec(spec: NoiseSpec, index: int) -> NoiseSpec:
    if spec.kind is not NoiseKind.WHITE_GAUSSIAN:
        return spec
    derived = int(np.random.SeedSequence([spec.seed, index]).generate_state(1)[0])
    return replace(spec, seed=derived)


def generate(plan: ExperimentPlan, noise: NoiseChain | str | None = None) -> list[SyntheticSample]:
    """Encode one single-joint sample per center, then apply the noise chain."""
    if isinstance(noise, str):
        noise = plan.chain(noise)
    if noise is None:
        noise = plan.noises[0] if plan.noises else CLEAN
    centers = sample_centers(plan)
    samples = []
    for i in range(plan.samples):
        center = Coord(float(centers[i, 0]), float(centers[i, 1]), Space.IMAGE)
        hm = encode(center, plan.width, plan.height, plan.stride, plan.sigma)
        for spec in noise.specs:
            hm = inject_noise(hm, _per_sample_spec(spec, i))
        samples.append(
            SyntheticSample(
                heatmaps=[hm],
                truth=[center],
                visible=[True],
                norm_length=float(plan.norm_length),
            )
        )
    return samples


def samples_to_stack(samples: list[SyntheticSample]) -> tuple[np.ndarray, np.ndarray]:
    """Flatten single-joint samples into a (N, H, W) stack plus (N, 2) truths."""
    stack = np.stack([s.heatmaps[0].values for s in samples])
    truth = np.asarray([[s.truth[0].x, s.truth[0].y] for s in samples], dtype=np.float64)
    return np.ascontiguousarray(stack), truth


def dump_dataset(samples: list[SyntheticSample], hmz_path: Path, truth_path: Path) -> None:
    """Write samples as a .hmz container plus an aligned truth document."""
    hms = [hm for s in samples for hm in s.heatmaps]
    write_hmz(hmz_path, hms)
    coords = [
        [t.to_image(hm.stride).x, t.to_image(hm.stride).y]
        for s in samples
        for hm, t in zip(s.heatmaps, s.truth)
    ]
    visible = [bool(v) for s in samples for v in s.visible]
    doc = {
        "coords": coords,
        "visible": visible,
        "norm_length": samples[0].norm_length if samples else 1.0,
    }
    truth_path.write_text(json.dumps(doc))


@dataclass
class CellResult:
    noise_id: str
    decoder_id: str
    report: EvalReport | None
    flagged: int
    error: str = ""

    def row(self, thresholds: tuple[float, ...]) -> dict:
        row: dict = {"noise_id": self.noise_id, "decoder_id": self.decoder_id}
        if self.report is not None:
            row.update(self.report.csv_fields())
        else:
            row.update({"samples": 0, "mean_error": "", "median_error": ""})
            row.update({f"pck_{t:g}": "" for t in thresholds})
        row["flagged"] = self.flagged
        row["error"] = self.error
        return row


@dataclass
class ExperimentResult:
    cells: list[CellResult]
    curve_rows: list[dict]
    thresholds: tuple[float, ...]

    def cell(self, noise_id: str, decoder_id: str) -> CellResult:
        for c in self.cells:
            if c.noise_id == noise_id and c.decoder_id == decoder_id:
                return c
        raise KeyError((noise_id, decoder_id))

    def results_fieldnames(self) -> list[str]:
        names = ["noise_id", "decoder_id", "samples", "mean_error", "median_error"]
        names += [f"pck_{t:g}" for t in self.thresholds]
        names += ["flagged", "error"]
        return names

    def write_results_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=self.results_fieldnames())
            writer.writeheader()
            for cell in self.cells:
                writer.writerow(cell.row(self.thresholds))

    def write_curves_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=["delta", "pattern", "noise_id", "score"])
            writer.writeheader()
            for row in self.curve_rows:
                writer.writerow(row)


def run_experiment(plan: ExperimentPlan, out_dir: str | Path | None = None) -> ExperimentResult:
    """Evaluate every (noise, decoder) cell and emit plot-ready tables."""
    if not plan.decoders:
        raise ConfigError("plan has an empty decoder matrix")
    if not plan.noises:
        raise ConfigError("plan has an empty noise matrix")
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)

    cells: list[CellResult] = []
    curve_rows: list[dict] = []
    for chain in plan.noises:
        samples = generate(plan, chain)
        stack, _truth = samples_to_stack(samples)
        if out is not None and plan.dump_datasets:
            dump_dataset(samples, out / f"{chain.id}.hmz", out / f"{chain.id}_truth.json")
        for decoder_id, config in plan.decoders:
            try:
                coords, status = decode_batch(stack, plan.stride, plan.sigma, config)
                predictions = [
                    [Coord(float(coords[i, 0]), float(coords[i, 1]), Space.IMAGE)]
                    for i in range(len(samples))
                ]
                report = evaluate(samples, predictions, plan.pck_thresholds)
                flagged = int(np.count_nonzero(status != STATUS_OK))
                cells.append(CellResult(chain.id, decoder_id, report, flagged))
            except ValueError as exc:
                cells.append(CellResult(chain.id, decoder_id, None, 0, error=str(exc)))
        for pattern in plan.curve_patterns:
            spec = CalibrationSpec(
                candidates=plan.curve_candidates or default_candidates(plan.sigma),
                pattern=pattern,
                objective=Objective.mean_error_neg(),
            )
            report = calibrate(samples, spec)
            for delta, score in report.curve:
                curve_rows.append(
                    {
                        "delta": delta,
                        "pattern": pattern.value,
                        "noise_id": chain.id,
                        "score": "" if math.isinf(score) else score,
                    }
                )

    result = ExperimentResult(cells, curve_rows, plan.pck_thresholds)
    if out is not None:
        result.write_results_csv(out / "results.csv")
        if curve_rows:
            result.write_curves_csv(out / "curves.csv")
    return result


# --- timing -----------------------------------------------------------------


@dataclass
class BenchEntry:
    decoder_id: str
    median_ns: float        # per heatmap
    extra_median_ns: float  # per heatmap, relative to the argmax baseline
    extra_p95_ns: float

    def row(self) -> dict:
        return {
            "decoder_id": self.decoder_id,
            "median_ns_per_heatmap": self.median_ns,
            "extra_median_ns_per_heatmap": self.extra_median_ns,
            "extra_p95_ns_per_heatmap": self.extra_p95_ns,
        }


@dataclass
class BenchResult:
    backend: str
    batch: int
    iterations: int
    batch_scale: int  # auto-tiling factor applied for timer resolution
    entries: list[BenchEntry]

    def entry(self, decoder_id: str) -> BenchEntry:
        for e in self.entries:
            if e.decoder_id == decoder_id:
                return e
        raise KeyError(decoder_id)

    def rows(self, run_index: int = 0) -> list[dict]:
        rows = []
        for e in self.entries:
            row = {
                "run": run_index,
                "backend": self.backend,
                "batch": self.batch,
                "iterations": self.iterations,
                "batch_scale": self.batch_scale,
            }
            row.update(e.row())
            rows.append(row)
        return rows


BENCH_FIELDNAMES = [
    "run",
    "backend",
    "batch",
    "iterations",
    "batch_scale",
    "decoder_id",
    "median_ns_per_heatmap",
    "extra_median_ns_per_heatmap",
    "extra_p95_ns_per_heatmap",
]


def write_bench_csv(path: str | Path, results: list[BenchResult]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=BENCH_FIELDNAMES)
        writer.writeheader()
        for i, res in enumerate(results):
            for row in res.rows(i):
                writer.writerow(row)


def _timer_resolution_ns() -> int:
    best = None
    for _ in range(25):
        a = time.perf_counter_ns()
        b = time.perf_counter_ns()
        while b == a:
            b = time.perf_counter_ns()
        d = b - a
        best = d if best is None else min(best, d)
    return max(int(best), 1)


def _kernel_args(config: DecoderConfig, sigma: float):
    kernel = None if config.presmooth is None else gaussian_kernel1d(config.presmooth)
    return (
        _METHOD_CODE[config.method],
        float(sigma),
        int(config.delta),
        _PATTERN_CODE[config.pattern],
        kernel,
    )


def bench(
    plan: ExperimentPlan,
    iterations: int = 50,
    warmup: int = 10,
    backend: str | None = None,
    noise: NoiseChain | str | None = None,
) -> BenchResult:
    """Time each decoder against the argmax baseline on identical batches.

    Strictly sequential, single-threaded. Each iteration times the
    baseline and the decoder back to back and records the difference, so
    clock drift cancels; medians are taken over iterations. If the
    baseline batch is too fast for the timer, the batch is tiled and the
    scale recorded.
    """
    if iterations < 30:
        raise ValueError("bench needs at least 30 timed iterations")
    if not plan.decoders:
        raise ConfigError("plan has an empty decoder matrix")
    kern = _backend.kernels(backend)
    samples = generate(plan, noise)
    stack, _ = samples_to_stack(samples)

    res = _timer_resolution_ns()
    scale = 1
    std_args = _kernel_args(DecoderConfig(method=Method.STANDARD), plan.sigma)
    while True:
        n = stack.shape[0]
        out = np.empty((n, 2), dtype=np.float64)
        status = np.zeros(n, dtype=np.int32)
        t0 = time.perf_counter_ns()
        kern.decode_batch(stack, *std_args, out, status)
        t1 = time.perf_counter_ns()
        if t1 - t0 >= max(200 * res, 50_000) or scale >= 1024:
            break
        stack = np.ascontiguousarray(np.concatenate([stack, stack]))
        scale *= 2

    n = stack.shape[0]
    out = np.empty((n, 2), dtype=np.float64)
    status = np.zeros(n, dtype=np.int32)

    entries = []
    for decoder_id, config in plan.decoders:
        args = _kernel_args(config, plan.sigma)
        diffs = np.empty(iterations, dtype=np.float64)
        totals = np.empty(iterations, dtype=np.float64)
        for it in range(-warmup, iterations):
            t0 = time.perf_counter_ns()
            kern.decode_batch(stack, *std_args, out, status)
            t1 = time.perf_counter_ns()
            kern.decode_batch(stack, *args, out, status)
            t2 = time.perf_counter_ns()
            if it >= 0:
                diffs[it] = (t2 - t1) - (t1 - t0)
                totals[it] = t2 - t1
        entries.append(
            BenchEntry(
                decoder_id=decoder_id,
                median_ns=float(np.median(totals)) / n,
                extra_median_ns=float(np.median(diffs)) / n,
                extra_p95_ns=float(np.percentile(diffs, 95)) / n,
            )
        )
    return BenchResult(
        backend=kern.BACKEND,
        batch=n,
        iterations=iterations,
        batch_scale=scale,
        entries=entries,
    )
