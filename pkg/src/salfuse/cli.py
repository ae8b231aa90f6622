"""Command-line front-end: fuse, sweep, bench, and eval subcommands.

Exit codes: 0 on success, 2 for user-input problems (bad paths, mismatched
images, bad parameters), 1 for unexpected internal errors.
"""

from __future__ import annotations

import argparse
import json
import os
import platform
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numba

from .activity import DEFAULT_EPS, GuidedFilterParams
from .errors import FusionError, InvalidInputError, InvalidParameterError
from .fusion import PRESETS, FusionConfig, fuse
from .image import Image, load_image, save_image
from .metrics import evaluate, write_report_csv, write_report_json
from .saliency import SaliencyMetricKind
from .scale_space import PyramidParams
from .synthetic import focus_pair, texture

_IMAGE_SUFFIXES = (".png", ".bmp", ".tif", ".tiff")


@dataclass
class JobSpec:
    """A fully resolved CLI job: inputs, outputs, and pipeline parameters."""

    inputs: list[Path] = field(default_factory=list)
    output: Path | None = None
    out_dir: Path | None = None
    fused: Path | None = None
    report: Path | None = None
    config: FusionConfig = field(default_factory=FusionConfig)
    preset: str | None = None
    octave_range: list[int] = field(default_factory=list)
    layer_range: list[int] = field(default_factory=list)
    synth: tuple[int, int] | None = None
    reps: int = 5


def _parse_synth(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"(\d+)x(\d+)", text)
    if not m:
        raise InvalidParameterError(f"--synth expects WxH (e.g. 2040x1086), got {text!r}")
    w, h = int(m.group(1)), int(m.group(2))
    if w < 2 or h < 2:
        raise InvalidParameterError(f"--synth size must be at least 2x2, got {text}")
    return w, h


def _parse_range(text: str, flag: str) -> list[int]:
    m = re.fullmatch(r"(\d+)\.\.(\d+)", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi < lo:
            raise InvalidParameterError(f"{flag} range {text!r} is empty")
        return list(range(lo, hi + 1))
    if re.fullmatch(r"\d+", text):
        return [int(text)]
    raise InvalidParameterError(f"{flag} expects N or LO..HI, got {text!r}")


def _resolve_inputs(paths: list[str]) -> list[Path]:
    """Expand a single directory argument into its sorted image files."""
    if len(paths) == 1 and Path(paths[0]).is_dir():
        directory = Path(paths[0])
        found = sorted(
            p for p in directory.iterdir() if p.suffix.lower() in _IMAGE_SUFFIXES
        )
        if len(found) < 2:
            raise InvalidInputError(
                f"directory {directory} holds {len(found)} usable images; need at least 2"
            )
        return found
    return [Path(p) for p in paths]


def _load_sources(paths: list[Path]) -> list[Image]:
    if len(paths) < 2:
        raise InvalidInputError(f"need at least 2 input images, got {len(paths)}")
    images = [load_image(p) for p in paths]
    first = images[0]
    for p, img in zip(paths[1:], images[1:]):
        if img.data.shape != first.data.shape:
            raise InvalidInputError(
                f"{paths[0]} is {first.width}x{first.height} ({first.channels}ch) but "
                f"{p} is {img.width}x{img.height} ({img.channels}ch); "
                "all sources must share dimensions"
            )
    return images


def _resolve_config(args) -> tuple[FusionConfig, str | None]:
    """Apply precedence: explicit flags > preset > defaults."""
    preset = getattr(args, "preset", None)
    o, s = PRESETS[preset] if preset else PRESETS["natural"]
    # sweep passes range strings; those are resolved per grid cell instead
    if isinstance(getattr(args, "octaves", None), int):
        o = args.octaves
    if isinstance(getattr(args, "layers", None), int):
        s = args.layers
    eps = DEFAULT_EPS
    if getattr(args, "epsilon", None) is not None:
        eps = args.epsilon / 255.0 ** 2
    if getattr(args, "epsilon_raw", None) is not None:
        eps = args.epsilon_raw
    cfg = FusionConfig(
        pyramid=PyramidParams(octaves=o, layers=s),
        metric=SaliencyMetricKind(getattr(args, "metric", "dog") or "dog"),
        gf=GuidedFilterParams(radius=getattr(args, "radius", None) or 2, eps=eps),
        debug_dump=getattr(args, "debug_dir", None),
    )
    return cfg, preset


def _apply_threads(args) -> None:
    n = getattr(args, "threads", None)
    if n is None:
        return
    if n < 1:
        raise InvalidParameterError(f"--threads must be >= 1, got {n}")
    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def _config_dict(cfg: FusionConfig, preset: str | None) -> dict:
    return {
        "preset": preset,
        "octaves": cfg.pyramid.octaves,
        "layers": cfg.pyramid.layers,
        "sigma0": cfg.pyramid.sigma0,
        "metric": cfg.metric.value,
        "radius": cfg.gf.radius,
        "eps": cfg.gf.eps,
    }


def _echo_config(cfg: FusionConfig, preset: str | None) -> str:
    d = _config_dict(cfg, preset)
    return (
        f"config: octaves={d['octaves']} layers={d['layers']} metric={d['metric']} "
        f"radius={d['radius']} eps={d['eps']:.6g}"
        + (f" preset={preset}" if preset else "")
    )


def cmd_fuse(spec: JobSpec) -> int:
    sources = _load_sources(spec.inputs)
    result = fuse(sources, spec.config)
    save_image(result.fused, spec.output)
    print(_echo_config(spec.config, spec.preset))
    for stage in ("saliency", "masks", "guided_filter", "blend", "total"):
        print(f"{stage:14s} {result.elapsed[stage]:8.3f} s")
    print(f"wrote {spec.output}")
    return 0


def cmd_sweep(spec: JobSpec) -> int:
    sources = _load_sources(spec.inputs)
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for o in spec.octave_range:
        for s in spec.layer_range:
            cfg = FusionConfig(
                pyramid=PyramidParams(octaves=o, layers=s),
                metric=spec.config.metric,
                gf=spec.config.gf,
            )
            result = fuse(sources, cfg)
            out_name = f"fused_o{o}_s{s}.png"
            save_image(result.fused, spec.out_dir / out_name)
            report = evaluate(sources, result.fused)
            rows.append(
                {
                    "o": o,
                    "s": s,
                    "metric": cfg.metric.value,
                    "radius": cfg.gf.radius,
                    "eps": cfg.gf.eps,
                    "file": out_name,
                    "mi": report.mi,
                    "ssim": report.ssim,
                    "qi": report.qi,
                    "qabf": report.qabf,
                }
            )
            print(f"o={o} s={s}: mi={report.mi:.4f} ssim={report.ssim:.4f} "
                  f"qi={report.qi:.4f} qabf={report.qabf:.4f}")
    csv_path = spec.out_dir / "sweep.csv"
    fields = ["o", "s", "metric", "radius", "eps", "file", "mi", "ssim", "qi", "qabf"]
    with open(csv_path, "w", newline="") as fh:
        fh.write(",".join(fields) + "\n")
        for row in rows:
            fh.write(",".join(repr(row[f]) if isinstance(row[f], float) else str(row[f]) for f in fields) + "\n")
    print(f"wrote {len(rows)} fused images and {csv_path}")
    return 0


def _synth_pair(width: int, height: int) -> list[Image]:
    base = texture(width, height, channels=3, seed=2026)
    a, b = focus_pair(base, sigma=3.0)
    return [a, b]


def _hardware_info() -> dict:
    model = ""
    try:
        with open("/proc/cpuinfo") as fh:
            for line in fh:
                if line.lower().startswith("model name"):
                    model = line.split(":", 1)[1].strip()
                    break
    except OSError:
        model = platform.processor()
    return {
        "cpu": model or platform.processor() or platform.machine(),
        "machine": platform.machine(),
        "cores": os.cpu_count(),
        "numba_threads": numba.get_num_threads(),
        "python": platform.python_version(),
    }


def cmd_bench(spec: JobSpec) -> int:
    if spec.synth is not None:
        sources = _synth_pair(*spec.synth)
        source_desc = f"synthetic {spec.synth[0]}x{spec.synth[1]}"
    else:
        sources = _load_sources(spec.inputs)
        source_desc = " ".join(str(p) for p in spec.inputs)
    if spec.reps < 1:
        raise InvalidParameterError(f"--reps must be >= 1, got {spec.reps}")
    fuse(sources, spec.config)  # warm-up (also JIT compilation)
    stage_names = ("saliency", "masks", "guided_filter", "blend", "total")
    samples = {name: [] for name in stage_names}
    for _ in range(spec.reps):
        result = fuse(sources, spec.config)
        for name in stage_names:
            samples[name].append(result.elapsed[name])
    report = {
        "command": "bench",
        "source": source_desc,
        "width": sources[0].width,
        "height": sources[0].height,
        "channels": sources[0].channels,
        "reps": spec.reps,
        "config": _config_dict(spec.config, spec.preset),
        "hardware": _hardware_info(),
        "stages": {
            name: {
                "mean": sum(vals) / len(vals),
                "min": min(vals),
            }
            for name, vals in samples.items()
        },
    }
    text = json.dumps(report, indent=2)
    print(text)
    if spec.report is not None:
        spec.report.write_text(text + "\n")
    return 0


def cmd_eval(spec: JobSpec) -> int:
    sources = _load_sources(spec.inputs)
    fused = load_image(spec.fused)
    if fused.data.shape[:2] != sources[0].data.shape[:2]:
        raise InvalidInputError(
            f"fused image {spec.fused} is {fused.width}x{fused.height} but sources "
            f"are {sources[0].width}x{sources[0].height}"
        )
    report = evaluate(sources, fused)
    meta = {
        "sources": [str(p) for p in spec.inputs],
        "fused": str(spec.fused),
        "config": _config_dict(spec.config, spec.preset),
    }
    doc = dict(meta)
    doc.update(report.as_dict())
    print(json.dumps(doc, indent=2))
    if spec.report is not None:
        if spec.report.suffix.lower() == ".csv":
            write_report_csv(report, spec.report, image_set="+".join(p.name for p in spec.inputs))
        else:
            write_report_json(report, spec.report, meta=meta)
    return 0


def _add_pipeline_args(sp, ranged: bool = False) -> None:
    if ranged:
        sp.add_argument("--octaves", help="octave count or range LO..HI")
        sp.add_argument("--layers", "-s", help="layer count or range LO..HI")
    else:
        sp.add_argument("--octaves", type=int, help="pyramid octave count")
        sp.add_argument("--layers", "-s", type=int, help="scale samples per octave")
    sp.add_argument("--metric", choices=["dog", "grad", "log"], default=None,
                    help="per-scale structure response (default dog)")
    sp.add_argument("--radius", type=int, help="guided filter window radius (default 2)")
    sp.add_argument("--epsilon", type=float,
                    help="guided filter regularization in 8-bit units (value/255^2 is applied)")
    sp.add_argument("--epsilon-raw", type=float,
                    help="guided filter regularization applied verbatim on the [0,1] scale")
    sp.add_argument("--preset", choices=sorted(PRESETS),
                    help="parameter preset: multimodal (o=5,s=3), natural (o=1,s=1), cell (o=3,s=5)")
    sp.add_argument("--threads", type=int, help="worker threads (default: all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="salfuse",
        description="Saliency-weighted image fusion: all-in-focus and multi-modal composites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fuse = sub.add_parser("fuse", help="fuse two or more aligned images")
    p_fuse.add_argument("inputs", nargs="+", help="input images (or one directory)")
    p_fuse.add_argument("--output", "-o", required=True, help="output image path")
    _add_pipeline_args(p_fuse)
    p_fuse.add_argument("--debug-dir", help="dump pyramids, saliency, masks, and weights here")
    p_fuse.set_defaults(mode="fuse")

    p_sweep = sub.add_parser("sweep", help="fuse at every point of an (octaves, layers) grid")
    p_sweep.add_argument("inputs", nargs="+", help="input images (or one directory)")
    p_sweep.add_argument("--out-dir", required=True, help="directory for fused images and sweep.csv")
    _add_pipeline_args(p_sweep, ranged=True)
    p_sweep.set_defaults(mode="sweep")

    p_bench = sub.add_parser("bench", help="time repeated fusions and emit a JSON report")
    p_bench.add_argument("inputs", nargs="*", help="input images (omit when using --synth)")
    p_bench.add_argument("--synth", help="generate a synthetic WxH source pair (e.g. 2040x1086)")
    p_bench.add_argument("--reps", type=int, default=5, help="timed repetitions after one warm-up")
    p_bench.add_argument("--report", help="also write the JSON report to this path")
    _add_pipeline_args(p_bench)
    p_bench.set_defaults(mode="bench")

    p_eval = sub.add_parser("eval", help="score a fused image against its sources")
    p_eval.add_argument("inputs", nargs="+", help="source images (or one directory)")
    p_eval.add_argument("--fused", required=True, help="fused image to score")
    p_eval.add_argument("--report", help="write the report here (.csv or .json)")
    _add_pipeline_args(p_eval)
    p_eval.set_defaults(mode="eval")

    return parser


def _build_job(args) -> JobSpec:
    cfg, preset = _resolve_config(args)
    spec = JobSpec(config=cfg, preset=preset)
    if args.mode in ("fuse", "sweep", "eval") or (args.mode == "bench" and not args.synth):
        spec.inputs = _resolve_inputs(list(args.inputs))
    if args.mode == "fuse":
        spec.output = Path(args.output)
    elif args.mode == "sweep":
        spec.out_dir = Path(args.out_dir)
        spec.octave_range = _parse_range(args.octaves, "--octaves") if args.octaves else [cfg.pyramid.octaves]
        spec.layer_range = _parse_range(args.layers, "--layers") if args.layers else [cfg.pyramid.layers]
    elif args.mode == "bench":
        spec.synth = _parse_synth(args.synth) if args.synth else None
        spec.reps = args.reps
        spec.report = Path(args.report) if args.report else None
    elif args.mode == "eval":
        spec.fused = Path(args.fused)
        spec.report = Path(args.report) if args.report else None
    return spec


_COMMANDS = {
    "fuse": cmd_fuse,
    "sweep": cmd_sweep,
    "bench": cmd_bench,
    "eval": cmd_eval,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_threads(args)
        spec = _build_job(args)
        return _COMMANDS[args.mode](spec)
    except FusionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
