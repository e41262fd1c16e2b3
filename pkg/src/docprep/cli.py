"""Command-line frontend: per-stage subcommands, full pipeline, synth, eval.

Exit codes: 0 success, 1 input/validation error, 2 external OCR failure.
Data goes to stdout only when the output path is `-`; diagnostics go to
stderr.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import enhance as enhance_mod
from . import evalharness, pipeline as pipeline_mod, sharpen as sharpen_mod
from .colorspace import luma_coefficients, to_grayscale_luminance
from .evalharness import OcrCommand, OcrError
from .pipeline import ConfigError, PipelineConfig
from .raster import (BinaryImage, PnmFormatError, RasterImage, decode_pnm,
                     encode_pbm, encode_pnm)


class CliError(Exception):
    pass


def _read_bytes(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _write_bytes(path: str, data: bytes) -> None:
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from None


def _read_image(path: str) -> RasterImage:
    try:
        return decode_pnm(_read_bytes(path))
    except PnmFormatError as exc:
        raise CliError(f"{path}: {exc}") from None


def _load_pipeline_config(args) -> PipelineConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(pipeline_mod.parse_config_text(
            _read_bytes(args.config).decode("utf-8")))
    for override in getattr(args, "set", None) or []:
        if "=" not in override:
            raise ConfigError(f"--set expects key=value, got {override!r}")
        key, _, raw = override.partition("=")
        values[key.strip()] = pipeline_mod.parse_config_entry(key.strip(), raw)
    return pipeline_mod.build_pipeline_config(values)


def _add_io_arguments(parser):
    parser.add_argument("input", help="input PNM file (- for stdin)")
    parser.add_argument("output", help="output file (- for stdout)")
    _add_config_arguments(parser)


def _add_config_arguments(parser):
    parser.add_argument("--config", help="pipeline config file (flat key = value)")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one config key")


def _cmd_enhance(args) -> int:
    cfg = _load_pipeline_config(args)
    image = _read_image(args.input)
    out = enhance_mod.equalize_brightness(image, cfg.clahe, cfg.working_depth)
    _write_bytes(args.output, encode_pnm(out))
    return 0


def _cmd_adjust(args) -> int:
    cfg = _load_pipeline_config(args)
    image = _read_image(args.input)
    gb = cfg.gain_bias or enhance_mod.auto_gain_bias(
        image, cfg.ceiling, luma_coefficients(cfg.luma_mode))
    out = enhance_mod.adjust_gain_bias(image, gb)
    print(f"gain={gb.gain} bias={gb.bias}", file=sys.stderr)
    _write_bytes(args.output, encode_pnm(out))
    return 0


def _cmd_grayscale(args) -> int:
    image = _read_image(args.input)
    _write_bytes(args.output, encode_pnm(to_grayscale_luminance(image)))
    return 0


def _cmd_sharpen(args) -> int:
    cfg = _load_pipeline_config(args)
    image = _read_image(args.input)
    _write_bytes(args.output, encode_pnm(sharpen_mod.unsharp_mask(image, cfg.unsharp)))
    return 0


def _cmd_binarize(args) -> int:
    cfg = _load_pipeline_config(args)
    image = _read_image(args.input)
    binary, threshold = pipeline_mod.binarize_plane(image, cfg.binarize_polarity)
    print(f"threshold={threshold}", file=sys.stderr)
    _write_bytes(args.output, encode_pbm(binary))
    return 0


def _stage_artifact_paths(output: str):
    stem = output
    for suffix in (".pbm", ".pnm", ".ppm", ".pgm"):
        if stem.endswith(suffix):
            stem = stem[:-len(suffix)]
            break
    return [f"{stem}.stage{k}.pnm" for k in range(1, 5)] + [f"{stem}.stage5.pbm"]


def _cmd_pipeline(args) -> int:
    cfg = _load_pipeline_config(args)
    if args.save_stages:
        cfg = pipeline_mod.dataclasses.replace(cfg, save_stages=True)
    if cfg.save_stages and args.output == "-":
        raise CliError("--save-stages requires a real output path")
    image = _read_image(args.input)
    stages = pipeline_mod.run_pipeline(image, cfg)
    _write_bytes(args.output, encode_pbm(stages.binary))
    if cfg.save_stages:
        paths = _stage_artifact_paths(args.output)
        artifacts = [stages.equalized, stages.adjusted, stages.grayscale,
                     stages.sharpened]
        for path, artifact in zip(paths[:4], artifacts):
            if artifact is not None:
                _write_bytes(path, encode_pnm(artifact))
        _write_bytes(paths[4], encode_pbm(stages.binary))
    gb = stages.chosen_gain_bias
    print(f"gain={gb.gain} bias={gb.bias} threshold={stages.threshold} "
          f"brightness={stages.brightness_after:.4f}", file=sys.stderr)
    return 0


def _cmd_synth(args) -> int:
    spec = evalharness.load_synth_spec(_read_bytes(args.spec))
    image, mask, truth = evalharness.synth_document(spec, args.seed)
    prefix = args.out_prefix
    _write_bytes(f"{prefix}.ppm", encode_pnm(image))
    _write_bytes(f"{prefix}.mask.pbm", encode_pbm(mask))
    _write_bytes(f"{prefix}.txt", (truth + "\n").encode("utf-8"))
    return 0


def _cmd_eval(args) -> int:
    template = args.ocr_cmd or os.environ.get("OCR_CMD")
    if not template:
        raise CliError("no OCR command: pass --ocr-cmd or set OCR_CMD")
    cfg = _load_pipeline_config(args)
    try:
        cmd = OcrCommand(command_template=template, timeout=args.timeout)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    rows = evalharness.evaluate_manifest(args.manifest, cmd, cfg,
                                         workers=args.workers)
    _write_bytes(args.out, evalharness.emit_report(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="docprep",
        description="Document-image enhancement pipeline and OCR evaluation")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    for name, func, doc in [
        ("enhance", _cmd_enhance, "CLAHE brightness equalization on the HSV value plane"),
        ("adjust", _cmd_adjust, "gain/bias brightness and contrast adjustment"),
        ("grayscale", _cmd_grayscale, "luminance grayscale conversion"),
        ("sharpen", _cmd_sharpen, "unsharp masking"),
        ("binarize", _cmd_binarize, "Otsu binarization to a PBM page"),
    ]:
        p = sub.add_parser(name, help=doc)
        _add_io_arguments(p)
        p.set_defaults(func=func)

    p = sub.add_parser("pipeline", help="run the full enhancement pipeline")
    _add_io_arguments(p)
    p.add_argument("--save-stages", action="store_true",
                   help="write every intermediate stage artifact")
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("synth", help="generate a synthetic degraded document")
    p.add_argument("--spec", required=True, help="synth spec file (flat key = value)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-prefix", required=True,
                   help="writes <prefix>.ppm, <prefix>.mask.pbm, <prefix>.txt")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("eval", help="evaluate OCR accuracy raw vs processed")
    p.add_argument("--manifest", required=True,
                   help="TSV manifest: doc_id, image path, truth path")
    p.add_argument("--ocr-cmd", help="command template with {input} and {output} "
                                     "(default: OCR_CMD environment variable)")
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="-", help="report path (- for stdout)")
    _add_config_arguments(p)
    p.set_defaults(func=_cmd_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except OcrError as exc:
        print(f"docprep: OCR failure: {exc}", file=sys.stderr)
        return 2
    except (CliError, ConfigError, PnmFormatError, ValueError, OSError) as exc:
        print(f"docprep: error: {exc}", file=sys.stderr)
        return 1


def main_entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
