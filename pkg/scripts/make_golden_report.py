#!/usr/bin/env python3
"""Regenerate the hermetic eval fixtures under tests/data.

Writes the two stub-engine page images, their ground-truth text files, the
manifest, and the frozen golden report.  Run only when the report format or
the stub engine's behavior changes intentionally; the acceptance suite
compares against these bytes exactly.
"""
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from docprep.evalharness import (OcrCommand, SynthDocSpec, emit_report,
                                 evaluate_manifest, synth_document)
from docprep.raster import RasterImage, encode_pnm

TRUTHS = {
    "DOC1": "Some people with low vision need larger text.",
    "DOC2": "Letters are hard to distinguish.",
}


def main() -> int:
    data = ROOT / "tests" / "data"
    data.mkdir(exist_ok=True)

    spec = SynthDocSpec(width=200, height=60, lines=("HELLO WORLD",), scale=2)
    for seed, doc in enumerate(TRUTHS, start=1):
        image, _, _ = synth_document(spec, seed=seed)
        gray = RasterImage.from_array(image.data[..., 0].copy(), depth=8)
        (data / f"{doc}.pgm").write_bytes(encode_pnm(gray))
    for doc, text in TRUTHS.items():
        (data / f"{doc}.txt").write_text(text + "\n")
    (data / "manifest.tsv").write_text(
        "".join(f"{doc}\t{doc}.pgm\t{doc}.txt\n" for doc in TRUTHS))

    cmd = OcrCommand(f"{sys.executable} {data / 'ocr_stub.py'} {{input}} {{output}}")
    report = emit_report(evaluate_manifest(data / "manifest.tsv", cmd))
    (data / "golden_report.txt").write_bytes(report)
    sys.stdout.write(report.decode("utf-8"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
