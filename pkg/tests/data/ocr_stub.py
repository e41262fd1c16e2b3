"""Deterministic stand-in for an external OCR engine, used by the test suite.

Usage: python ocr_stub.py INPUT OUTPUT

The document id is the input filename's first dot-separated component; a
".proc." infix marks the pipeline-processed variant.  Raw outputs drop the
first few characters of the truth so edit distances are known exactly.
"""
import os
import sys

TRUTHS = {
    "DOC1": "Some people with low vision need larger text.",
    "DOC2": "Letters are hard to distinguish.",
}

# characters dropped from the front of the truth per (doc, variant)
DROPPED = {
    ("DOC1", "raw"): 5,
    ("DOC1", "proc"): 1,
    ("DOC2", "raw"): 2,
    ("DOC2", "proc"): 0,
}


def main() -> int:
    if len(sys.argv) != 3:
        print("usage: ocr_stub.py INPUT OUTPUT", file=sys.stderr)
        return 2
    input_path, output_path = sys.argv[1], sys.argv[2]
    name = os.path.basename(input_path)
    doc_id = name.split(".")[0]
    variant = "proc" if ".proc." in name else "raw"
    if doc_id not in TRUTHS:
        print(f"unknown document {doc_id}", file=sys.stderr)
        return 3
    text = TRUTHS[doc_id][DROPPED[(doc_id, variant)]:]
    with open(output_path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
