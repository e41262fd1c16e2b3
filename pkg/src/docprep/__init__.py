"""Document-image enhancement for OCR: CLAHE illumination equalization,
gain/bias adjustment, luminance grayscale, unsharp masking, Otsu
binarization, and a character-accuracy evaluation harness."""

from .raster import (BinaryImage, Histogram, RasterImage, convert_depth,
                     decode_pbm, decode_pnm, encode_pbm, encode_pnm, histogram)
from .colorspace import (LumaCoefficients, PAPER_LITERAL_LUMA, STANDARD_LUMA,
                         hsv_to_rgb, luma, mean_luma_brightness, rgb_to_hsv,
                         to_grayscale_luminance)
from .enhance import (ClaheConfig, GainBias, adjust_gain_bias, auto_gain_bias,
                      clahe_apply, clip_limit, clipped_mapping,
                      equalize_brightness)
from .sharpen import Kernel, UnsharpConfig, convolve, gaussian_kernel, halo_metric, unsharp_mask
from .binarize import OtsuStats, ThresholdDecision, apply_threshold, otsu_stats, otsu_threshold
from .pipeline import PipelineConfig, StageOutputs, load_config, run_pipeline
from .evalharness import (AccuracyReport, ComparisonRow, OcrCommand, SynthDocSpec,
                          accuracy, edit_distance, emit_report, evaluate_document,
                          normalize_text, run_ocr, synth_document)

__version__ = "0.1.0"
