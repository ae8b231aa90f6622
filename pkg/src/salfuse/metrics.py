"""Objective fusion-quality metrics: MI, SSIM, QI, and Qabf.

All metrics operate on grayscale; color inputs are converted first.  For a
source pair (A, B) and fused image F the reported values follow the usual
fusion conventions: MI(A;F) + MI(B;F), mean SSIM / QI over the two sources,
and the gradient-weighted edge-preservation value Qabf over both sources.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ImageTooSmallError, InvalidInputError
from .image import Image, to_gray

# SSIM stabilizers on the [0,1] intensity scale.
SSIM_C1 = 0.01 ** 2
SSIM_C2 = 0.03 ** 2
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5

QI_WINDOW = 8

# Qabf sigmoid constants (canonical published values).
QABF_GAMMA_G = 0.9994
QABF_KAPPA_G = -15.0
QABF_SIGMA_G = 0.5
QABF_GAMMA_A = 0.9879
QABF_KAPPA_A = -22.0
QABF_SIGMA_A = 0.8


def _gray_plane(img: Image) -> np.ndarray:
    return to_gray(img).data


def _check_same_shape(a: Image, f: Image) -> None:
    if a.data.shape[:2] != f.data.shape[:2]:
        raise InvalidInputError(
            f"images must share dimensions, got {a.data.shape[:2]} vs {f.data.shape[:2]}"
        )


def _quantize_u8(plane: np.ndarray) -> np.ndarray:
    return np.rint(np.clip(plane, 0.0, 1.0) * 255.0).astype(np.int64)


def mutual_information(a: Image, f: Image) -> float:
    """Mutual information in bits over a 256-bin joint histogram.

    Intensities are quantized to 8 bits; MI(X, X) equals the marginal
    entropy H(X).
    """
    _check_same_shape(a, f)
    qa = _quantize_u8(_gray_plane(a)).ravel()
    qf = _quantize_u8(_gray_plane(f)).ravel()
    joint = np.bincount(qa * 256 + qf, minlength=256 * 256).astype(np.float64)
    joint = joint.reshape(256, 256) / qa.size
    pa = joint.sum(axis=1)
    pf = joint.sum(axis=0)
    outer = pa[:, None] * pf[None, :]
    nz = joint > 0
    return float(np.sum(joint[nz] * np.log2(joint[nz] / outer[nz])))


def _ssim_window() -> np.ndarray:
    d = np.arange(SSIM_WINDOW, dtype=np.float64) - (SSIM_WINDOW - 1) / 2.0
    w = np.exp(-(d * d) / (2.0 * SSIM_SIGMA * SSIM_SIGMA))
    return w / w.sum()


_SSIM_W = _ssim_window()


def _filter_valid(plane: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Separable valid-mode filtering (no padding; output shrinks by 2*r)."""
    t = sliding_window_view(plane, w.size, axis=1) @ w
    return sliding_window_view(t, w.size, axis=0) @ w


def ssim(a: Image, f: Image) -> float:
    """Mean structural similarity over valid 11x11 Gaussian windows."""
    _check_same_shape(a, f)
    da = _gray_plane(a)
    df = _gray_plane(f)
    if min(da.shape) < SSIM_WINDOW:
        raise ImageTooSmallError(
            f"SSIM needs images at least {SSIM_WINDOW}px on a side, got {da.shape[1]}x{da.shape[0]}"
        )
    w = _SSIM_W
    mu_a = _filter_valid(da, w)
    mu_f = _filter_valid(df, w)
    var_a = _filter_valid(da * da, w) - mu_a * mu_a
    var_f = _filter_valid(df * df, w) - mu_f * mu_f
    cov = _filter_valid(da * df, w) - mu_a * mu_f
    num = (2.0 * mu_a * mu_f + SSIM_C1) * (2.0 * cov + SSIM_C2)
    den = (mu_a * mu_a + mu_f * mu_f + SSIM_C1) * (var_a + var_f + SSIM_C2)
    return float(np.mean(num / den))


def _window_sums(plane: np.ndarray, n: int) -> np.ndarray:
    h, w = plane.shape
    ii = np.zeros((h + 1, w + 1), dtype=np.float64)
    np.cumsum(plane, axis=0, out=ii[1:, 1:])
    np.cumsum(ii[1:, 1:], axis=1, out=ii[1:, 1:])
    return ii[n:, n:] - ii[:-n, n:] - ii[n:, :-n] + ii[:-n, :-n]


def quality_index(a: Image, f: Image) -> float:
    """Universal quality index over sliding 8x8 windows.

    Windows whose denominator is exactly zero (flat-black or jointly
    constant) are skipped; returns 0.0 if no window is usable.
    """
    _check_same_shape(a, f)
    da = _gray_plane(a)
    df = _gray_plane(f)
    n = QI_WINDOW
    if min(da.shape) < n:
        raise ImageTooSmallError(
            f"QI needs images at least {n}px on a side, got {da.shape[1]}x{da.shape[0]}"
        )
    count = float(n * n)
    mu_a = _window_sums(da, n) / count
    mu_f = _window_sums(df, n) / count
    var_a = _window_sums(da * da, n) / count - mu_a * mu_a
    var_f = _window_sums(df * df, n) / count - mu_f * mu_f
    cov = _window_sums(da * df, n) / count - mu_a * mu_f
    num = 4.0 * cov * mu_a * mu_f
    den = (var_a + var_f) * (mu_a * mu_a + mu_f * mu_f)
    usable = den != 0.0
    if not usable.any():
        return 0.0
    return float(np.mean(num[usable] / den[usable]))


def _sobel(plane: np.ndarray):
    p = np.pad(plane, 1, mode="edge")
    gx = (
        (p[:-2, 2:] + 2.0 * p[1:-1, 2:] + p[2:, 2:])
        - (p[:-2, :-2] + 2.0 * p[1:-1, :-2] + p[2:, :-2])
    )
    gy = (
        (p[2:, :-2] + 2.0 * p[2:, 1:-1] + p[2:, 2:])
        - (p[:-2, :-2] + 2.0 * p[:-2, 1:-1] + p[:-2, 2:])
    )
    return gx, gy


def _strength_orientation(plane: np.ndarray):
    gx, gy = _sobel(plane)
    g = np.hypot(gx, gy)
    alpha = np.arctan2(gy, gx)
    alpha = np.where(alpha > np.pi / 2, alpha - np.pi, alpha)
    alpha = np.where(alpha <= -np.pi / 2, alpha + np.pi, alpha)
    return g, alpha


def _edge_preservation(g_src, a_src, g_f, a_f) -> np.ndarray:
    gmax = np.maximum(g_src, g_f)
    gmin = np.minimum(g_src, g_f)
    G = np.divide(gmin, gmax, out=np.zeros_like(gmax), where=gmax > 0)
    A = 1.0 - np.abs(a_src - a_f) * (2.0 / np.pi)
    qg = QABF_GAMMA_G / (1.0 + np.exp(QABF_KAPPA_G * (G - QABF_SIGMA_G)))
    qa = QABF_GAMMA_A / (1.0 + np.exp(QABF_KAPPA_A * (A - QABF_SIGMA_A)))
    return qg * qa


def _qabf_pooled(sources: list[Image], fused: Image) -> float:
    for s in sources:
        _check_same_shape(s, fused)
    g_f, a_f = _strength_orientation(_gray_plane(fused))
    num = 0.0
    den = 0.0
    for s in sources:
        g_s, a_s = _strength_orientation(_gray_plane(s))
        q = _edge_preservation(g_s, a_s, g_f, a_f)
        num += float(np.sum(q * g_s))
        den += float(np.sum(g_s))
    if den == 0.0:
        return 0.0
    return num / den


def qabf(a: Image, b: Image, f: Image) -> float:
    """Gradient-information preservation of (A, B) in F.

    Sobel strength/orientation agreement squashed through the canonical
    sigmoids, weighted by source gradient strength; zero-gradient pixels
    carry zero weight.  Returns 0.0 when both sources are gradient-free.
    """
    return _qabf_pooled([a, b], f)


@dataclass(frozen=True)
class QualityReport:
    """Aggregate metric values plus their per-source components."""

    mi: float
    ssim: float
    qi: float
    qabf: float
    mi_components: tuple[float, ...]
    ssim_components: tuple[float, ...]
    qi_components: tuple[float, ...]

    def __post_init__(self):
        for v in (self.mi, self.ssim, self.qi, self.qabf):
            if not math.isfinite(v):
                raise InvalidInputError(f"metric values must be finite, got {v}")

    def as_dict(self) -> dict:
        return {
            "mi": self.mi,
            "ssim": self.ssim,
            "qi": self.qi,
            "qabf": self.qabf,
            "mi_components": list(self.mi_components),
            "ssim_components": list(self.ssim_components),
            "qi_components": list(self.qi_components),
        }


def evaluate(sources: list[Image], fused: Image) -> QualityReport:
    """Score a fused image against its sources.

    MI is summed over sources (the usual pair convention extended to n),
    SSIM and QI are averaged, and Qabf pools all sources' gradients.
    """
    if len(sources) < 2:
        raise InvalidInputError("evaluation needs at least 2 source images")
    mi_parts = tuple(mutual_information(s, fused) for s in sources)
    ssim_parts = tuple(ssim(s, fused) for s in sources)
    qi_parts = tuple(quality_index(s, fused) for s in sources)
    return QualityReport(
        mi=float(sum(mi_parts)),
        ssim=float(np.mean(ssim_parts)),
        qi=float(np.mean(qi_parts)),
        qabf=_qabf_pooled(sources, fused),
        mi_components=mi_parts,
        ssim_components=ssim_parts,
        qi_components=qi_parts,
    )


def write_report_json(report: QualityReport, path, meta: dict | None = None) -> None:
    """Serialize a report (plus caller metadata) as a JSON document."""
    doc = dict(meta or {})
    doc.update(report.as_dict())
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def write_report_csv(report: QualityReport, path, image_set: str, dataset: str = "") -> None:
    """Serialize a report as CSV, one row per (dataset, image-set, metric)."""
    rows = [
        ("mi", report.mi, report.mi_components),
        ("ssim", report.ssim, report.ssim_components),
        ("qi", report.qi, report.qi_components),
        ("qabf", report.qabf, ()),
    ]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dataset", "image_set", "metric", "value", "components"])
        for name, value, comps in rows:
            writer.writerow(
                [dataset, image_set, name, repr(value), ";".join(repr(c) for c in comps)]
            )
