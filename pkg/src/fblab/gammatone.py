"""Gammatone impulse responses and multi-phase gammatone filterbanks.

A gammatone filter is the classic cochlear model

    g(t) = alpha * t^(n-1) * exp(-2*pi*b*t) * cos(2*pi*fc*t + phi),  t > 0

truncated here to short FIR prototypes (2 ms at the canonical 8 kHz rate,
i.e. 16 taps) for low-latency analysis. The multi-phase construction
covers each center frequency with several phase shifts evenly spaced on
[0, pi) and appends the negation of every filter, so rectified encoder
outputs keep energy at every center. Center frequencies sit one ERB-rate
unit apart from 100 Hz up to at most 4000 Hz.

The parameterized variant exposes the same pipeline as a deterministic
function of (c1, c2) so those constants can be fitted numerically; the
first center stays pinned at 100 Hz regardless of the parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .erb import FC_MAX_HZ, FC_MIN_HZ, ErbParams, bandwidth_b, center_frequency_grid, erb
from .filterbank import Filterbank, FilterbankKind

#: Canonical prototype length: 2 ms of signal.
FILTER_LENGTH_SECONDS = 0.002


@dataclass(frozen=True)
class GammatoneSpec:
    """Parameters of a single FIR-truncated gammatone filter."""

    order_n: int
    amplitude_alpha: float
    phase_phi: float
    center_fc: float
    bandwidth_b: float
    length: int
    sample_rate: int

    def __post_init__(self):
        if self.order_n < 1:
            raise ValueError(f"order_n must be >= 1, got {self.order_n}")
        if self.bandwidth_b <= 0:
            raise ValueError(f"bandwidth_b must be > 0, got {self.bandwidth_b}")
        if not 0 < self.center_fc < self.sample_rate / 2:
            raise ValueError(
                f"center_fc must lie in (0, fs/2) = (0, {self.sample_rate / 2}), got {self.center_fc}"
            )
        if self.length < 1:
            raise ValueError(f"length must be >= 1, got {self.length}")


def gammatone_ir(spec: GammatoneSpec) -> np.ndarray:
    """Sampled gammatone impulse response, peak-normalized to max |tap| = 1.

    Tap k is g((k+1)/fs): the time grid starts one sample period after
    zero because the envelope t^(n-1) makes g(0) an uninformative tap
    for n >= 2.
    """
    t = (np.arange(spec.length) + 1.0) / spec.sample_rate
    ir = (
        spec.amplitude_alpha
        * t ** (spec.order_n - 1)
        * np.exp(-2.0 * math.pi * spec.bandwidth_b * t)
        * np.cos(2.0 * math.pi * spec.center_fc * t + spec.phase_phi)
    )
    peak = np.max(np.abs(ir))
    if peak == 0.0:
        raise ValueError("degenerate gammatone filter: all taps are zero")
    return ir / peak


def _build_multiphase(
    p: ErbParams,
    n_filters: int,
    frame_len: int,
    sample_rate: int,
    kind: FilterbankKind,
    order: int,
    alpha: float,
) -> Filterbank:
    if n_filters < 2 or n_filters % 2 != 0:
        raise ValueError(f"n_filters must be a positive even number, got {n_filters}")
    centers = center_frequency_grid(p, FC_MIN_HZ, FC_MAX_HZ)
    m = len(centers)
    n_half = n_filters // 2
    per_center = n_half // m
    if per_center == 0:
        raise ValueError(
            f"not enough filters for one phase per center: n_filters={n_filters} < 2*M={2 * m}"
        )
    # Surplus phase variants go to the lowest centers, where speech energy sits.
    counts = np.full(m, per_center, dtype=int)
    counts[: n_half - per_center * m] += 1

    rows = np.empty((n_half, frame_len), dtype=np.float64)
    idx = 0
    for fc, count in zip(centers, counts):
        b = bandwidth_b(erb(float(fc), p), order)
        for k in range(count):
            phi = math.pi * k / count  # phases evenly spaced on [0, pi)
            spec = GammatoneSpec(order, alpha, phi, float(fc), b, frame_len, sample_rate)
            rows[idx] = gammatone_ir(spec)
            idx += 1
    taps = np.vstack([rows, -rows])  # the negated copies supply [pi, 2*pi)
    return Filterbank(taps, sample_rate, kind=kind, center_freqs=centers, erb_params=p)


def build_mpgtf(
    p: ErbParams,
    n_filters: int = 512,
    frame_len: int | None = None,
    sample_rate: int = 8000,
    *,
    order: int = 2,
    alpha: float = 1.0,
) -> Filterbank:
    """Build a multi-phase gammatone filterbank.

    `frame_len` defaults to 2 ms at the given sample rate (16 taps at
    8 kHz). The result has exactly `n_filters` rows: n_filters/2 phase
    variants spread over the ERB-spaced centers, plus their negations.
    """
    if frame_len is None:
        frame_len = round(FILTER_LENGTH_SECONDS * sample_rate)
    return _build_multiphase(p, n_filters, frame_len, sample_rate, FilterbankKind.MPGTF, order, alpha)


def build_parampgtf(
    p: ErbParams,
    n_filters: int = 512,
    frame_len: int | None = None,
    sample_rate: int = 8000,
    *,
    order: int = 2,
    alpha: float = 1.0,
) -> Filterbank:
    """Build the parameterized multi-phase gammatone bank at the supplied (c1, c2).

    Identical pipeline to `build_mpgtf`, evaluated at the current
    parameter values: bandwidths follow the ERB of each center and the
    center grid follows the ERB-rate recursion, with the first center
    pinned at 100 Hz. Deterministic in `p`, so an optimizer can rebuild
    the bank every iteration; at the default (24.7, 9.265) the taps are
    bit-identical to `build_mpgtf`.
    """
    if frame_len is None:
        frame_len = round(FILTER_LENGTH_SECONDS * sample_rate)
    return _build_multiphase(p, n_filters, frame_len, sample_rate, FilterbankKind.PARAMPGTF, order, alpha)
