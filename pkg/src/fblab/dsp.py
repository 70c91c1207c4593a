"""Time-domain signal primitives: waveforms, framing, overlap-add, mixing.

Everything operates on immutable float64 values. Framing follows strided
1-D convolution semantics: the trailing partial frame is zero-padded, and
overlap-add sums shifted synthesis frames without window compensation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Waveform:
    """A mono time-domain signal with a sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError(f"waveform samples must be 1-D, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("waveform contains non-finite samples")
        if not (isinstance(self.sample_rate, (int, np.integer)) and self.sample_rate > 0):
            raise ValueError(f"sample_rate must be a positive integer, got {self.sample_rate!r}")
        object.__setattr__(self, "samples", _frozen(samples))
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.shape[0]

    def energy(self) -> float:
        """Sum of squared samples."""
        return float(np.dot(self.samples, self.samples))

    def scaled(self, gain: float) -> "Waveform":
        """Return a copy with every sample multiplied by `gain`."""
        return Waveform(self.samples * float(gain), self.sample_rate)


@dataclass(frozen=True)
class FrameParams:
    """Analysis frame length L and hop D, both in samples, with 1 <= D <= L."""

    frame_len: int
    hop: int

    def __post_init__(self):
        if self.frame_len < 1:
            raise ValueError(f"frame_len must be >= 1, got {self.frame_len}")
        if not 1 <= self.hop <= self.frame_len:
            raise ValueError(f"hop must satisfy 1 <= hop <= frame_len, got hop={self.hop}, frame_len={self.frame_len}")


@dataclass(frozen=True)
class MixSpec:
    """Target SNR in dB for a two-source mixture plus a reproducibility seed.

    The conventional sampling range for randomized experiments is
    [-5, +5] dB; `snr_db` itself may be any finite value.
    """

    snr_db: float
    seed: int = 0

    def __post_init__(self):
        if not math.isfinite(self.snr_db):
            raise ValueError(f"snr_db must be finite, got {self.snr_db!r}")


#: Default range experiments draw mixture SNRs from, in dB.
SNR_RANGE_DB = (-5.0, 5.0)


def num_frames(n_samples: int, p: FrameParams) -> int:
    """Frame count for a signal of `n_samples`: ceil(max(n - L, 0) / D) + 1."""
    overflow = max(n_samples - p.frame_len, 0)
    return -(-overflow // p.hop) + 1


def frame_signal(x: Waveform, p: FrameParams) -> np.ndarray:
    """Slice `x` into overlapping frames of length L at hop D.

    Frame i holds samples x[i*D : i*D + L]; samples past the end of the
    signal read as zero, so the last frame may be zero-padded.

    Returns:
        Array of shape (num_frames, frame_len).
    """
    n = len(x)
    if n == 0:
        raise ValueError("empty input")
    count = num_frames(n, p)
    padded = np.zeros((count - 1) * p.hop + p.frame_len, dtype=np.float64)
    padded[:n] = x.samples
    idx = np.arange(count)[:, None] * p.hop + np.arange(p.frame_len)[None, :]
    return padded[idx]


def overlap_add(frames: np.ndarray, p: FrameParams, sample_rate: int) -> Waveform:
    """Sum shifted frames: output[t] = sum_i frames[i, t - i*D].

    Overlapping regions are summed as-is (no synthesis window or overlap
    compensation). Output length is (num_frames - 1) * D + L.
    """
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 2:
        raise ValueError(f"frames must be a 2-D array, got shape {frames.shape}")
    if frames.shape[1] != p.frame_len:
        raise ValueError(f"frame length mismatch: frames have {frames.shape[1]} samples, expected {p.frame_len}")
    count = frames.shape[0]
    out = np.zeros((count - 1) * p.hop + p.frame_len, dtype=np.float64)
    for i in range(count):  # fixed order keeps the reduction deterministic
        start = i * p.hop
        out[start:start + p.frame_len] += frames[i]
    return Waveform(out, sample_rate)


def mix_at_snr(s1: Waveform, s2: Waveform, spec: MixSpec) -> tuple[Waveform, float]:
    """Mix two sources at a given SNR: x = s1 + g * s2.

    The gain g = sqrt((E1 / E2) * 10^(-snr_db / 10)) makes the energy
    ratio of s1 to g*s2 equal snr_db exactly. Sources of different
    lengths are truncated to the shorter one before mixing.

    Returns:
        (mixture, g)
    """
    if s1.sample_rate != s2.sample_rate:
        raise ValueError(f"sample rates differ: {s1.sample_rate} vs {s2.sample_rate}")
    n = min(len(s1), len(s2))
    if n == 0:
        raise ValueError("empty input")
    a = s1.samples[:n]
    b = s2.samples[:n]
    e1 = float(np.dot(a, a))
    e2 = float(np.dot(b, b))
    if e1 == 0.0 or e2 == 0.0:
        raise ValueError("silent source")
    g = math.sqrt((e1 / e2) * 10.0 ** (-spec.snr_db / 10.0))
    return Waveform(a + g * b, s1.sample_rate), g


def write_samples_csv(path, x: Waveform | np.ndarray) -> None:
    """Write samples as CSV, one decimal value per line, LF newlines.

    Accepts a waveform or any array; frame matrices are written row by
    row (C order), still one sample per line.
    """
    samples = x.samples if isinstance(x, Waveform) else np.asarray(x, dtype=np.float64)
    with open(path, "w", newline="\n") as fh:
        for v in samples.ravel():
            fh.write(f"{float(v)!r}\n")
