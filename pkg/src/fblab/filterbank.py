"""The Filterbank value type, its on-disk FBANK1 format, and FFT responses.

FBANK1 is a plain-text exchange format: one header line

    FBANK1 kind=<kind> n=<N> len=<L> fs=<Hz> c1=<value|-> c2=<value|->

followed by N lines of L space-separated floats written with 17
significant digits (lossless float64 round-trip), LF newlines.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .erb import FC_MAX_HZ, FC_MIN_HZ, ErbParams


class FilterbankKind(enum.Enum):
    GAMMATONE = "gammatone"
    MPGTF = "mpgtf"
    PARAMPGTF = "parampgtf"
    STFT = "stft"
    LEARNED = "learned"
    CUSTOM = "custom"


_GAMMATONE_KINDS = {FilterbankKind.GAMMATONE, FilterbankKind.MPGTF, FilterbankKind.PARAMPGTF}


@dataclass(frozen=True, eq=False)
class Filterbank:
    """An N x L matrix of FIR taps plus provenance metadata.

    `taps[n, k]` is the coefficient of filter n at time index k (sample
    k+1 for the gammatone family, sample k for STFT rows). `center_freqs`
    holds the distinct center-frequency grid, not one entry per row.
    """

    taps: np.ndarray
    sample_rate: int
    kind: FilterbankKind = FilterbankKind.CUSTOM
    center_freqs: np.ndarray | None = None
    erb_params: ErbParams | None = None
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=np.float64)
        if taps.ndim != 2 or taps.shape[0] < 1 or taps.shape[1] < 1:
            raise ValueError(f"taps must be a non-empty 2-D matrix, got shape {taps.shape}")
        if not np.all(np.isfinite(taps)):
            raise ValueError("taps contain non-finite values")
        if not (isinstance(self.sample_rate, (int, np.integer)) and self.sample_rate > 0):
            raise ValueError(f"sample_rate must be a positive integer, got {self.sample_rate!r}")
        taps = taps.copy()
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))
        if self.center_freqs is not None:
            cf = np.asarray(self.center_freqs, dtype=np.float64)
            if cf.ndim != 1 or not np.all(np.diff(cf) > 0):
                raise ValueError("center_freqs must be 1-D and strictly increasing")
            if self.kind in _GAMMATONE_KINDS and (cf[0] < FC_MIN_HZ or cf[-1] > FC_MAX_HZ):
                raise ValueError(
                    f"gammatone center frequencies must lie in [{FC_MIN_HZ:g}, {FC_MAX_HZ:g}] Hz"
                )
            cf = cf.copy()
            cf.setflags(write=False)
            object.__setattr__(self, "center_freqs", cf)

    @property
    def n_filters(self) -> int:
        return self.taps.shape[0]

    @property
    def filter_len(self) -> int:
        return self.taps.shape[1]


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def save_filterbank(path, bank: Filterbank) -> None:
    """Write a bank in FBANK1 format."""
    c1 = _fmt(bank.erb_params.c1) if bank.erb_params else "-"
    c2 = _fmt(bank.erb_params.c2) if bank.erb_params else "-"
    header = (
        f"FBANK1 kind={bank.kind.value} n={bank.n_filters} len={bank.filter_len} "
        f"fs={bank.sample_rate} c1={c1} c2={c2}"
    )
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in bank.taps:
            fh.write(" ".join(_fmt(v) for v in row) + "\n")


def load_filterbank(path) -> Filterbank:
    """Read an FBANK1 file, rejecting dimension or header mismatches."""
    with open(path, "r") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError("not an FBANK1 file: empty")
    head = lines[0].split()
    if not head or head[0] != "FBANK1":
        raise ValueError("not an FBANK1 file: bad magic")
    fields = {}
    for token in head[1:]:
        if "=" not in token:
            raise ValueError(f"bad FBANK1 header token {token!r}")
        key, value = token.split("=", 1)
        fields[key] = value
    try:
        kind = FilterbankKind(fields["kind"])
        n = int(fields["n"])
        length = int(fields["len"])
        fs = int(fields["fs"])
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad FBANK1 header: {exc}") from exc

    rows = [line for line in lines[1:] if line.strip()]
    if len(rows) != n:
        raise ValueError(f"FBANK1 dimension mismatch: header says {n} filters, file has {len(rows)}")
    taps = np.empty((n, length), dtype=np.float64)
    for i, line in enumerate(rows):
        values = line.split()
        if len(values) != length:
            raise ValueError(f"FBANK1 dimension mismatch on row {i}: expected {length} taps, got {len(values)}")
        taps[i] = [float(v) for v in values]
    if not np.all(np.isfinite(taps)):
        raise ValueError("FBANK1 taps contain non-finite values")

    erb_params = None
    if fields.get("c1", "-") != "-" and fields.get("c2", "-") != "-":
        erb_params = ErbParams(float(fields["c1"]), float(fields["c2"]))
    return Filterbank(taps, fs, kind=kind, erb_params=erb_params)


def frequency_response(bank: Filterbank, n_fft: int = 512) -> tuple[np.ndarray, np.ndarray]:
    """FFT magnitude of every filter, zero-padded to `n_fft` points.

    Returns:
        (bin_hz, magnitudes) with bin_hz of shape (n_fft,) covering the
        full 0 .. fs grid and magnitudes of shape (n_filters, n_fft).
    """
    if n_fft < bank.filter_len:
        raise ValueError(f"n_fft must be >= filter length, got {n_fft} < {bank.filter_len}")
    mags = np.abs(np.fft.fft(bank.taps, n=n_fft, axis=1))
    bin_hz = np.arange(n_fft) * (bank.sample_rate / n_fft)
    return bin_hz, mags


def peak_response_hz(bank: Filterbank, n_fft: int = 512) -> np.ndarray:
    """Frequency of the FFT magnitude argmax per filter, folded to [0, fs/2]."""
    bin_hz, mags = frequency_response(bank, n_fft)
    half = n_fft // 2 + 1
    peaks = np.argmax(mags[:, :half], axis=1)
    return bin_hz[peaks]


def numerical_rank(matrix: np.ndarray, rcond: float = 1e-10) -> int:
    """Rank by counting singular values above rcond * sigma_max."""
    s = np.linalg.svd(np.asarray(matrix, dtype=np.float64), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rcond * s[0]))
