"""Minimal RIFF/WAVE reader and writer for mono PCM16 and IEEE float32 files.

Hand-rolled on `struct` so malformed headers, unsupported codecs, and
multichannel files raise distinct, stable error types.
"""

from __future__ import annotations

import struct

import numpy as np

from .dsp import Waveform


class WavError(Exception):
    """Base class for WAV I/O failures."""


class MalformedWavError(WavError):
    """File is not a well-formed RIFF/WAVE stream."""


class UnsupportedCodecError(WavError):
    """Format tag / bit depth combination we do not decode."""


class MultichannelError(WavError):
    """More than one channel; only mono is supported."""


_PCM = 1
_IEEE_FLOAT = 3

_INT16_FULL_SCALE = 32767.0


def read_wav(path) -> Waveform:
    """Read a mono PCM16 or float32 WAV file.

    PCM16 samples are scaled to [-1, 1] by 1/32767; float32 samples are
    taken as-is (widened to float64).
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedWavError("malformed header: not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8:pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if chunk_size < 16 or len(body) < 16:
                raise MalformedWavError("malformed header: truncated fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            if len(body) < chunk_size:
                raise MalformedWavError("malformed header: truncated data chunk")
            payload = body
        pos += 8 + chunk_size + (chunk_size & 1)  # chunks are word-aligned

    if fmt is None or payload is None:
        raise MalformedWavError("malformed header: missing fmt or data chunk")

    audio_format, channels, sample_rate, _, _, bits = fmt
    if channels != 1:
        raise MultichannelError(f"multichannel unsupported: {channels} channels")
    if audio_format == _PCM and bits == 16:
        raw = np.frombuffer(payload[:len(payload) - len(payload) % 2], dtype="<i2")
        samples = raw.astype(np.float64) / _INT16_FULL_SCALE
    elif audio_format == _IEEE_FLOAT and bits == 32:
        raw = np.frombuffer(payload[:len(payload) - len(payload) % 4], dtype="<f4")
        samples = raw.astype(np.float64)
    else:
        raise UnsupportedCodecError(f"unsupported codec: format tag {audio_format}, {bits}-bit")
    return Waveform(samples, int(sample_rate))


def write_wav(path, w: Waveform, encoding: str = "pcm16") -> None:
    """Write a mono WAV file.

    encoding: "pcm16" quantizes by round(x * 32767) with clipping to the
    int16 range; "float32" stores samples cast to single precision.
    """
    if encoding == "pcm16":
        audio_format, bits = _PCM, 16
        q = np.clip(np.round(w.samples * _INT16_FULL_SCALE), -32768, 32767)
        payload = q.astype("<i2").tobytes()
    elif encoding == "float32":
        audio_format, bits = _IEEE_FLOAT, 32
        payload = w.samples.astype("<f4").tobytes()
    else:
        raise ValueError(f"unknown encoding {encoding!r} (expected 'pcm16' or 'float32')")

    block_align = bits // 8
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH", 16, audio_format, 1, w.sample_rate, w.sample_rate * block_align, block_align, bits
    )
    header += b"data" + struct.pack("<I", len(payload))
    with open(path, "wb") as fh:
        fh.write(header + payload)
