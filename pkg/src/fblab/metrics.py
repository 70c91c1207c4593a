"""Scale-invariant source-to-noise ratio (SI-SNR).

The estimate is projected onto the reference; the ratio of projection
energy to residual energy, in dB, is invariant under positive scaling of
the estimate. Means are not removed before the projection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dsp import Waveform

#: Reporting/loss clip for (near-)perfect reconstructions, in dB.
SI_SNR_CLIP_DB = 60.0


@dataclass(frozen=True)
class SiSnrResult:
    """SI-SNR in dB (may be +/-inf) plus the two energies behind it."""

    value_db: float
    target_energy: float
    noise_energy: float


def si_snr(estimate: Waveform, reference: Waveform) -> SiSnrResult:
    """SI-SNR of `estimate` against `reference`.

    With s_t = (<est, ref> / ||ref||^2) * ref and e = est - s_t, the value
    is 10*log10(||s_t||^2 / ||e||^2). A perfect reconstruction yields
    +inf; a zero or orthogonal estimate yields -inf. Raises on a
    zero-energy reference.
    """
    if estimate.sample_rate != reference.sample_rate:
        raise ValueError(
            f"sample rate mismatch: estimate {estimate.sample_rate} Hz, reference {reference.sample_rate} Hz"
        )
    if len(estimate) != len(reference):
        raise ValueError(f"length mismatch: estimate {len(estimate)}, reference {len(reference)}")
    est = estimate.samples
    ref = reference.samples
    ref_energy = float(np.dot(ref, ref))
    if ref_energy == 0.0:
        raise ValueError("zero-energy reference")
    beta = float(np.dot(est, ref)) / ref_energy
    target = beta * ref
    residual = est - target
    target_energy = float(np.dot(target, target))
    noise_energy = float(np.dot(residual, residual))
    if noise_energy == 0.0:
        value = math.inf if target_energy > 0.0 else -math.inf
    elif target_energy == 0.0:
        value = -math.inf
    else:
        value = 10.0 * math.log10(target_energy / noise_energy)
    return SiSnrResult(value, target_energy, noise_energy)


def clip_si_snr(value_db: float, clip_db: float = SI_SNR_CLIP_DB) -> float:
    """Clip SI-SNR from above so perfect reconstructions do not poison means."""
    return min(value_db, clip_db)
