"""Oracle-mask separation experiments and their reports.

Ideal ratio masks computed from the true sources stand in for a learned
separator, so encoder/decoder feature families can be compared on their
own merits at desk scale: encode the mixture, weight it by each source's
share of the magnitude in every time-frequency cell, decode, and score
SI-SNR against the scaled sources that actually sum to the mixture.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .codec import Mask, TFRepresentation, apply_mask, decode, encode
from .dsp import FrameParams, MixSpec, SNR_RANGE_DB, Waveform, mix_at_snr
from .filterbank import Filterbank
from .metrics import si_snr


@dataclass(frozen=True, eq=False)
class MixtureItem:
    """One separation problem: a mixture and the scaled sources it sums."""

    item_id: str
    mixture: Waveform
    sources: tuple[Waveform, ...]


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    """Per-source SI-SNR for each item plus their arithmetic mean."""

    per_item: tuple[tuple[str, tuple[float, ...]], ...]
    mean_si_snr_db: float
    trainer_trace: tuple | None = None

    @staticmethod
    def from_scores(per_item, trainer_trace=None) -> "ExperimentReport":
        rows = tuple((str(item_id), tuple(float(v) for v in values)) for item_id, values in per_item)
        flat = [v for _, values in rows for v in values]
        if not flat:
            raise ValueError("report needs at least one score")
        return ExperimentReport(rows, float(np.mean(flat)), trainer_trace)


def make_mixture_item(item_id: str, s1: Waveform, s2: Waveform, spec: MixSpec) -> MixtureItem:
    """Mix two sources at spec.snr_db and keep the scaled pair as targets.

    The targets are the addends of the mixture itself (s1 and g*s2, both
    truncated to the common length), so a perfect separator would score
    +inf SI-SNR on each.
    """
    return make_multi_mixture_item(item_id, [s1, s2], spec)


def make_multi_mixture_item(item_id: str, sources, spec: MixSpec) -> MixtureItem:
    """Mix two or more sources; every tail source sits spec.snr_db below the first.

    Sources are truncated to the common length; source c >= 2 is scaled by
    its own gain g_c = sqrt((E1 / E_c) * 10^(-snr_db / 10)). With two
    sources this is exactly `mix_at_snr`.
    """
    if len(sources) < 2:
        raise ValueError(f"need at least 2 sources, got {len(sources)}")
    n = min(len(s) for s in sources)
    head = Waveform(sources[0].samples[:n], sources[0].sample_rate)
    targets = [head]
    total = head.samples.copy()
    for s in sources[1:]:
        tail = Waveform(s.samples[:n], s.sample_rate)
        _, g = mix_at_snr(head, tail, spec)
        scaled = tail.scaled(g)
        targets.append(scaled)
        total += scaled.samples
    return MixtureItem(item_id, Waveform(total, head.sample_rate), tuple(targets))


def make_sinusoid_mixture_items(
    n_items: int,
    seed: int,
    sample_rate: int = 8000,
    duration_s: float = 0.5,
    low_band: tuple[float, float] = (250.0, 1200.0),
    high_band: tuple[float, float] = (1500.0, 3600.0),
    snr_range_db: tuple[float, float] = SNR_RANGE_DB,
) -> list[MixtureItem]:
    """Deterministic synthetic set: pairs of sinusoids from disjoint bands.

    Each item mixes one low-band and one high-band tone (random frequency
    and phase) at an SNR drawn uniformly from `snr_range_db`. Everything
    derives from `seed`, so the set doubles as a reproducible corpus for
    trainer and CLI tests.
    """
    rng = np.random.default_rng(seed)
    t = np.arange(int(round(duration_s * sample_rate))) / sample_rate
    items = []
    for i in range(n_items):
        f_lo = rng.uniform(*low_band)
        f_hi = rng.uniform(*high_band)
        ph_lo, ph_hi = rng.uniform(0.0, 2.0 * np.pi, size=2)
        snr_db = rng.uniform(*snr_range_db)
        s1 = Waveform(0.5 * np.sin(2.0 * np.pi * f_lo * t + ph_lo), sample_rate)
        s2 = Waveform(0.5 * np.sin(2.0 * np.pi * f_hi * t + ph_hi), sample_rate)
        items.append(make_mixture_item(f"synth-{i:03d}", s1, s2, MixSpec(snr_db, seed)))
    return items


def oracle_irm_masks(
    sources: tuple[Waveform, ...] | list[Waveform],
    bank: Filterbank,
    frame_params: FrameParams,
) -> list[Mask]:
    """Ideal ratio masks: each source's share of linear encoded magnitude.

    mask_c = |encode(s_c)| / sum_c' |encode(s_c')| with cells where every
    source is zero set to 1/C. The last mask is the complement of the
    others, so the set sums to one exactly.
    """
    if len(sources) < 2:
        raise ValueError(f"need at least 2 sources, got {len(sources)}")
    n = len(sources[0])
    if any(len(s) != n for s in sources):
        raise ValueError("sources must have equal lengths")
    if any(s.sample_rate != sources[0].sample_rate for s in sources):
        raise ValueError("sources must share one sample rate")
    mags = [np.abs(encode(s, bank, frame_params, apply_relu=False).values) for s in sources]
    denom = mags[0].copy()
    for m in mags[1:]:
        denom += m
    zero = denom == 0.0
    c = len(sources)
    masks = []
    partial = None
    for mag in mags[:-1]:
        with np.errstate(invalid="ignore"):
            values = np.where(zero, 1.0 / c, mag / np.where(zero, 1.0, denom))
        masks.append(values)
        partial = values if partial is None else partial + values
    last = np.clip(1.0 - partial, 0.0, 1.0)
    masks.append(last)
    return [Mask(values) for values in masks]


def separate(
    mixture: Waveform,
    sources: tuple[Waveform, ...] | list[Waveform],
    enc_bank: Filterbank,
    dec_bank: Filterbank,
    frame_params: FrameParams,
    apply_relu: bool = True,
) -> list[Waveform]:
    """Oracle-masked estimates of every source, trimmed to the mixture length."""
    rep = encode(mixture, enc_bank, frame_params, apply_relu=apply_relu)
    masks = oracle_irm_masks(sources, enc_bank, frame_params)
    estimates = []
    for mask in masks:
        decoded = decode(apply_mask(rep, mask), dec_bank)
        estimates.append(Waveform(decoded.samples[: len(mixture)], decoded.sample_rate))
    return estimates


def score_separation(
    item_id: str,
    estimates: list[Waveform],
    sources: tuple[Waveform, ...] | list[Waveform],
) -> ExperimentReport:
    """SI-SNR of each estimate against its (scaled) source."""
    values = tuple(si_snr(est, src).value_db for est, src in zip(estimates, sources))
    return ExperimentReport.from_scores([(item_id, values)])


def run_separation(
    mixture: Waveform,
    sources: tuple[Waveform, ...] | list[Waveform],
    enc_bank: Filterbank,
    dec_bank: Filterbank,
    frame_params: FrameParams,
    apply_relu: bool = True,
    item_id: str = "item-0",
) -> ExperimentReport:
    """Encode, oracle-mask, decode, and score one mixture."""
    estimates = separate(mixture, sources, enc_bank, dec_bank, frame_params, apply_relu)
    return score_separation(item_id, estimates, sources)


def merge_reports(reports: list[ExperimentReport]) -> ExperimentReport:
    """Pool the per-item rows of several reports into one."""
    rows = [row for report in reports for row in report.per_item]
    return ExperimentReport.from_scores(rows)


def write_report_csv(path, report: ExperimentReport) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("item_id,source_idx,si_snr_db\n")
        for item_id, values in report.per_item:
            for idx, value in enumerate(values):
                fh.write(f"{item_id},{idx},{value!r}\n")


def write_report_json(path, report: ExperimentReport, config: dict, bank_info: dict) -> None:
    payload = {
        "mean_si_snr_db": report.mean_si_snr_db,
        "config": config,
        "bank": bank_info,
        "items": [
            {"item_id": item_id, "si_snr_db": list(values)} for item_id, values in report.per_item
        ],
    }
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def bank_info(bank: Filterbank) -> dict:
    """Provenance summary of a bank for report JSON."""
    info = {
        "kind": bank.kind.value,
        "n_filters": bank.n_filters,
        "filter_len": bank.filter_len,
        "sample_rate": bank.sample_rate,
    }
    if bank.erb_params is not None:
        info["c1"] = bank.erb_params.c1
        info["c2"] = bank.erb_params.c2
    return info
