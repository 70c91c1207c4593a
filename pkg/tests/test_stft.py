import numpy as np
import pytest

from fblab import (
    ErbParams,
    FilterbankKind,
    FrameParams,
    StftMode,
    StftSpec,
    StftWindow,
    Waveform,
    analysis_matrix,
    build_mpgtf,
    build_stft_bank,
    decode,
    encode,
    istft_decoder,
    numerical_rank,
    peak_response_hz,
)

FS = 8000


class TestBuildStftBank:
    def test_filter_counts(self):
        assert StftSpec(16, 8, StftMode.LINEAR).n_filters == 16
        assert StftSpec(16, 128, StftMode.SIGN_SPLIT).n_filters == 512

    def test_default_spec_matches_paper_dimensions(self):
        bank = build_stft_bank(StftSpec(), FS)
        assert bank.taps.shape == (512, 16)
        assert bank.kind is FilterbankKind.STFT

    def test_linear_square_bank_is_full_rank(self):
        bank = build_stft_bank(StftSpec(16, 8, StftMode.LINEAR), FS)
        assert bank.taps.shape == (16, 16)
        assert numerical_rank(analysis_matrix(bank)) == 16

    def test_linear_square_bank_is_orthogonal(self):
        bank = build_stft_bank(StftSpec(16, 8, StftMode.LINEAR), FS)
        gram = bank.taps @ bank.taps.T
        np.testing.assert_allclose(gram, 8.0 * np.eye(16), atol=1e-12)

    def test_sign_split_contains_negations(self):
        bank = build_stft_bank(StftSpec(16, 8, StftMode.SIGN_SPLIT), FS)
        half = bank.n_filters // 2
        np.testing.assert_array_equal(bank.taps[half:], -bank.taps[:half])

    def test_frequencies_within_half_band(self):
        bank = build_stft_bank(StftSpec(), FS)
        assert np.all(bank.center_freqs > 0)
        assert np.all(bank.center_freqs <= FS / 2)
        steps = np.diff(bank.center_freqs)
        np.testing.assert_allclose(steps, steps[0], rtol=1e-12)

    def test_overcomplete_warning(self):
        assert build_stft_bank(StftSpec(16, 128), FS).warnings
        assert not build_stft_bank(StftSpec(16, 8, StftMode.LINEAR), FS).warnings

    def test_hann_window_applied(self):
        rect = build_stft_bank(StftSpec(16, 8, StftMode.LINEAR, StftWindow.RECTANGULAR), FS)
        hann = build_stft_bank(StftSpec(16, 8, StftMode.LINEAR, StftWindow.HANN), FS)
        w = 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(16) / 16)
        np.testing.assert_allclose(hann.taps, rect.taps * w, atol=1e-15)

    def test_row_peaks_at_nominal_frequency_when_resolved(self):
        # 16-tap rows have 500 Hz wide lobes, far coarser than one FFT bin;
        # the per-row peak claim is checked where the window resolves it
        bank = build_stft_bank(StftSpec(256, 8, StftMode.LINEAR), FS)
        peaks = peak_response_hz(bank, n_fft=512)
        nominal = np.repeat(bank.center_freqs, 2)
        bin_hz = FS / 512
        assert np.all(np.abs(peaks - nominal) <= bin_hz + 1e-9)


class TestIstftDecoder:
    def test_requires_stft_kind(self):
        bank = build_mpgtf(ErbParams(), 512, 16, FS)
        with pytest.raises(ValueError, match="requires an STFT bank"):
            istft_decoder(bank)

    def test_linear_roundtrip_identity(self):
        bank = build_stft_bank(StftSpec(16, 8, StftMode.LINEAR), FS)
        dec = istft_decoder(bank)
        rng = np.random.default_rng(0)
        x = Waveform(rng.standard_normal(160), FS)
        p = FrameParams(16, 16)
        y = decode(encode(x, bank, p, apply_relu=False), dec)
        np.testing.assert_allclose(y.samples, x.samples, rtol=0, atol=1e-9 * np.max(np.abs(x.samples)))

    def test_relu_roundtrip_recovers_half_signal(self):
        # relu(a) - relu(-a) = a: the +/- pairs keep the rectified encoding
        # lossless, and the pseudo-inverse spreads it over both pair members,
        # reconstructing exactly x/2.
        bank = build_stft_bank(StftSpec(), FS)
        dec = istft_decoder(bank)
        rng = np.random.default_rng(1)
        x = Waveform(rng.standard_normal(160), FS)
        p = FrameParams(16, 16)
        y = decode(encode(x, bank, p, apply_relu=True), dec)
        np.testing.assert_allclose(2.0 * y.samples, x.samples, rtol=0, atol=1e-12)

    def test_relu_roundtrip_per_frame_scale_normalized(self):
        bank = build_stft_bank(StftSpec(), FS)
        dec = istft_decoder(bank)
        rng = np.random.default_rng(2)
        p = FrameParams(16, 16)
        worst = 0.0
        for _ in range(1000):
            frame = rng.standard_normal(16)
            x = Waveform(frame, FS)
            y = decode(encode(x, bank, p, apply_relu=True), dec)
            err = np.linalg.norm(2.0 * y.samples - frame) / np.linalg.norm(frame)
            worst = max(worst, err)
        assert worst <= 1e-9

    def test_zero_frame_decodes_to_zero(self):
        bank = build_stft_bank(StftSpec(), FS)
        dec = istft_decoder(bank)
        x = Waveform(np.zeros(32), FS)
        y = decode(encode(x, bank, FrameParams(16, 16), apply_relu=True), dec)
        np.testing.assert_array_equal(y.samples, np.zeros(32))

    def test_rank_deficient_requires_acknowledgement(self):
        bank = build_stft_bank(StftSpec(16, 4, StftMode.LINEAR), FS)  # 8 rows < L=16
        with pytest.raises(ValueError, match="rank-deficient"):
            istft_decoder(bank)
        dec = istft_decoder(bank, allow_rank_deficient=True)
        assert dec.taps.shape == (8, 16)

    def test_parseval_ratio_constant_in_orthogonal_linear_mode(self):
        bank = build_stft_bank(StftSpec(16, 8, StftMode.LINEAR), FS)
        p = FrameParams(16, 16)
        rng = np.random.default_rng(3)
        ratios = []
        for _ in range(20):
            x = Waveform(rng.standard_normal(16), FS)
            rep = encode(x, bank, p, apply_relu=False)
            ratios.append(float(np.sum(rep.values**2)) / x.energy())
        ratios = np.array(ratios)
        np.testing.assert_allclose(ratios, ratios[0], rtol=1e-9)  # measured constant: L/2
