"""Waveform -> trimmed log-mel spectrogram features.

Chain: Hann STFT (reflect-centered), band-edge trim, mel filterbank on
the power spectrum, dB scaling with a -100 dB floor, then pad/crop to a
fixed frame count so batches are rectangular.
"""

import json
from dataclasses import dataclass, field, asdict

import numpy as np

from .audio_io import AudioClip, average_channels
from .augment import AugmentationSpec, apply_spectrogram_spec
from .errors import InvalidInputError

DB_FLOOR = -100.0
_POWER_FLOOR = 1e-10


@dataclass
class FeatureConfig:
    """Knobs of the feature pipeline. Defaults match 10 s clips at 22050 Hz."""

    sample_rate: int = 22050
    window: int = 2048
    hop: int = 512
    n_mels: int = 128
    low_cut_hz: float = 100.0
    high_cut_hz: float = 100.0
    fixed_frames: int = 431
    mel_area_normalize: bool = False
    standardize: bool = True  # per-band z-score, stats from the training split

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_dict(cls, rec: dict) -> "FeatureConfig":
        known = {f: rec[f] for f in cls.__dataclass_fields__ if f in rec}
        return cls(**known)


@dataclass
class Spectrogram:
    """Magnitude time-frequency matrix with explicit frequency metadata.

    values: (freq_bins, frames) non-negative magnitudes
    bin_freqs: Hz of each row, strictly increasing
    """

    values: np.ndarray
    bin_freqs: np.ndarray
    sample_rate: int
    hop: int
    window: int

    def with_values(self, values: np.ndarray) -> "Spectrogram":
        return Spectrogram(
            values=values,
            bin_freqs=self.bin_freqs,
            sample_rate=self.sample_rate,
            hop=self.hop,
            window=self.window,
        )


@dataclass
class LogMelFeature:
    """dB-scaled mel feature matrix plus the lineage that produced it.

    values: (n_mels, frames); every cell >= DB_FLOOR
    lineage: source clip id + ordered AugmentationSpec list
    """

    values: np.ndarray
    source_id: str = ""
    lineage: list = field(default_factory=list)

    @property
    def frames(self) -> int:
        return self.values.shape[1]


def stft(samples: np.ndarray, window: int, hop: int, sample_rate: int) -> Spectrogram:
    """Hann-windowed magnitude STFT with reflect center padding.

    Frame count is 1 + floor(len/hop); one-sided spectrum of window/2 + 1
    bins with bin_freqs[k] = k * rate / window.
    """
    samples = np.asarray(samples, dtype=np.float64).reshape(-1)
    if len(samples) < 1:
        raise InvalidInputError("stft needs at least one sample")
    if window < 1 or window & (window - 1):
        raise InvalidInputError(f"window must be a power of two, got {window}")
    if not 0 < hop <= window:
        raise InvalidInputError(f"hop must be in (0, window], got {hop}")

    pad = window // 2
    padded = np.pad(samples, pad, mode="reflect") if len(samples) > 1 else np.full(2 * pad + 1, samples[0])
    n_frames = 1 + len(samples) // hop
    hann = np.hanning(window + 1)[:window]  # periodic Hann
    stride = padded.strides[0]
    frames = np.lib.stride_tricks.as_strided(
        padded,
        shape=(n_frames, window),
        strides=(hop * stride, stride),
        writeable=False,
    )
    mags = np.abs(np.fft.rfft(frames * hann, axis=1)).T
    bin_freqs = np.arange(window // 2 + 1) * (sample_rate / window)
    return Spectrogram(
        values=mags, bin_freqs=bin_freqs, sample_rate=sample_rate, hop=hop, window=window
    )


def trim_frequencies(spec: Spectrogram, low_cut: float, high_cut: float) -> Spectrogram:
    """Keep only rows with low_cut <= bin_freq <= nyquist - high_cut."""
    if low_cut < 0 or high_cut < 0:
        raise InvalidInputError("cut frequencies must be non-negative")
    nyquist = spec.sample_rate / 2
    keep = (spec.bin_freqs >= low_cut) & (spec.bin_freqs <= nyquist - high_cut)
    if not keep.any():
        raise InvalidInputError("trim removed every frequency bin")
    return Spectrogram(
        values=spec.values[keep],
        bin_freqs=spec.bin_freqs[keep],
        sample_rate=spec.sample_rate,
        hop=spec.hop,
        window=spec.window,
    )


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(
    n_mels: int,
    bin_freqs: np.ndarray,
    f_min: float,
    f_max: float,
    area_normalize: bool = False,
) -> np.ndarray:
    """Triangular filters with centers equally spaced on the mel scale.

    Returns (n_mels, len(bin_freqs)); each row is non-negative and peaks
    at its center frequency.  With area_normalize, rows are scaled by
    2 / (right_foot - left_foot).
    """
    if n_mels < 1:
        raise InvalidInputError("n_mels must be >= 1")
    if not f_min < f_max:
        raise InvalidInputError(f"need f_min < f_max, got {f_min} >= {f_max}")
    bin_freqs = np.asarray(bin_freqs, dtype=np.float64)
    anchors = mel_to_hz(np.linspace(hz_to_mel(f_min), hz_to_mel(f_max), n_mels + 2))
    left, center, right = anchors[:-2], anchors[1:-1], anchors[2:]

    rising = (bin_freqs[None, :] - left[:, None]) / (center - left)[:, None]
    falling = (right[:, None] - bin_freqs[None, :]) / (right - center)[:, None]
    bank = np.maximum(0.0, np.minimum(rising, falling))
    if area_normalize:
        bank *= (2.0 / (right - left))[:, None]
    return bank


def log_mel(spec: Spectrogram, filterbank: np.ndarray) -> LogMelFeature:
    """Mel-weighted power in dB: 10*log10(max(fb @ |S|^2, 1e-10))."""
    if filterbank.shape[1] != spec.values.shape[0]:
        raise InvalidInputError(
            f"filterbank has {filterbank.shape[1]} columns but spectrogram has "
            f"{spec.values.shape[0]} bins"
        )
    power = filterbank @ (spec.values**2)
    return LogMelFeature(values=10.0 * np.log10(np.maximum(power, _POWER_FLOOR)))


def pad_frames(values: np.ndarray, fixed_frames: int) -> np.ndarray:
    """Right-pad with the dB floor (or crop) to exactly fixed_frames columns."""
    n = values.shape[1]
    if n >= fixed_frames:
        return values[:, :fixed_frames]
    pad = np.full((values.shape[0], fixed_frames - n), DB_FLOOR)
    return np.concatenate([values, pad], axis=1)


def featurize(
    clip: AudioClip,
    config: FeatureConfig,
    stretch_specs: list[AugmentationSpec] | None = None,
) -> LogMelFeature:
    """Full chain: stft -> [stretch] -> trim -> log-mel -> pad.

    The clip must already be at config.sample_rate.  Waveform-domain
    augmentation happens before this call; stereo input is averaged to
    mono here — after the stretch when one is requested, so both
    channels are warped with identical parameters first.
    """
    if clip.sample_rate != config.sample_rate:
        raise InvalidInputError(
            f"clip at {clip.sample_rate} Hz, pipeline expects {config.sample_rate} Hz"
        )
    stretch_specs = stretch_specs or []

    if stretch_specs:
        base = None
        per_channel = []
        for ch in range(clip.channels):
            s = stft(clip.samples[ch], config.window, config.hop, config.sample_rate)
            if base is None:
                base = s
            values = s.values
            for aug in stretch_specs:
                values = apply_spectrogram_spec(values, aug)
            per_channel.append(values)
        spec = base.with_values(np.mean(per_channel, axis=0))
    else:
        mono = average_channels(clip)
        spec = stft(mono.samples[0], config.window, config.hop, config.sample_rate)

    nyquist = config.sample_rate / 2
    trimmed = trim_frequencies(spec, config.low_cut_hz, config.high_cut_hz)
    bank = mel_filterbank(
        config.n_mels,
        trimmed.bin_freqs,
        f_min=config.low_cut_hz,
        f_max=nyquist - config.high_cut_hz,
        area_normalize=config.mel_area_normalize,
    )
    feature = log_mel(trimmed, bank)
    feature.values = pad_frames(feature.values, config.fixed_frames)
    feature.source_id = clip.source_id
    feature.lineage = list(stretch_specs)
    return feature
