"""WAV decoding, band-limited resampling, and channel handling.

Clips are held as float64 arrays of shape (channels, samples) scaled to
[-1, 1].  Only uncompressed little-endian RIFF/WAVE is supported: PCM
16/24-bit and IEEE float 32-bit, mono or stereo.  Unknown chunks are
skipped; 'fmt ' and 'data' are mandatory.
"""

import math
import struct
from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import upfirdn

from .errors import DecodeError, InvalidInputError, UnsupportedFormatError

_FMT_PCM = 1
_FMT_IEEE_FLOAT = 3


@dataclass
class AudioClip:
    """Multi-channel PCM audio with rate and provenance labels.

    samples: (channels, n) float array in [-1, 1]
    sample_rate: Hz
    source_id: opaque recording identifier
    labels: optional (city, scene) pair
    """

    samples: np.ndarray
    sample_rate: int
    source_id: str = ""
    labels: tuple | None = None

    def __post_init__(self):
        self.samples = np.atleast_2d(np.asarray(self.samples, dtype=np.float64))
        if self.sample_rate <= 0:
            raise InvalidInputError(f"sample_rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(self.samples)):
            raise InvalidInputError("clip contains non-finite samples")

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    @property
    def length(self) -> int:
        return self.samples.shape[1]

    @property
    def duration(self) -> float:
        return self.length / self.sample_rate


def _read_exact(fh, n, what):
    data = fh.read(n)
    if len(data) != n:
        raise DecodeError(f"truncated file while reading {what}")
    return data


def load_wav(path) -> AudioClip:
    """Decode a RIFF/WAVE file into a normalized AudioClip.

    Integer samples are scaled by 2^(bits-1); float samples are taken
    as-is.  Raises DecodeError for malformed or truncated containers and
    UnsupportedFormatError for encodings outside PCM 16/24-bit and
    float32, or channel counts other than 1 or 2.
    """
    path = str(path)
    with open(path, "rb") as fh:
        header = fh.read(12)
        if len(header) < 12 or header[:4] != b"RIFF" or header[8:12] != b"WAVE":
            raise DecodeError(f"{path}: not a RIFF/WAVE file")

        fmt = None
        data = None
        while True:
            chunk_header = fh.read(8)
            if len(chunk_header) == 0:
                break
            if len(chunk_header) < 8:
                raise DecodeError(f"{path}: truncated chunk header")
            chunk_id, size = struct.unpack("<4sI", chunk_header)
            if chunk_id == b"fmt ":
                fmt = _read_exact(fh, size, "fmt chunk")
            elif chunk_id == b"data":
                data = _read_exact(fh, size, "data chunk")
            else:
                fh.seek(size + (size & 1), 1)  # skip, chunks are word-aligned
                continue
            if size & 1:
                fh.seek(1, 1)
            if fmt is not None and data is not None:
                break

    if fmt is None:
        raise DecodeError(f"{path}: missing 'fmt ' chunk")
    if data is None:
        raise DecodeError(f"{path}: missing 'data' chunk")
    if len(fmt) < 16:
        raise DecodeError(f"{path}: short 'fmt ' chunk")

    tag, channels, rate, _, block_align, bits = struct.unpack("<HHIIHH", fmt[:16])
    if tag not in (_FMT_PCM, _FMT_IEEE_FLOAT):
        raise UnsupportedFormatError(f"{path}: format tag {tag} (compressed?)")
    if channels not in (1, 2):
        raise UnsupportedFormatError(f"{path}: {channels} channels unsupported")
    if tag == _FMT_PCM and bits not in (16, 24):
        raise UnsupportedFormatError(f"{path}: {bits}-bit PCM unsupported")
    if tag == _FMT_IEEE_FLOAT and bits != 32:
        raise UnsupportedFormatError(f"{path}: {bits}-bit float unsupported")

    bytes_per_sample = bits // 8
    frame_size = channels * bytes_per_sample
    if len(data) % frame_size:
        raise DecodeError(f"{path}: data chunk not a whole number of frames")
    n_frames = len(data) // frame_size

    if tag == _FMT_IEEE_FLOAT:
        flat = np.frombuffer(data, dtype="<f4").astype(np.float64)
    elif bits == 16:
        flat = np.frombuffer(data, dtype="<i2").astype(np.float64) / 32768.0
    else:  # 24-bit: widen 3-byte little-endian to int32, then arithmetic shift
        raw = np.frombuffer(data, dtype=np.uint8).reshape(-1, 3)
        as32 = (
            raw[:, 0].astype(np.uint32)
            | (raw[:, 1].astype(np.uint32) << 8)
            | (raw[:, 2].astype(np.uint32) << 16)
        )
        signed = as32.astype(np.int32)
        signed = np.where(signed >= 1 << 23, signed - (1 << 24), signed)
        flat = signed.astype(np.float64) / float(1 << 23)

    samples = flat.reshape(n_frames, channels).T.copy()
    return AudioClip(samples=samples, sample_rate=rate, source_id=path)


def write_wav(path, clip: AudioClip) -> None:
    """Write a clip as 16-bit PCM. Intended for test fixtures."""
    ints = np.clip(np.round(clip.samples * 32768.0), -32768, 32767).astype("<i2")
    interleaved = ints.T.reshape(-1).tobytes()
    channels = clip.channels
    rate = clip.sample_rate
    block_align = channels * 2
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(interleaved),
        b"WAVE",
        b"fmt ",
        16,
        _FMT_PCM,
        channels,
        rate,
        rate * block_align,
        block_align,
        16,
        b"data",
        len(interleaved),
    )
    with open(str(path), "wb") as fh:
        fh.write(header)
        fh.write(interleaved)


def _lowpass_taps(up: int, down: int, taps_per_phase: int = 64, beta: float = 8.6) -> np.ndarray:
    """Kaiser-windowed sinc prototype for a rational-rate polyphase filter.

    Cutoff sits at the tighter of the two Nyquist limits, expressed at the
    upsampled rate; gain `up` compensates for zero insertion.
    """
    n_taps = taps_per_phase * up + 1  # odd length, linear phase
    half = n_taps // 2
    cutoff = 1.0 / max(up, down)
    t = np.arange(n_taps) - half
    taps = up * cutoff * np.sinc(cutoff * t) * np.kaiser(n_taps, beta)
    return taps


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """Band-limit resample every channel to target_rate.

    Polyphase windowed-sinc conversion at the reduced ratio L/M; output
    length is round(n * target_rate / source_rate).
    """
    if target_rate <= 0:
        raise InvalidInputError(f"target_rate must be positive, got {target_rate}")
    if target_rate == clip.sample_rate:
        return clip

    g = math.gcd(target_rate, clip.sample_rate)
    up, down = target_rate // g, clip.sample_rate // g
    n_in = clip.length
    n_out = int(round(n_in * target_rate / clip.sample_rate))

    taps = _lowpass_taps(up, down)
    half = len(taps) // 2
    # Prepend zeros so the filter delay is a whole number of output samples.
    pre_pad = (-half) % down
    taps = np.concatenate([np.zeros(pre_pad), taps])
    skip = (half + pre_pad) // down

    out = np.zeros((clip.channels, n_out), dtype=np.float64)
    for ch in range(clip.channels):
        y = upfirdn(taps, clip.samples[ch], up=up, down=down)
        y = y[skip : skip + n_out]
        out[ch, : len(y)] = y
    return replace(clip, samples=out, sample_rate=target_rate)


def average_channels(clip: AudioClip) -> AudioClip:
    """Mix down to mono by arithmetic mean across channels."""
    if clip.channels == 1:
        return clip
    mono = clip.samples.mean(axis=0, keepdims=True)
    return replace(clip, samples=mono)
