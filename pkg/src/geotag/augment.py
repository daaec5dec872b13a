"""The three augmentation operators: cyclic, drop, stretch.

Each operator is a deterministic function of (input, seed).  Output i of
a multi-output operator draws from Philox substream i of the seed, so
replaying a seed reproduces every output bit-for-bit.  For stereo input
the same drawn parameters are applied to every channel, keeping the
channels temporally aligned.
"""

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .audio_io import AudioClip
from .errors import InvalidInputError
from .rng import substream

KINDS = ("cyclic", "drop", "stretch")

# Stretch draw ranges; the band never exceeds this fraction of its axis
# so the scene content survives the warp.
STRETCH_FACTOR_RANGE = (0.8, 1.2)
STRETCH_MAX_BAND_FRACTION = 0.25

DEFAULT_CYCLIC_FRACTION = 0.5

# New entries added per original, per operator.
OUTPUTS_PER_KIND = {"cyclic": 1, "drop": 2, "stretch": 4}


@dataclass(frozen=True)
class AugmentationSpec:
    """Seeded, replayable description of one augmentation application.

    kind: one of KINDS
    seed: 64-bit stream seed
    params: kind-specific record; for cyclic it fixes the split fraction,
            for drop/stretch it names the output ordinal whose draw to
            replay (concrete values depend on the input's dimensions).
    """

    kind: str
    seed: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown augmentation kind {self.kind!r}")

    def to_json(self) -> str:
        return json.dumps(
            {"kind": self.kind, "seed": self.seed, "params": self.params},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "AugmentationSpec":
        rec = json.loads(text)
        return cls(kind=rec["kind"], seed=int(rec["seed"]), params=rec.get("params", {}))


def cyclic_shift(clip: AudioClip, fraction: float = DEFAULT_CYCLIC_FRACTION) -> AudioClip:
    """Rotate the waveform: the tail from floor(fraction*len) moves to the front.

    All channels split at the same index; the per-channel sample multiset
    is preserved exactly.
    """
    if not 0.0 < fraction < 1.0:
        raise InvalidInputError(f"fraction must be in (0, 1), got {fraction}")
    if clip.length == 0:
        raise InvalidInputError("cannot cyclic-shift an empty clip")
    k = int(fraction * clip.length)
    rotated = np.concatenate([clip.samples[:, k:], clip.samples[:, :k]], axis=1)
    return replace(clip, samples=rotated)


def _draw_drop(rng: np.random.Generator, length: int) -> tuple[int, int]:
    count = int(rng.integers(1, length + 1))  # uniform {1..len}
    index = int(rng.integers(0, length))  # uniform {0..len-1}
    return count, index


def _remove_interval(clip: AudioClip, count: int, index: int) -> AudioClip:
    if count < 1 or index < 0 or index >= clip.length:
        raise InvalidInputError(f"drop (count={count}, index={index}) outside clip of length {clip.length}")
    end = min(index + count, clip.length)  # removal truncates at the end
    kept = np.concatenate([clip.samples[:, :index], clip.samples[:, end:]], axis=1)
    return replace(clip, samples=kept)


def drop_intervals(clip: AudioClip, rng_seed: int) -> tuple[AudioClip, AudioClip]:
    """Delete a random contiguous run of samples, twice independently.

    Returns two clips; output i draws (count, index) from substream i of
    rng_seed, with the same removal applied to every channel.
    """
    if clip.length < 2:
        raise InvalidInputError("drop needs a clip of at least 2 samples")
    outputs = []
    for i in range(OUTPUTS_PER_KIND["drop"]):
        count, index = _draw_drop(substream(rng_seed, i), clip.length)
        outputs.append(_remove_interval(clip, count, index))
    return tuple(outputs)


def bilinear_resize(matrix: np.ndarray, out_rows: int, out_cols: int) -> np.ndarray:
    """Align-corners bilinear resize of a 2-D matrix.

    Source coordinate of output index i is i*(in-1)/(out-1); an output
    axis of 1 maps to coordinate 0.  Resizing to the input dims
    reproduces the input exactly.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.size == 0:
        raise InvalidInputError("bilinear_resize expects a non-empty 2-D matrix")
    if out_rows < 1 or out_cols < 1:
        raise InvalidInputError("output dims must be >= 1")
    in_rows, in_cols = matrix.shape

    def axis_coords(n_out, n_in):
        if n_out == 1 or n_in == 1:
            return np.zeros(n_out)
        return np.arange(n_out) * (n_in - 1) / (n_out - 1)

    r = axis_coords(out_rows, in_rows)
    c = axis_coords(out_cols, in_cols)
    r0 = np.floor(r).astype(int)
    c0 = np.floor(c).astype(int)
    r1 = np.minimum(r0 + 1, in_rows - 1)
    c1 = np.minimum(c0 + 1, in_cols - 1)
    wr = (r - r0)[:, None]
    wc = (c - c0)[None, :]

    top = matrix[np.ix_(r0, c0)] * (1 - wc) + matrix[np.ix_(r0, c1)] * wc
    bottom = matrix[np.ix_(r1, c0)] * (1 - wc) + matrix[np.ix_(r1, c1)] * wc
    return top * (1 - wr) + bottom * wr


def _draw_stretch(rng: np.random.Generator, rows: int, cols: int) -> dict:
    def band(n):
        max_span = max(1, int(STRETCH_MAX_BAND_FRACTION * n))
        span = int(rng.integers(1, max_span + 1))
        start = int(rng.integers(0, n - span + 1))
        return start, span

    row_start, row_span = band(rows)
    col_start, col_span = band(cols)
    lo, hi = STRETCH_FACTOR_RANGE
    factor = float(rng.uniform(lo, hi))
    return {
        "row_start": row_start,
        "row_span": row_span,
        "col_start": col_start,
        "col_span": col_span,
        "factor": factor,
    }


def _apply_stretch(values: np.ndarray, p: dict) -> np.ndarray:
    """Resize the selected row and column bands by the factor, then
    restore the original dims with a full-matrix bilinear resize."""
    rows, cols = values.shape
    rs, rn = p["row_start"], p["row_span"]
    cs, cn = p["col_start"], p["col_span"]
    f = p["factor"]
    if rs < 0 or rs + rn > rows or cs < 0 or cs + cn > cols:
        raise InvalidInputError("stretch band outside matrix")

    new_rn = max(1, int(round(rn * f)))
    m = np.concatenate(
        [values[:rs], bilinear_resize(values[rs : rs + rn], new_rn, cols), values[rs + rn :]],
        axis=0,
    )
    new_cn = max(1, int(round(cn * f)))
    m = np.concatenate(
        [m[:, :cs], bilinear_resize(m[:, cs : cs + cn], m.shape[0], new_cn), m[:, cs + cn :]],
        axis=1,
    )
    return bilinear_resize(m, rows, cols)


def stretch_spectrogram(spec, rng_seed: int):
    """Warp a random row band and column band of the magnitude matrix,
    four times independently.

    Returns four spectrograms with the input's dims; output i draws its
    band position, span, and factor from substream i of rng_seed.
    """
    values = spec.values
    if values.shape[0] < 8 or values.shape[1] < 8:
        raise InvalidInputError(f"spectrogram {values.shape} too small to stretch (need 8x8)")
    outputs = []
    for i in range(OUTPUTS_PER_KIND["stretch"]):
        params = _draw_stretch(substream(rng_seed, i), *values.shape)
        outputs.append(spec.with_values(_apply_stretch(values, params)))
    return tuple(outputs)


def apply_waveform_spec(clip: AudioClip, spec: AugmentationSpec) -> AudioClip:
    """Apply one waveform-domain lineage record (cyclic or drop)."""
    if spec.kind == "cyclic":
        fraction = float(spec.params.get("fraction", DEFAULT_CYCLIC_FRACTION))
        return cyclic_shift(clip, fraction)
    if spec.kind == "drop":
        ordinal = int(spec.params.get("ordinal", 0))
        count, index = _draw_drop(substream(spec.seed, ordinal), clip.length)
        return _remove_interval(clip, count, index)
    raise InvalidInputError(f"{spec.kind} is not a waveform augmentation")


def apply_spectrogram_spec(values: np.ndarray, spec: AugmentationSpec) -> np.ndarray:
    """Apply one spectrogram-domain lineage record (stretch) to a magnitude matrix."""
    if spec.kind != "stretch":
        raise InvalidInputError(f"{spec.kind} is not a spectrogram augmentation")
    ordinal = int(spec.params.get("ordinal", 0))
    params = _draw_stretch(substream(spec.seed, ordinal), *values.shape)
    return _apply_stretch(values, params)
