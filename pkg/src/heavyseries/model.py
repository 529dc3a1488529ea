"""The normal sequence model: observations of basis coefficients under
additive Gaussian noise with precision n.

Single-indexed data carry coordinates k = 1..K; double-indexed (wavelet)
data carry (j, k) pairs in the packed layout of the wavelets module.
Noise is drawn coordinate-by-coordinate from counter-based streams, so a
simulated data set is a pure function of (truth, n, K, seed).
"""

import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import basis as basis_mod
from . import rng
from .basis import BasisDescriptor
from .errors import InvalidParameterError, ShapeError


@dataclass(frozen=True)
class TrueSignal:
    """A truth: coefficient sequence plus the basis it refers to."""

    coefficients: np.ndarray
    basis: BasisDescriptor
    declared_class: Optional[dict] = None  # e.g. {"space": "sobolev", "beta": 1.0}

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", np.asarray(self.coefficients, dtype=float)
        )
        if not np.all(np.isfinite(self.coefficients)):
            raise InvalidParameterError("truth coefficients must be finite")


@dataclass(frozen=True)
class SequenceData:
    observations: np.ndarray
    noise_precision: float
    truncation: int
    basis: BasisDescriptor
    seed: int

    def __post_init__(self):
        object.__setattr__(
            self, "observations", np.asarray(self.observations, dtype=float)
        )
        if self.noise_precision <= 0:
            raise InvalidParameterError("noise precision n must be > 0")
        if len(self.observations) != self.truncation:
            raise ShapeError("observation length must equal the truncation K")

    @property
    def double_indexed(self):
        return self.basis.double_indexed


def padded_coefficients(truth, K):
    f0 = truth.coefficients
    if len(f0) >= K:
        return f0[:K].copy()
    return np.concatenate([f0, np.zeros(K - len(f0))])


def simulate(truth, noise_precision, truncation, seed):
    """Draw X_k = f_{0,k} + xi_k / sqrt(n) with per-coordinate noise streams.

    For double-indexed truths the truncation must equal the frame length;
    coordinate keys are the packed flat indices.
    """
    n = float(noise_precision)
    K = int(truncation)
    if n <= 0:
        raise InvalidParameterError("noise precision n must be > 0")
    if K < 1:
        raise InvalidParameterError("truncation K must be >= 1")
    if truth.basis.double_indexed and K != truth.basis.frame.signal_length:
        raise ShapeError("wavelet data must keep the full frame length")
    f0 = padded_coefficients(truth, K)
    xi = rng.coord_normal(seed, rng.STREAM_NOISE, range(K))
    return SequenceData(
        observations=f0 + xi / np.sqrt(n),
        noise_precision=n,
        truncation=K,
        basis=truth.basis,
        seed=seed,
    )


def synthesize(signal, basis, m):
    """Function values of a coefficient sequence on an m-point grid."""
    return basis_mod.synthesize(signal, basis, m)


# --- CSV serialization ----------------------------------------------------
# Columns index_j,index_k,value; single-index rows use j = -2 as sentinel
# and k = 1..K.  The header comment row records n, K, seed and basis kind.

_SENTINEL_SINGLE = -2


def _index_rows(length, double_indexed):
    if not double_indexed:
        return [(_SENTINEL_SINGLE, k) for k in range(1, length + 1)]
    rows = [(-1, 0)]
    j = 0
    while len(rows) < length:
        rows.extend((j, k) for k in range(2**j))
        j += 1
    return rows[:length]


def data_to_csv(data):
    buf = io.StringIO()
    buf.write(
        f"# n={data.noise_precision!r} K={data.truncation} seed={data.seed}"
        f" basis={data.basis.kind}\n"
    )
    buf.write("index_j,index_k,value\n")
    for (j, k), v in zip(
        _index_rows(len(data.observations), data.double_indexed), data.observations
    ):
        buf.write(f"{j},{k},{float(v)!r}\n")
    return buf.getvalue()


def coefficients_to_csv(values, double_indexed, header=""):
    buf = io.StringIO()
    if header:
        buf.write(f"# {header}\n")
    buf.write("index_j,index_k,value\n")
    for (j, k), v in zip(_index_rows(len(values), double_indexed), values):
        buf.write(f"{j},{k},{float(v)!r}\n")
    return buf.getvalue()


def values_from_csv(text):
    """Read back a coefficient CSV; returns (values, double_indexed, meta)."""
    meta = {}
    values = []
    double_indexed = False
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for item in line[1:].split():
                if "=" in item:
                    key, _, val = item.partition("=")
                    meta[key] = val
            continue
        if line.startswith("index_j"):
            continue
        j_s, k_s, v_s = line.split(",")
        if int(j_s) != _SENTINEL_SINGLE:
            double_indexed = True
        values.append(float(v_s))
    return np.array(values), double_indexed, meta
