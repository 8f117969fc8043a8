"""Seeded Monte Carlo check of the analytic MSE figures.

Each trial owns a fixed slice of a counter-based Philox stream: trial t reads
counters t*stride+1 ... (t+1)*stride under key ``seed``.  Trials are processed
in fixed blocks, and the squared errors are combined with a fixed-shape pairwise
sum, so a result depends only on the configuration, not on worker count.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import InvalidParams, NotTight, NotWhiteSignal
from .estimation import (
    NO_ERASURES,
    ErasurePattern,
    NoiseModel,
    SignalModel,
    erasure_report,
    lmmse_estimate,
)
from .frames import FusionFrame
from .matcore import DEFAULT_TOLERANCES, Tolerances, cholesky

GENERATOR = "Philox4x64-10 (numpy.random.Philox), key=seed, counter=trial*stride"
NORMAL_METHOD = "Box-Muller on 53-bit uniforms, 4 normals per counter"
BLOCK_TRIALS = 2048
_WORDS_PER_COUNTER = 4
_TWO_POW_M53 = 2.0**-53


def _normals_from_raw(raw: np.ndarray) -> np.ndarray:
    raw = raw.reshape(-1, 2)
    u1 = ((raw[:, 0] >> np.uint64(11)).astype(np.float64) + 1.0) * _TWO_POW_M53  # (0, 1]
    u2 = (raw[:, 1] >> np.uint64(11)).astype(np.float64) * _TWO_POW_M53  # [0, 1)
    r = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    return np.column_stack([r * np.cos(angle), r * np.sin(angle)]).ravel()


def counters_per_trial(normals_per_trial: int) -> int:
    return -(-normals_per_trial // _WORDS_PER_COUNTER)


def trial_normals(seed: int, first_trial: int, n_trials: int, per_trial: int) -> np.ndarray:
    """Standard normals for trials [first_trial, first_trial + n_trials).

    Returns shape (n_trials, per_trial).  Row t only depends on (seed, t).
    """
    if not 0 <= seed < 2**64:
        raise InvalidParams(f"seed must fit in 64 bits, got {seed}")
    stride = counters_per_trial(per_trial)
    bitgen = np.random.Philox(key=seed, counter=first_trial * stride)
    raw = bitgen.random_raw(n_trials * stride * _WORDS_PER_COUNTER)
    z = _normals_from_raw(raw).reshape(n_trials, stride * _WORDS_PER_COUNTER)
    return z[:, :per_trial]


class TrialStream:
    """Sequential normals for one trial, read from that trial's counter slice."""

    def __init__(self, seed: int, trial: int, per_trial: int):
        self._normals = trial_normals(seed, trial, 1, per_trial)[0]
        self._pos = 0

    def standard_normals(self, n: int) -> np.ndarray:
        if self._pos + n > self._normals.size:
            raise InvalidParams("trial stream exhausted")
        out = self._normals[self._pos : self._pos + n]
        self._pos += n
        return out


def gaussian_sample(stream: TrialStream, covariance, dim: int) -> np.ndarray:
    """One N(0, C) draw; ``covariance`` is a variance (white) or an SPD matrix."""
    g = stream.standard_normals(dim)
    if np.ndim(covariance) == 0:
        var = float(covariance)
        if not var > 0:
            raise InvalidParams(f"variance must be > 0, got {var!r}")
        return math.sqrt(var) * g
    L = cholesky(covariance)
    if L.shape != (dim, dim):
        raise InvalidParams(f"covariance is {L.shape}, expected ({dim}, {dim})")
    return L @ g


def pairwise_sum(values: np.ndarray) -> float:
    """Sum with a fixed binary-tree shape (depends only on the length)."""
    a = np.asarray(values, dtype=np.float64)
    if a.size == 0:
        return 0.0
    while a.size > 1:
        if a.size % 2:
            a = np.append(a, 0.0)
        a = a[0::2] + a[1::2]
    return float(a[0])


@dataclasses.dataclass(frozen=True)
class SimConfig:
    frame: FusionFrame
    signal: SignalModel
    noise: NoiseModel
    trials: int
    seed: int = 0
    erasures: ErasurePattern = NO_ERASURES

    def __post_init__(self):
        if not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise InvalidParams(f"trials must be >= 1, got {self.trials!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidParams(f"seed must fit in 64 bits, got {self.seed!r}")
        self.erasures.validate(len(self.frame))


@dataclasses.dataclass(frozen=True)
class SimResult:
    empirical_mse: float
    stderr: float
    trials: int
    analytic_mse: float | None
    metadata: dict

    @property
    def z_score(self) -> float | None:
        if self.analytic_mse is None or self.stderr == 0.0:
            return None
        return (self.empirical_mse - self.analytic_mse) / self.stderr


def normals_per_trial(frame: FusionFrame) -> int:
    """x takes M normals, then the N noise vectors take M each."""
    M = frame.ambient_dim
    return M + len(frame) * M


def _block_errors(cfg: SimConfig, first: int, count: int, L: np.ndarray, tol: Tolerances) -> np.ndarray:
    frame = cfg.frame
    N, M = len(frame), frame.ambient_dim
    g = trial_normals(int(cfg.seed), first, count, normals_per_trial(frame))
    x = g[:, :M] @ L.T
    noise = math.sqrt(cfg.noise.sigma_n2) * g[:, M:].reshape(count, N, M)
    stacked = frame.projections.reshape(N * M, M)
    z = (x @ stacked.T).reshape(count, N, M) + noise
    xhat = lmmse_estimate(frame, cfg.signal, cfg.noise, z, cfg.erasures, tol=tol)
    err = x - xhat
    return np.einsum("bi,bi->b", err, err)


def squared_errors(cfg: SimConfig, workers: int = 1, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Per-trial ||x - xhat||^2, in trial order."""
    M = cfg.frame.ambient_dim
    sig = cfg.signal
    L = math.sqrt(sig.sigma_x2) * np.eye(M) if sig.is_white else cholesky(sig.covariance(M), tol)
    starts = range(0, cfg.trials, BLOCK_TRIALS)
    job = lambda s: _block_errors(cfg, s, min(BLOCK_TRIALS, cfg.trials - s), L, tol)  # noqa: E731
    if workers <= 1:
        blocks = [job(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(job, starts))
    return np.concatenate(blocks)


def run_monte_carlo(
    cfg: SimConfig, workers: int = 1, tol: Tolerances = DEFAULT_TOLERANCES
) -> SimResult:
    errors = squared_errors(cfg, workers, tol)
    T = errors.size
    mean = pairwise_sum(errors) / T
    if T > 1:
        var = pairwise_sum((errors - mean) ** 2) / (T - 1)
        stderr = math.sqrt(var / T)
    else:
        stderr = 0.0
    try:
        analytic = erasure_report(cfg.frame, cfg.signal, cfg.noise, cfg.erasures, tol).total_mse
    except (NotTight, NotWhiteSignal):
        # no closed form for erasures off the tight/white model
        analytic = None
    meta = {
        "generator": GENERATOR,
        "normals": NORMAL_METHOD,
        "block_trials": BLOCK_TRIALS,
        "seed": int(cfg.seed),
        "erased": list(cfg.erasures.erased),
    }
    return SimResult(mean, stderr, T, analytic, meta)
