"""Monte Carlo frame/bit error-rate estimation over the binary symmetric
channel.

Frames are processed in fixed-size batches; frame i always draws from the
(seed, i) channel stream, and a run stops after the first whole batch at
which the cumulative frame-error target is met (or at max_frames).  Which
frames get counted therefore depends only on the configuration, never on
worker count or timing, so serial and parallel runs produce identical
counts.

A frame is in error when the decoder fails to converge or converges on a
flip set different from the injected error (miscorrection); bit errors
count the residual weight after applying the flip set.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import decoders as dec
from .channel import BscConfig, sample_error
from .codes import ParityCheckMatrix


@dataclass(frozen=True)
class SimConfig:
    rhos: tuple[float, ...] = ()
    max_frames: int = 100_000
    target_errors: int = 100
    seed: int = 0
    batch: int = 1000
    workers: int = 1

    def __post_init__(self):
        if self.max_frames < 1 or self.batch < 1 or self.target_errors < 1:
            raise ValueError("max_frames, batch and target_errors must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        for rho in self.rhos:
            if not 0.0 <= rho <= 1.0:
                raise ValueError(f"crossover probability {rho} outside [0, 1]")


@dataclass(frozen=True)
class SimPoint:
    rho: float
    frames: int
    frame_errors: int
    bit_errors: int
    fer: float
    ber: float
    ci_low: float
    ci_high: float


# ---------------------------------------------------------------------------
# decoder adapters: picklable callables error-pattern -> DecodeResult
# ---------------------------------------------------------------------------


class GreedyDecoder:

    def __init__(self, qsrc, H: ParityCheckMatrix, max_steps: int = 10):
        self.qsrc, self.H, self.max_steps = qsrc, H, max_steps

    def __call__(self, e: int) -> dec.DecodeResult:
        return dec.greedy_decode(self.qsrc, e, self.H, self.max_steps)


class BeamDecoder:

    def __init__(self, qsrc, H: ParityCheckMatrix,
                 cfg: dec.BeamConfig = dec.BeamConfig()):
        self.qsrc, self.H, self.cfg = qsrc, H, cfg

    def __call__(self, e: int) -> dec.DecodeResult:
        return dec.action_list_decode(self.qsrc, self.H.syndrome(e), self.H, self.cfg)


class BfDecoder:

    def __init__(self, H: ParityCheckMatrix,
                 cfg: dec.BitFlipConfig = dec.BitFlipConfig()):
        self.H, self.cfg = H, cfg

    def __call__(self, e: int) -> dec.DecodeResult:
        return dec.bit_flipping_decode(e, self.H, self.cfg)


class FeedbackDecoder:

    def __init__(self, qsrc, H: ParityCheckMatrix,
                 bf_cfg: dec.BitFlipConfig = dec.BitFlipConfig(),
                 max_outer: int = 10):
        self.qsrc, self.H, self.bf_cfg, self.max_outer = qsrc, H, bf_cfg, max_outer

    def __call__(self, e: int) -> dec.DecodeResult:
        def phi(x: int) -> dec.DecodeResult:
            return dec.bit_flipping_decode(x, self.H, self.bf_cfg)

        return dec.feedback_decode(phi, self.qsrc, e, self.H, self.max_outer)


class AutomorphismDecoder:

    def __init__(self, qsrc, H: ParityCheckMatrix,
                 cfg: dec.BeamConfig = dec.BeamConfig(), shifts=None):
        self.qsrc, self.H, self.cfg, self.shifts = qsrc, H, cfg, shifts

    def __call__(self, e: int) -> dec.DecodeResult:
        return dec.automorphism_list_decode(self.qsrc, e, self.H, self.cfg,
                                            self.shifts)


class OracleDecoder:
    """Returns the injected error itself; zero error rate by construction."""

    def __call__(self, e: int) -> dec.DecodeResult:
        return dec.DecodeResult(True, e, 0, 0)


class NullDecoder:
    """Never flips anything; frame errors exactly when the frame is noisy."""

    def __init__(self, H: ParityCheckMatrix):
        self.H = H

    def __call__(self, e: int) -> dec.DecodeResult:
        s = self.H.syndrome(e)
        return dec.DecodeResult(s == 0, 0, s, 0)


# ---------------------------------------------------------------------------
# the measurement loop
# ---------------------------------------------------------------------------

_POINT_ENV: dict = {}


def _point_init(decoder, n, bsc):
    _POINT_ENV.update(decoder=decoder, n=n, bsc=bsc)


def _run_range(span: tuple[int, int]) -> tuple[int, int]:
    decoder, n, bsc = _POINT_ENV["decoder"], _POINT_ENV["n"], _POINT_ENV["bsc"]
    fe = be = 0
    for idx in range(*span):
        e = sample_error(bsc, n, idx)
        res = decoder(e)
        if not res.converged or res.flips != e:
            fe += 1
        be += (res.flips ^ e).bit_count()
    return fe, be


def _normal_ci(errors: int, frames: int) -> tuple[float, float]:
    p = errors / frames
    half = 1.96 * math.sqrt(p * (1.0 - p) / frames)
    return max(0.0, p - half), min(1.0, p + half)


def run_point(decoder, n: int, rho: float, cfg: SimConfig) -> SimPoint:
    """Estimate FER/BER at one crossover probability.

    Stops at the first batch boundary where frame_errors >= target_errors,
    else at max_frames.  Identical results for any worker count.
    """
    bsc = BscConfig(rho, cfg.seed)
    spans = [
        (lo, min(lo + cfg.batch, cfg.max_frames))
        for lo in range(0, cfg.max_frames, cfg.batch)
    ]
    frames = fe = be = 0

    def consume(results) -> None:
        nonlocal frames, fe, be
        for (dfe, dbe), span in zip(results, spans):
            frames += span[1] - span[0]
            fe += dfe
            be += dbe
            if fe >= cfg.target_errors:
                break

    if cfg.workers == 1:
        _point_init(decoder, n, bsc)

        def serial():
            for span in spans:
                yield _run_range(span)

        consume(serial())
    else:
        with ProcessPoolExecutor(
            cfg.workers, initializer=_point_init, initargs=(decoder, n, bsc)
        ) as pool:
            consume(pool.map(_run_range, spans))
    fer = fe / frames
    ber = be / (frames * n)
    lo, hi = _normal_ci(fe, frames)
    return SimPoint(rho, frames, fe, be, fer, ber, lo, hi)


def run_curve(decoder, n: int, cfg: SimConfig,
              csv_path=None, gnuplot: bool = False) -> list[SimPoint]:
    """run_point over cfg.rhos; optionally writes the table as it goes."""
    points = [run_point(decoder, n, rho, cfg) for rho in cfg.rhos]
    if csv_path is not None:
        write_curve(points, csv_path, gnuplot=gnuplot)
    return points


_COLUMNS = ("rho", "frames", "frame_errors", "bit_errors", "fer", "ber",
            "ci_low", "ci_high")


def write_curve(points: list[SimPoint], path, gnuplot: bool = False) -> None:
    """CSV (or with gnuplot=True, '#'-commented whitespace-separated) table."""
    sep = " " if gnuplot else ","
    lines = [("# " if gnuplot else "") + sep.join(_COLUMNS)]
    for pt in points:
        lines.append(sep.join(repr(getattr(pt, c)) if isinstance(getattr(pt, c), float)
                              else str(getattr(pt, c)) for c in _COLUMNS))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
