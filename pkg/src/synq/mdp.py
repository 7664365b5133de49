"""The syndrome-decoding decision process.

States are length-m syndromes (packed ints); action a flips code bit a, so
the deterministic transition is s' = s XOR h_a with h_a the a-th column of
H.  Episodes are capped at L steps.  Rewards are step-local functions of
the successor syndrome; all variants pay -1/L per step, add +1 on entering
the variant's success set, and subtract 1 on entering its penalty set:

  basic                       success {0}
  truncated(w)                success {0}, penalty outside S(w)
  feedback                    success outside S_f
  feedback_miscorrect         success S_c, penalty S_m
  bounded_feedback(w)         success S(w) \\ BS_f(w), penalty outside S(w)
  bounded_feedback_miscorrect success BS_c(w), penalty BS_m(w) or outside S(w)

S(w) is the weight-w syndrome ball; S_c/S_f/S_m classify the syndromes an
inner decoder corrects / fails on / miscorrects, and BS_* are the same sets
restricted to S(w).

Episode termination defines the tabulated state space.  The basic variant
ends only at the all-zero syndrome; the feedback variants end on leaving
S_f (their state space is the failure set).  The truncated and bounded
variants end at their success states *and* on any transition out of S(w):
the outside is one absorbing penalty sink, so the state space stays exactly
S(w) instead of growing with every excursion the behaviour policy takes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

from .codes import ParityCheckMatrix

VARIANTS = (
    "basic",
    "truncated",
    "feedback",
    "feedback_miscorrect",
    "bounded_feedback",
    "bounded_feedback_miscorrect",
)

_NEEDS_W = {"truncated", "bounded_feedback", "bounded_feedback_miscorrect"}


@dataclass(frozen=True)
class MdpConfig:
    L: int = 10
    gamma: float = 0.9
    variant: str = "basic"
    w: int | None = None

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("episode cap L must be >= 1")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown reward variant {self.variant!r}")
        if self.variant in _NEEDS_W and (self.w is None or self.w < 1):
            raise ValueError(f"variant {self.variant!r} needs a ball radius w >= 1")


@dataclass(frozen=True)
class SyndromeSets:
    """Syndrome sets the reward variants test membership against.

    Only the fields a variant actually uses need to be present; `ball` is
    S(w), `fail`/`correct`/`misc` are the full-space inner-decoder sets, and
    the `b*` fields are their restrictions to the ball.
    """

    ball: frozenset[int] | None = None
    fail: frozenset[int] | None = None
    correct: frozenset[int] | None = None
    misc: frozenset[int] | None = None
    bfail: frozenset[int] | None = None
    bcorrect: frozenset[int] | None = None
    bmisc: frozenset[int] | None = None


EMPTY_SETS = SyndromeSets()


def _need(sets: SyndromeSets, name: str) -> frozenset[int]:
    value = getattr(sets, name)
    if value is None:
        raise ValueError(f"reward variant requires syndrome set {name!r}")
    return value


def transition(s: int, a: int, H: ParityCheckMatrix) -> int:
    """Flip bit a: s' = s XOR column_a.  Involutive in a."""
    if not 0 <= a < H.n:
        raise ValueError(f"action {a} outside [0, {H.n})")
    return s ^ H.cols_int[a]


def reward(cfg: MdpConfig, sets: SyndromeSets, s_next: int) -> float:
    """Step reward for arriving at syndrome s_next."""
    step = -1.0 / cfg.L
    v = cfg.variant
    if v == "basic":
        return step + 1.0 if s_next == 0 else step
    if v == "truncated":
        if s_next == 0:
            return step + 1.0
        return step if s_next in _need(sets, "ball") else step - 1.0
    if v == "feedback":
        return step if s_next in _need(sets, "fail") else step + 1.0
    if v == "feedback_miscorrect":
        if s_next in _need(sets, "correct"):
            return step + 1.0
        if s_next in _need(sets, "fail"):
            return step
        if s_next in _need(sets, "misc"):
            return step - 1.0
        raise ValueError("syndrome outside the classified sets")
    if v == "bounded_feedback":
        if s_next not in _need(sets, "ball"):
            return step - 1.0
        return step if s_next in _need(sets, "bfail") else step + 1.0
    # bounded_feedback_miscorrect
    if s_next not in _need(sets, "ball"):
        return step - 1.0
    if s_next in _need(sets, "bcorrect"):
        return step + 1.0
    if s_next in _need(sets, "bfail"):
        return step
    if s_next in _need(sets, "bmisc"):
        return step - 1.0
    raise ValueError("syndrome inside ball but outside the bounded sets")


def is_terminal(cfg: MdpConfig, sets: SyndromeSets, s: int) -> bool:
    """Whether syndrome s ends an episode (success state or penalty sink)."""
    v = cfg.variant
    if v == "basic":
        return s == 0
    if v == "truncated":
        return s == 0 or s not in _need(sets, "ball")
    if v in ("feedback", "feedback_miscorrect"):
        return s not in _need(sets, "fail")
    return s not in _need(sets, "bfail")


class Step(NamedTuple):
    s: int
    a: int
    r: float
    s_next: int
    terminal: bool


class SyndromeMdp:
    """Environment bundle: parity checks, episode/reward config, syndrome sets."""

    def __init__(self, H: ParityCheckMatrix, cfg: MdpConfig,
                 sets: SyndromeSets = EMPTY_SETS):
        self.H = H
        self.cfg = cfg
        self.sets = sets

    def step(self, s: int, a: int) -> tuple[int, float, bool]:
        s2 = transition(s, a, self.H)
        return s2, reward(self.cfg, self.sets, s2), is_terminal(self.cfg, self.sets, s2)

    def is_terminal(self, s: int) -> bool:
        return is_terminal(self.cfg, self.sets, s)


def episode(env: SyndromeMdp, s0: int, policy: Callable[[int], int]) -> list[Step]:
    """Roll out at most L steps from s0; empty when s0 is already terminal."""
    steps: list[Step] = []
    if env.is_terminal(s0):
        return steps
    s = s0
    for _ in range(env.cfg.L):
        a = policy(s)
        s2, r, terminal = env.step(s, a)
        steps.append(Step(s, a, r, s2, terminal))
        s = s2
        if terminal:
            break
    return steps


def finite_horizon_q(j: int, r: float = 1.0, p: float = 0.1,
                     gamma: float = 0.9) -> float:
    """Value of reaching the success state in exactly j steps.

    Each of the j steps pays penalty p, the last also pays terminal reward r:
    gamma^(j-1) * r - p * (1 - gamma^j) / (1 - gamma), with the gamma -> 1
    limit r - j*p.
    """
    if j < 1:
        raise ValueError("horizon j must be >= 1")
    if gamma == 1.0:
        return r - j * p
    return gamma ** (j - 1) * r - p * (1.0 - gamma**j) / (1.0 - gamma)
