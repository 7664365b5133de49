"""Feed-forward action-value network and its training loop, in plain numpy.

One hidden ReLU layer, linear output head, double precision throughout.
Backpropagation is hand-written; the training loop keeps a primary and a
periodically synchronized target copy, samples uniform minibatches from a
ring replay buffer, and takes one gradient step per environment step once
the buffer can fill a batch.

File formats:

  binary .qnet:  magic "QNET" | u32 version=1 | u32 header_len
                 | header JSON (sizes [m, hidden, n], activation, code_hash,
                   config; sorted keys)
                 | parameter blocks in order W1 (hidden x m), b1, W2
                   (n x hidden), b2, each row-major little-endian float64
  text export:   line "qnet/v1", line "meta <header JSON>", then one line
                 per tensor: "<name> <rows> <cols> <float.hex() ...>".
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from .codes import int_to_bits
from .mdp import SyndromeMdp
from .tabular import epsilon_at

_MAGIC = b"QNET"
_VERSION = 1


# ---------------------------------------------------------------------------
# network
# ---------------------------------------------------------------------------


class MlpNetwork:

    def __init__(self, W1, b1, W2, b2, activation: str = "relu",
                 meta: dict | None = None):
        if activation != "relu":
            raise ValueError(f"unsupported activation {activation!r}")
        self.W1 = np.asarray(W1, dtype=np.float64)
        self.b1 = np.asarray(b1, dtype=np.float64)
        self.W2 = np.asarray(W2, dtype=np.float64)
        self.b2 = np.asarray(b2, dtype=np.float64)
        self.activation = activation
        self.meta = dict(meta or {})
        hid, m = self.W1.shape
        n, hid2 = self.W2.shape
        if hid != hid2 or self.b1.shape != (hid,) or self.b2.shape != (n,):
            raise ValueError("layer shapes are inconsistent")
        for p in (self.W1, self.b1, self.W2, self.b2):
            if not np.isfinite(p).all():
                raise ValueError("non-finite network parameters")

    # -- construction -------------------------------------------------------

    @classmethod
    def init(cls, m: int, hidden: int, n: int, seed: int = 0,
             meta: dict | None = None) -> "MlpNetwork":
        """Uniform(+-sqrt(6/fan_in)) weights, zero biases."""
        rng = np.random.Generator(
            np.random.Philox(key=np.array([seed, 0x2E7], np.uint64))
        )
        lim1 = np.sqrt(6.0 / m)
        lim2 = np.sqrt(6.0 / hidden)
        return cls(
            rng.uniform(-lim1, lim1, (hidden, m)),
            np.zeros(hidden),
            rng.uniform(-lim2, lim2, (n, hidden)),
            np.zeros(n),
            meta=meta,
        )

    @property
    def sizes(self) -> tuple[int, int, int]:
        return (self.W1.shape[1], self.W1.shape[0], self.W2.shape[0])

    @property
    def n(self) -> int:
        return self.W2.shape[0]

    @property
    def m(self) -> int:
        return self.W1.shape[1]

    def copy(self) -> "MlpNetwork":
        return MlpNetwork(self.W1.copy(), self.b1.copy(), self.W2.copy(),
                          self.b2.copy(), self.activation, self.meta)

    def params(self) -> dict[str, np.ndarray]:
        return {"W1": self.W1, "b1": self.b1, "W2": self.W2, "b2": self.b2}

    # -- inference ----------------------------------------------------------

    def forward_batch(self, X: np.ndarray) -> np.ndarray:
        """(B, m) float input -> (B, n) action values."""
        if X.ndim != 2 or X.shape[1] != self.m:
            raise ValueError("input width does not match the network")
        h = np.maximum(X @ self.W1.T + self.b1, 0.0)
        return h @ self.W2.T + self.b2

    def forward(self, x: np.ndarray) -> np.ndarray:
        h = np.maximum(self.W1 @ x + self.b1, 0.0)
        return self.W2 @ h + self.b2

    def q_values(self, s: int) -> np.ndarray:
        return self.forward(int_to_bits(s, self.m).astype(np.float64))

    def q_values_batch(self, states: list[int]) -> np.ndarray:
        X = np.stack([int_to_bits(s, self.m) for s in states]).astype(np.float64)
        return self.forward_batch(X)


# ---------------------------------------------------------------------------
# replay buffer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Transition:
    s: int
    a: int
    r: float
    s_next: int
    terminal: bool


class ReplayBuffer:
    """Fixed-capacity ring; push overwrites the oldest entry when full."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._items: list[Transition] = []
        self._next = 0

    def push(self, tr: Transition) -> None:
        if len(self._items) < self.capacity:
            self._items.append(tr)
        else:
            self._items[self._next] = tr
        self._next = (self._next + 1) % self.capacity

    def sample(self, rng: np.random.Generator, k: int) -> list[Transition]:
        """k distinct items, uniform without replacement."""
        if k > len(self._items):
            raise ValueError("not enough items to sample")
        idx = rng.choice(len(self._items), size=k, replace=False)
        return [self._items[i] for i in idx]

    def __len__(self):
        return len(self._items)


# ---------------------------------------------------------------------------
# loss and optimizers
# ---------------------------------------------------------------------------


def dqn_loss(
    primary: MlpNetwork,
    target: MlpNetwork,
    S: np.ndarray,
    A: np.ndarray,
    R: np.ndarray,
    S2: np.ndarray,
    T: np.ndarray,
    gamma: float,
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean squared TD error and its gradients w.r.t. the primary parameters.

    Targets are r for terminal transitions, else r + gamma * max_a' target
    values at s'; the gradient flows only through the primary value of the
    taken action.
    """
    B = S.shape[0]
    z1 = S @ primary.W1.T + primary.b1
    h = np.maximum(z1, 0.0)
    q = h @ primary.W2.T + primary.b2
    qsel = q[np.arange(B), A]

    q_next = target.forward_batch(S2)
    y = R + gamma * q_next.max(axis=1) * ~T

    diff = qsel - y
    loss = float(np.mean(diff**2))

    dq = np.zeros_like(q)
    dq[np.arange(B), A] = 2.0 * diff / B
    dW2 = dq.T @ h
    db2 = dq.sum(axis=0)
    dh = dq @ primary.W2
    dz1 = dh * (z1 > 0.0)
    dW1 = dz1.T @ S
    db1 = dz1.sum(axis=0)
    return loss, {"W1": dW1, "b1": db1, "W2": dW2, "b2": db2}


class Adam:

    def __init__(self, params: dict[str, np.ndarray], lr: float,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, params: dict[str, np.ndarray],
             grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        b1c = 1.0 - self.beta1**self.t
        b2c = 1.0 - self.beta2**self.t
        for k, p in params.items():
            g = grads[k]
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * g
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * g * g
            p -= self.lr * (self.m[k] / b1c) / (np.sqrt(self.v[k] / b2c) + self.eps)


class Sgd:

    def __init__(self, params: dict[str, np.ndarray], lr: float):
        self.lr = lr

    def step(self, params, grads) -> None:
        for k, p in params.items():
            p -= self.lr * grads[k]


# ---------------------------------------------------------------------------
# training loop
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DqnConfig:
    episodes: int
    hidden: int = 512
    batch: int = 128
    lr: float = 1e-4
    eps_max: float = 0.9
    eps_min: float = 0.05
    buffer_capacity: int = 100_000
    sync_every: int = 1000
    optimizer: str = "adam"
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    check_every: int = 0

    def __post_init__(self):
        if self.episodes < 1 or self.hidden < 1:
            raise ValueError("episodes and hidden size must be >= 1")
        if self.batch < 1 or self.batch > self.buffer_capacity:
            raise ValueError("need 1 <= batch <= buffer_capacity")
        if self.lr <= 0 or self.sync_every < 1:
            raise ValueError("lr must be positive, sync_every >= 1")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if not 0.0 <= self.eps_min <= self.eps_max <= 1.0:
            raise ValueError("need 0 <= eps_min <= eps_max <= 1")


class _StateCache:
    """Bounded syndrome -> float-vector unpacking cache."""

    def __init__(self, m: int, limit: int = 1 << 19):
        self.m = m
        self.limit = limit
        self._d: dict[int, np.ndarray] = {}

    def get(self, s: int) -> np.ndarray:
        x = self._d.get(s)
        if x is None:
            x = int_to_bits(s, self.m).astype(np.float64)
            if len(self._d) < self.limit:
                self._d[s] = x
        return x


def train_dqn(
    env: SyndromeMdp,
    cfg: DqnConfig,
    sampler,
    stop_when=None,
) -> MlpNetwork:
    """Deep Q-learning on the syndrome process; returns the primary network.

    Deterministic for a fixed seed.  Raises RuntimeError when the loss goes
    non-finite (training divergence).  `stop_when(net, episode)` is polled
    every cfg.check_every episodes for early exit.
    """
    H, n, m = env.H, env.H.n, env.H.m
    rng = np.random.Generator(
        np.random.Philox(key=np.array([cfg.seed, 0xD62], np.uint64))
    )
    meta = {
        "code_hash": H.code_hash,
        "sizes": [m, cfg.hidden, n],
        "activation": "relu",
        "config": {
            "episodes": cfg.episodes, "batch": cfg.batch, "lr": cfg.lr,
            "eps_max": cfg.eps_max, "eps_min": cfg.eps_min,
            "buffer_capacity": cfg.buffer_capacity,
            "sync_every": cfg.sync_every, "optimizer": cfg.optimizer,
            "seed": cfg.seed, "gamma": env.cfg.gamma, "L": env.cfg.L,
            "variant": env.cfg.variant, "w": env.cfg.w,
        },
    }
    primary = MlpNetwork.init(m, cfg.hidden, n, seed=cfg.seed, meta=meta)
    target = primary.copy()
    params = primary.params()
    opt = (Adam(params, cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps)
           if cfg.optimizer == "adam" else Sgd(params, cfg.lr))
    buffer = ReplayBuffer(cfg.buffer_capacity)
    cache = _StateCache(m)
    gamma, L = env.cfg.gamma, env.cfg.L
    grad_steps = 0

    for ep in range(cfg.episodes):
        eps = epsilon_at(ep, cfg.eps_max, cfg.eps_min, cfg.episodes)
        s = sampler(rng)
        if not env.is_terminal(s):
            for _ in range(L):
                if rng.random() < eps:
                    a = int(rng.integers(n))
                else:
                    a = int(np.argmax(primary.forward(cache.get(s))))
                s2, r, terminal = env.step(s, a)
                buffer.push(Transition(s, a, r, s2, terminal))
                if len(buffer) >= cfg.batch:
                    batch = buffer.sample(rng, cfg.batch)
                    S = np.stack([cache.get(tr.s) for tr in batch])
                    S2 = np.stack([cache.get(tr.s_next) for tr in batch])
                    A = np.array([tr.a for tr in batch])
                    R = np.array([tr.r for tr in batch])
                    T = np.array([tr.terminal for tr in batch])
                    loss, grads = dqn_loss(primary, target, S, A, R, S2, T, gamma)
                    if not np.isfinite(loss):
                        raise RuntimeError(
                            f"training diverged: non-finite loss at episode {ep}, "
                            f"gradient step {grad_steps}"
                        )
                    opt.step(params, grads)
                    grad_steps += 1
                    if grad_steps % cfg.sync_every == 0:
                        target = primary.copy()
                s = s2
                if terminal:
                    break
        if (stop_when is not None and cfg.check_every
                and (ep + 1) % cfg.check_every == 0 and stop_when(primary, ep + 1)):
            break
    return primary


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------


def _net_header(net: MlpNetwork) -> bytes:
    meta = dict(net.meta)
    meta["sizes"] = list(net.sizes)
    meta["activation"] = net.activation
    return json.dumps(meta, sort_keys=True, separators=(",", ":")).encode()


def save_network(net: MlpNetwork, path) -> None:
    header = _net_header(net)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", _VERSION, len(header)))
        fh.write(header)
        for p in (net.W1, net.b1, net.W2, net.b2):
            fh.write(np.ascontiguousarray(p, dtype="<f8").tobytes())


def load_network(path) -> MlpNetwork:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != _MAGIC:
        raise ValueError(f"{path}: not a network file")
    version, hlen = struct.unpack_from("<II", blob, 4)
    if version != _VERSION:
        raise ValueError(f"{path}: unsupported network version {version}")
    meta = json.loads(blob[12:12 + hlen].decode())
    m, hidden, n = meta["sizes"]
    off = 12 + hlen
    shapes = [("W1", (hidden, m)), ("b1", (hidden,)), ("W2", (n, hidden)),
              ("b2", (n,))]
    need = sum(int(np.prod(sh)) for _, sh in shapes) * 8
    if len(blob) - off != need:
        raise ValueError(f"{path}: truncated network file")
    tensors = {}
    for name, sh in shapes:
        size = int(np.prod(sh)) * 8
        tensors[name] = np.frombuffer(blob[off:off + size], dtype="<f8").reshape(sh).copy()
        off += size
    return MlpNetwork(tensors["W1"], tensors["b1"], tensors["W2"], tensors["b2"],
                      meta.get("activation", "relu"), meta)


def save_network_text(net: MlpNetwork, path) -> None:
    with open(path, "w") as fh:
        fh.write("qnet/v1\n")
        fh.write("meta " + _net_header(net).decode() + "\n")
        for name, p in net.params().items():
            mat = np.atleast_2d(p)
            values = " ".join(float(v).hex() for v in mat.ravel())
            fh.write(f"{name} {mat.shape[0]} {mat.shape[1]} {values}\n")


def load_network_text(path) -> MlpNetwork:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != "qnet/v1":
        raise ValueError(f"{path}: not a network text export")
    if not lines[1].startswith("meta "):
        raise ValueError(f"{path}: missing meta line")
    meta = json.loads(lines[1][5:])
    tensors = {}
    for line in lines[2:]:
        if not line:
            continue
        name, rows, cols, *values = line.split()
        arr = np.array([float.fromhex(v) for v in values]).reshape(int(rows), int(cols))
        tensors[name] = arr
    return MlpNetwork(
        tensors["W1"], tensors["b1"].ravel(), tensors["W2"], tensors["b2"].ravel(),
        meta.get("activation", "relu"), meta,
    )
