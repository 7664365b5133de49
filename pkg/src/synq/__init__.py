"""Reinforcement-learning syndrome decoding for binary linear block codes.

The package is organized around packed-integer syndromes: a length-m binary
syndrome is the Python int whose bit i is check i.  Everything else --
training, decoding, enumeration, simulation -- is built on that convention.

Modules
-------
codes         parity-check matrices, quasi-cyclic construction, alist I/O
channel       keyed per-frame binary symmetric channel sampling
mdp           the syndrome-decoding decision process and reward variants
tabular       Q-learning on sparse syndrome tables, QTAB persistence
neural        from-scratch MLP Q-network, DQN training, QNET persistence
decoders      greedy / action-list / bit-flipping / feedback / ensemble
automorphism  circulant permutation group, orbit counting, canonical forms
analysis      performance bounds, exhaustive sweeps, syndrome classification
sim           Monte Carlo FER/BER harness with reproducible parallelism
cli           the ``synq`` command-line front end
"""

from .channel import BscConfig, frame_rng, sample_error, sample_error_bits
from .codes import (TANNER_SPEC, CodeParams, ParityCheckMatrix, QcLdpcSpec,
                    ball_size, ball_syndrome_weights, bits_to_int,
                    build_qc_ldpc, hamming_ball_syndromes, int_to_bits,
                    load_alist, random_parity_check, save_alist, support)
from .decoders import (BeamConfig, BitFlipConfig, CandidatePath, DecodeResult,
                       action_list_decode, automorphism_list_decode,
                       bf_decode_batch, bit_flipping_decode, feedback_decode,
                       greedy_decode)
from .mdp import (VARIANTS, MdpConfig, SyndromeMdp, SyndromeSets, episode,
                  finite_horizon_q, reward, transition)
from .neural import DqnConfig, MlpNetwork, load_network, save_network, train_dqn
from .tabular import (QTable, TrainConfig, load_qtable, save_qtable, train_q)

__version__ = "0.1.0"

__all__ = [
    "BscConfig", "frame_rng", "sample_error", "sample_error_bits",
    "TANNER_SPEC", "CodeParams", "ParityCheckMatrix", "QcLdpcSpec",
    "ball_size", "ball_syndrome_weights", "bits_to_int", "build_qc_ldpc",
    "hamming_ball_syndromes", "int_to_bits", "load_alist",
    "random_parity_check", "save_alist", "support",
    "BeamConfig", "BitFlipConfig", "CandidatePath", "DecodeResult",
    "action_list_decode", "automorphism_list_decode", "bf_decode_batch",
    "bit_flipping_decode", "feedback_decode", "greedy_decode",
    "VARIANTS", "MdpConfig", "SyndromeMdp", "SyndromeSets", "episode",
    "finite_horizon_q", "reward", "transition",
    "DqnConfig", "MlpNetwork", "load_network", "save_network", "train_dqn",
    "QTable", "TrainConfig", "load_qtable", "save_qtable", "train_q",
    "__version__",
]
