import numpy as np
import pytest

from synq.codes import (TANNER_SPEC, ParityCheckMatrix, QcLdpcSpec,
                        build_qc_ldpc)


@pytest.fixture(scope="session")
def tanner():
    return build_qc_ldpc(TANNER_SPEC)


@pytest.fixture(scope="session")
def small_spec():
    return QcLdpcSpec(p=7, j=3, k_blocks=3, a=2, b=4)


@pytest.fixture(scope="session")
def small_qc(small_spec):
    return build_qc_ldpc(small_spec)


@pytest.fixture(scope="session")
def hamming():
    # columns are the binary expansions of 1..7, so the syndrome of a
    # single-bit error at position i is i+1 -- handy as an exact oracle
    bits = np.array(
        [[(c + 1) >> r & 1 for c in range(7)] for r in range(3)], dtype=np.uint8
    )
    return ParityCheckMatrix(bits)


def rng_for_tests(tag: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([tag, 0xC0FFEE], np.uint64)))
