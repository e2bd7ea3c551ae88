import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from simtrans.rng import make_rng

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def rng():
    return make_rng(20240819)


def random_words(rng, n, prefix="w"):
    return [f"{prefix}{int(rng.integers(0, 50)):02d}" for _ in range(n)]


def random_permutation_pair(rng, max_len=20):
    """Source/target of equal length linked by a random permutation."""
    n = int(rng.integers(1, max_len + 1))
    src = [f"s{t}" for t in range(n)]
    tgt = [f"t{t}" for t in range(n)]
    perm = rng.permutation(n)
    links = {(int(perm[j]), j) for j in range(n)}
    return src, tgt, links
