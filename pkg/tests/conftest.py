import numpy as np
import pytest

from riemopt.flag import FlagQuotient
from riemopt.linalg import BlockPartition
from riemopt.psd_fixed_rank import PsdFixedRank
from riemopt.spd import SymmetricPositiveDefinite
from riemopt.sphere import Sphere
from riemopt.stiefel import Stiefel


def rng_for(seed=0):
    return np.random.default_rng(seed)


STIEFEL_PARAM_GRID = [(1.0, 1.0), (1.0, 0.5), (0.3, 2.7)]
PSD_PARAM_GRID = [(1.0, 1.0, 1.0), (1.0, 0.5, 2.0), (0.6, 1.3, 0.4)]
FLAG_PARTS = [(), (4,), (2, 1, 1)]


def make_stiefel(alpha0=1.0, alpha1=0.5, n=7, d=3):
    return Stiefel(n, d, alpha0, alpha1)


def make_flag(sizes=(2, 1, 1), n=8, d=None, alpha0=1.0, alpha1=0.5):
    d = d if d is not None else max(sum(sizes), 1) + (1 if not sizes else 0)
    if sizes == ():
        part = BlockPartition((), 4)
        return FlagQuotient(n, part, alpha0, alpha1)
    part = BlockPartition(sizes, sum(sizes))
    return FlagQuotient(n, part, alpha0, alpha1)


def make_spd(n=5):
    return SymmetricPositiveDefinite(n)


def make_psd(n=8, p=3, alpha0=1.0, alpha1=0.5, beta=2.0):
    return PsdFixedRank(n, p, alpha0, alpha1, beta)


def make_sphere(n=6):
    return Sphere(n)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
