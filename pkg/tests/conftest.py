import numpy as np
import pytest

from tlsheat import TlsNetwork, diode, transistor


def random_network(rng, n_sites=None, t_range=(0.01, 10.0), w_range=(0.0, 2.0)):
    """Random network with N in {2, 3}, energies/couplings in w_range, temperatures in t_range."""
    n = int(rng.choice([2, 3])) if n_sites is None else n_sites
    w = rng.uniform(*w_range, size=n)
    c = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    c[iu] = rng.uniform(*w_range, size=len(iu[0]))
    c = c + c.T
    T = rng.uniform(*t_range, size=n)
    return TlsNetwork(tuple(w), tuple(map(tuple, c)), tuple(T))


def random_networks(count, seed):
    rng = np.random.default_rng(seed)
    return [random_network(rng) for _ in range(count)]


@pytest.fixture
def reference_diode():
    return diode(1.0, 0.0, 0.1, 1.0, 0.1)


@pytest.fixture
def reference_transistor():
    return transistor(1.0, 0.1, 0.05, 0.01)
