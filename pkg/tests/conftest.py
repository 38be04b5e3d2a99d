import random
from fractions import Fraction

import pytest

from fairk.instances import gen_random_finite, gen_random_line, gen_random_tree, gen_random_uniform


def mixed_instance(seed, k_max=3, t_max=8, sites=6):
    """Random small instance over one of the four space types, chosen by seed."""
    rng = random.Random(seed)
    k = rng.randint(1, k_max)
    T = rng.randint(0, t_max)
    kind = seed % 4
    if kind == 0:
        return gen_random_line(seed, k, T, L=rng.randint(1, 3), grid=2)  # at most 7 sites
    if kind == 1:
        return gen_random_tree(seed, k, T, rng.randint(1, sites))
    if kind == 2:
        return gen_random_uniform(seed, k, T, rng.randint(max(k, 2), sites))
    return gen_random_finite(seed, k, T, rng.randint(1, sites))


@pytest.fixture
def frac():
    return Fraction
