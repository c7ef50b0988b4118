import collections
import random

import pytest
from hypothesis import settings

from trihoch import bar_oracle, build_filtered, cohomology_dims, validate_triangular

from instances import (
    FP,
    KIND_DUAL,
    KIND_FIELD,
    KIND_PRODUCT,
    SEED,
    hand_coded_instances,
    random_path_algebra,
    random_tensorial3,
)

settings.register_profile("suite", deadline=None, derandomize=True)
settings.load_profile("suite")

SuiteInstance = collections.namedtuple("SuiteInstance", "name t fc hh")


@pytest.fixture(scope="session")
def suite2():
    """The randomized oracle suite: 8 random path algebras, 6 random
    tensorial builds, 8 hand-coded instances; every one validated and with
    its filtered complex (window L=4) and cohomology built once."""
    rng = random.Random(SEED)
    raw = []
    for k in range(8):
        raw.append((f"path{k}", random_path_algebra(rng, FP)))
    for k in range(6):
        kinds = (KIND_FIELD,) if k % 2 == 0 else (KIND_FIELD, KIND_PRODUCT,
                                                  KIND_DUAL)
        raw.append((f"tensorial{k}", random_tensorial3(rng, FP,
                                                       mid_kinds=kinds)))
    raw.extend(hand_coded_instances())

    out = []
    for name, t in raw:
        assert validate_triangular(t) == [], name
        assert t.total.dim <= 8, name
        fc = build_filtered(t, L=4)
        out.append(SuiteInstance(name, t, fc, cohomology_dims(fc.window)))
    return out


@pytest.fixture(scope="session")
def suite2_oracles(suite2):
    """Brute-force cohomology (window L=3) for every suite-2 instance."""
    return {inst.name: cohomology_dims(bar_oracle(inst.t, L=3))
            for inst in suite2}


@pytest.fixture(scope="session")
def degeneration_suite():
    """Tensorial three-level instances for the collapse checks: five with
    a one-dimensional middle algebra, five with a wider one."""
    rng = random.Random(SEED + 1)
    mid_one = [random_tensorial3(rng, FP, mid_kinds=(KIND_FIELD,), cap=10)
               for _ in range(5)]
    mid_wide = [random_tensorial3(rng, FP, mid_kinds=(KIND_PRODUCT, KIND_DUAL),
                                  cap=10) for _ in range(5)]
    for t in mid_one + mid_wide:
        assert validate_triangular(t) == []
    return mid_one, mid_wide
