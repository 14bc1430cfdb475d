import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from classfield.catalog import catalog
from classfield.mackey import permutation_module


def catalog_groups(max_order=None):
    cat = catalog()
    out = [g for g in cat.values()]
    if max_order is not None:
        out = [g for g in out if g.order <= max_order]
    return out


def random_modules(group, seed=0, count=3, max_index=6, max_torsion=4):
    """Seeded permutation modules, optionally sign-twisted."""
    rng = random.Random(f"{seed}:{group.name}")
    subs = [h for h in group.all_subgroups() if h.index <= max_index]
    index2 = [h for h in group.all_subgroups() if h.index == 2]
    mods = []
    for _ in range(count):
        stab = rng.choice(subs)
        torsion = rng.choice([0, 2, 3, max_torsion])
        kernel = rng.choice(index2) if index2 and rng.random() < 0.4 else None
        mods.append(permutation_module(group, stab, torsion=torsion,
                                       sign_kernel=kernel))
    return mods


@pytest.fixture(scope="session")
def group_catalog():
    return catalog()
