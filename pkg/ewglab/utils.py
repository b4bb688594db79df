from typing import Any, List

import numpy as np


class _Missing:
    def __eq__(self, other: object) -> bool:
        return False

    def __ne__(self, other: object) -> bool:
        return not self.__eq__(other)

    def __bool__(self) -> bool:
        return False

    def __len__(self) -> int:
        return 0

    def __str__(self) -> str:
        return 'MISSING'

    def __repr__(self) -> str:
        return 'MISSING'


MISSING: Any = _Missing()


def or_default(value: Any, default: Any) -> Any:
    """Returns ``default`` when ``value`` was not passed."""
    return default if value is MISSING else value


def spawn_generators(seed: int, count: int) -> List[np.random.Generator]:
    """Independent generators for ``count`` jobs derived from one seed.

    The i-th generator depends only on ``seed`` and ``i``, never on the order
    in which jobs are executed.
    """
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(child) for child in children]
