from __future__ import annotations

from enum import Enum, EnumMeta
from typing import Any, Optional

import sys
if sys.version_info >= (3, 11):
    from typing import Self
else:
    from typing_extensions import Self
del sys


class BaseEnumMeta(EnumMeta):
    def __contains__(cls: type[Any], obj: object) -> bool:
        try:
            cls(obj)
        except ValueError:
            return False
        else:
            return True


class BaseEnum(Enum, metaclass=BaseEnumMeta):
    """Base class for all the constants of the library. Can be printed directly
    and can be compared with a string if needed.

    Example:
        print(Record.up) ---> up
        Record.up == 'UP' ---> True
    """

    @classmethod
    def _missing_(cls, value: object) -> Optional[Self]:
        if isinstance(value, str):
            # be case insensitive
            value = value.lower()
            for member in cls:
                if member.value == value:
                    return member
            return None
        return None

    def __str__(self) -> str:
        return self.value

    def __eq__(self, other: object) -> bool:
        if isinstance(other, BaseEnum):
            return super().__eq__(other)
        elif isinstance(other, str):
            return self.value == other.lower()
        else:
            return False

    def __ne__(self, other: object) -> bool:
        equal = self.__eq__(other)
        if equal is NotImplemented:
            return equal
        return not equal

    def __hash__(self) -> int:
        return hash(self.value)


class Record(BaseEnum):
    """Observer records of the measurement model, in the block order
    H_up ⊕ H_dn ⊕ H_xx."""
    up = 'up'
    dn = 'dn'
    xx = 'xx'

    @property
    def index(self) -> int:
        return list(Record).index(self)


class Spin(BaseEnum):
    up = 'up'
    down = 'down'

    @property
    def projection_index(self) -> int:
        """1 for P_1 (spin up), 2 for P_2 (spin down)."""
        return 1 if self is Spin.up else 2


class MeasurementQuality(BaseEnum):
    perfect = 'perfect'
    uncorrelated = 'uncorrelated'
    anticorrelated = 'anticorrelated'
    partial = 'partial'


class Provenance(BaseEnum):
    """Where the expected value of a check comes from."""
    paper = 'paper'
    trivial = 'trivial'
    derived = 'derived'


class GridKind(BaseEnum):
    uniform = 'uniform'
    log = 'log'


class ScenarioKind(BaseEnum):
    measurement = 'measurement'
    relstate = 'relstate'
    oscillator = 'oscillator'
    x3p_eigen = 'x3p-eigen'
    relpos = 'relpos'
    all = 'all'
