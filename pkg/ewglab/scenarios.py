"""The scenarios a run can execute, with the CSV file each one writes."""
from enum import Enum
from typing import List, Tuple, Union

from .enums import ScenarioKind


class Scenario(Enum):
    """Characterize the scenarios. Each entry has three fields: key, filename and columns.

    Attributes
        key: the scenario name used in documents and reports
        filename: CSV file holding the scenario series
        columns: header of that CSV file
    """
    MEASUREMENT = ('measurement', 'measurement.csv',
                   ('t', 'phi', 'theta', 'record', 'likelihood', 'conditional_spin1', 'conditional_spin2'))
    RELSTATE = ('relstate', 'relstate.csv',
                ('sample', 'dim', 'blocks', 'commutant_gap', 'non_commutant_gap'))
    OSCILLATOR = ('oscillator', 'oscillator.csv',
                  ('t', 'meanX', 'meanP', 'x3p_quantum', 'x3p_classical', 'gap'))
    X3P_EIGEN = ('x3p-eigen', 'x3p_eigen.csv',
                 ('lambda', 'norm', 'meanX', 'meanP', 're_x3p', 'im_x3p', 'asymmetry'))
    RELPOS = ('relpos', 'relpos.csv',
              ('m', 'inner', 're_position', 'im_position', 're_asymmetry', 'im_asymmetry', 'ratio'))

    def __init__(self, key: str, filename: str, columns: Tuple[str, ...]) -> None:
        self.key: str = key
        self.filename: str = filename
        self.columns: Tuple[str, ...] = columns

    def __str__(self) -> str:
        return self.key

    @property
    def kind(self) -> ScenarioKind:
        return ScenarioKind(self.key)

    @classmethod
    def select(cls, kind: Union[ScenarioKind, str]) -> List['Scenario']:
        """Scenarios to run for ``kind``, in document order."""
        kind = ScenarioKind(kind)
        if kind == ScenarioKind.all:
            return list(cls)
        return [s for s in cls if s.key == str(kind)]
