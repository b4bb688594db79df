"""
EWG relative-state laboratory
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

Numerical checks of relative-state conditioning, an explicit spin measurement
model, the non-self-adjoint x³p operator of the harmonic oscillator and the
asymmetry of position under the Lorentz-invariant inner product.

:license: MIT, see LICENSE for more details
"""

__title__ = 'ewglab'
__license__ = 'MIT'
__version__ = '0.3.0'

import logging

logging.getLogger(__name__).addHandler(logging.NullHandler())

del logging
