"""Deterministic substream derivation.

Every stochastic operation takes one integer seed.  Internally a
substream is derived as ``PCG64(SeedSequence([seed, *path]))`` where
``path`` is a fixed tuple of small integers identifying the consumer.
The pipeline driver uses these stage counters:

====================  ====
stage                 path
====================  ====
synthetic sampling    (0,)
train/test split      (1,)
variable selection    (2,)
mode testing          (3,)
====================  ====

Variable selection derives one child per iteration as ``(2, i)``; the
iteration-to-stream mapping is therefore independent of execution order.
"""

import numpy as np

SYNTH = 0
SPLIT = 1
VARSELECT = 2
MODETEST = 3


def substream(seed, *path):
    """Generator for the substream identified by ``(seed, *path)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *map(int, path)])))
