"""Counter-based random streams keyed by (master_seed, trial, ...).

Philox is a counter-based generator, so a stream depends only on its key and
never on which worker draws it or in which order trials are scheduled.
"""

import numpy as np

CHANNEL_STREAM = 0
PATTERN_STREAM = 1


def stream(master_seed: int, *key: int) -> np.random.Generator:
    seq = np.random.SeedSequence(master_seed, spawn_key=key)
    return np.random.Generator(np.random.Philox(seq))


def channel_stream(master_seed: int, trial: int) -> np.random.Generator:
    return stream(master_seed, trial, CHANNEL_STREAM)


def pattern_stream(master_seed: int, trial: int, n_s: int) -> np.random.Generator:
    return stream(master_seed, trial, PATTERN_STREAM, n_s)
