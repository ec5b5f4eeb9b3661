import numpy as np


def trial_seed(base_seed: int, trial: int, stream: int = 0) -> int:
    """64-bit seed for one trial, a pure function of (base seed, trial index, stream)."""
    ss = np.random.SeedSequence([base_seed & 0xFFFFFFFFFFFFFFFF, trial, stream])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
