import numpy as np

_MASK_64 = (1 << 64) - 1


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """
    Returns the random stream owned by sample (or run) `index` of a computation seeded with `seed`.

    Philox is counter based, so the stream depends only on the pair and never on which thread draws from it or
    in which order the samples are processed.
    """
    if index < 0:
        raise ValueError(f"Stream index must be non-negative, got {index}.")
    key = ((int(seed) & _MASK_64) << 64) | (int(index) & _MASK_64)
    return np.random.Generator(np.random.Philox(key=key))
