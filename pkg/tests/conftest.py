import numpy as np

from dyadkde import DyadicSample


def random_sample(rng, n, p=1.0, scale=1.0):
    """A random symmetric edge sample with standard-normal-ish values.

    Values are kept O(1) so absolute identity tolerances in the 1e-10 range
    are meaningful.
    """
    iu, ju = np.triu_indices(n, k=1)
    values = rng.normal(0.0, scale, size=iu.size)
    if p < 1.0:
        keep = rng.uniform(size=iu.size) < p
        if keep.sum() < 3:
            keep[:3] = True
        iu, ju, values = iu[keep], ju[keep], values[keep]
    return DyadicSample(n, (iu + 1).astype(np.int32), (ju + 1).astype(np.int32), values)
