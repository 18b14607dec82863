import numpy as np  # noqa: F401

from mixnorm import ONE_SIDED, make_field


def random_field(rng, dims=1, symmetry=ONE_SIDED, n_modes=6, kmax=12, real=False):
    """Sparse random field with distinct nonzero wavevectors."""
    entries = {}
    while len(entries) < n_modes:
        k = tuple(int(x) for x in rng.integers(-kmax, kmax + 1, size=dims))
        if not any(k):
            continue
        if symmetry == ONE_SIDED:
            lead = next(c for c in k if c)
            if lead < 0:
                k = tuple(-c for c in k)
        v = complex(rng.normal(), rng.normal())
        if real:
            neg = tuple(-c for c in k)
            entries[k] = v
            entries[neg] = v.conjugate()
        else:
            entries[k] = v
    return make_field(entries, dims=dims, symmetry=symmetry, real=real)
