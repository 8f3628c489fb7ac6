"""Order-independent seed derivation.

``mix64(a, b, c, ...)`` folds 64-bit words through the SplitMix64 finalizer::

    state = 0
    for w in words:
        state = splitmix64(state ^ (w mod 2**64))

where ``splitmix64(x)`` adds the golden-ratio increment ``0x9E3779B97F4A7C15``
and applies the xor-shift-multiply avalanche with constants
``0xBF58476D1CE4E5B9`` and ``0x94D049BB133111EB``.  Seeds derived from
``(master, realization, grid_point)`` therefore do not depend on which worker
runs which task or in which order.
"""

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix64(*words: int) -> int:
    state = 0
    for w in words:
        state = splitmix64(state ^ (int(w) & MASK64))
    return state


def realization_seed(master: int, realization: int, grid_index: int) -> int:
    return mix64(master, realization, grid_index)
