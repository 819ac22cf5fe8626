"""Pure-numpy implementation of the coined walk step.

Basis layout contract (shared with the compiled backend): directed-edge
basis states are grouped by first vertex, block v occupying positions
ptr[v]:ptr[v+1]; swap[j] is the index of the reversed pair of j; amp[j]
is the (real) coin amplitude of position j inside its block.
"""

import numpy as np

BACKEND = "python"


def coined_step(src, dst, swap, ptr, amp, sign):
    """dst = sign * ((2|c><c| - 1) per block) (S src) for a single state."""
    np.take(src, swap, out=dst)
    over = np.add.reduceat(amp * dst, ptr[:-1])
    two_proj = np.repeat(2.0 * over, np.diff(ptr)) * amp
    np.subtract(two_proj, dst, out=dst)
    dst *= sign
    return dst


def coined_step_batch(src, dst, swap, ptr, amp, sign, scratch=None):
    """Batched walk step over the columns of src (shape (dim, k)).

    sign has shape (dim, k): one oracle sign pattern per column.
    """
    np.take(src, swap, axis=0, out=dst)
    over = np.add.reduceat(amp[:, None] * dst, ptr[:-1], axis=0)
    two_proj = np.repeat(2.0 * over, np.diff(ptr), axis=0) * amp[:, None]
    np.subtract(two_proj, dst, out=dst)
    dst *= sign
    return dst
