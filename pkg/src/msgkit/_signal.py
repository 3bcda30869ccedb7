"""Lobe counting shared by the trajectory and quadrature routes."""
import numpy as np
from scipy.signal import find_peaks

REL_PROMINENCE = 0.01


def count_maxima(values, rel_prominence=REL_PROMINENCE):
    """Number of interior maxima with prominence >= rel_prominence * max(values)."""
    values = np.asarray(values, dtype=float)
    if values.size < 3:
        return 0
    top = float(np.max(values))
    if top <= 0:
        return 0
    peaks, _ = find_peaks(values, prominence=rel_prominence * top)
    return int(peaks.size)


def lobes_to_subkinks(maxima):
    # a single lobe is the plain kink, which has no subkink structure
    return 0 if maxima <= 1 else maxima
