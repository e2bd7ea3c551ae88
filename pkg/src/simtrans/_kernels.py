"""Hot inner loops for EM alignment training.

One sweep = E-step (expected co-occurrence counts plus corpus log-likelihood
under the current table) followed by the M-step row normalization. The
probability table is stored sparsely over co-occurring (source, target) word
pairs in CSR form; the corpus is pre-expanded into one flat "event" per
(sentence pair, target position, source position incl. NULL).

Two interchangeable implementations exist: a numba @njit kernel and a pure
numpy one. Selection is controlled by the SIMTRANS_NUMBA environment
variable: "0"/"off" forces numpy, "1"/"on" requires numba, anything else
(default) uses numba when importable. Both paths are deterministic; they can
differ in the last couple of float ulps because summation order differs.
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only on stripped installs
    HAVE_NUMBA = False


def em_sweep_numpy(probs, event_slot, group_ptr, row_ptr, ll_const):
    """One EM sweep, vectorized numpy path."""
    w = probs[event_slot]
    z = np.add.reduceat(w, group_ptr[:-1])
    ll = float(np.log(z).sum()) - ll_const
    c = w / np.repeat(z, np.diff(group_ptr))
    counts = np.bincount(event_slot, weights=c, minlength=probs.size)
    row_sums = np.add.reduceat(counts, row_ptr[:-1])
    new_probs = counts / np.repeat(row_sums, np.diff(row_ptr))
    return new_probs, ll


def _em_sweep_loops(probs, event_slot, group_ptr, row_ptr, ll_const):
    counts = np.zeros(probs.size, dtype=np.float64)
    ll = 0.0
    for g in range(group_ptr.size - 1):
        lo, hi = group_ptr[g], group_ptr[g + 1]
        z = 0.0
        for idx in range(lo, hi):
            z += probs[event_slot[idx]]
        ll += np.log(z)
        for idx in range(lo, hi):
            slot = event_slot[idx]
            counts[slot] += probs[slot] / z
    new_probs = np.empty(probs.size, dtype=np.float64)
    for r in range(row_ptr.size - 1):
        lo, hi = row_ptr[r], row_ptr[r + 1]
        row_sum = 0.0
        for idx in range(lo, hi):
            row_sum += counts[idx]
        for idx in range(lo, hi):
            new_probs[idx] = counts[idx] / row_sum
    return new_probs, ll - ll_const


if HAVE_NUMBA:
    em_sweep_numba = njit(cache=True)(_em_sweep_loops)
else:
    em_sweep_numba = None


def numba_enabled() -> bool:
    flag = os.environ.get("SIMTRANS_NUMBA", "auto").strip().lower()
    if flag in ("0", "off", "false", "no"):
        return False
    if flag in ("1", "on", "true", "yes"):
        if not HAVE_NUMBA:
            raise RuntimeError("SIMTRANS_NUMBA=1 but numba is not importable")
        return True
    return HAVE_NUMBA


def em_sweep(probs, event_slot, group_ptr, row_ptr, ll_const):
    """Dispatch one EM sweep to the selected implementation."""
    if numba_enabled():
        return em_sweep_numba(probs, event_slot, group_ptr, row_ptr, ll_const)
    return em_sweep_numpy(probs, event_slot, group_ptr, row_ptr, ll_const)


def active_impl() -> str:
    return "numba" if numba_enabled() else "numpy"
