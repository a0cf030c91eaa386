"""Hot matching kernels: numba-jitted loops with a pure-numpy fallback.

Set ``CXGMINER_NO_NUMBA=1`` to force the numpy path (the two paths must
produce identical results; see tests and benchmarks/bench_match.py).
"""

from __future__ import annotations

import os

import numpy as np

if os.environ.get("CXGMINER_NO_NUMBA", "") not in ("", "0"):
    USING_NUMBA = False
else:
    try:
        from numba import njit
        USING_NUMBA = True
    except ImportError:  # pragma: no cover
        USING_NUMBA = False


def _match_all_py(line_arr, kinds, fillers, offsets, out):
    """Reference loop; shape shared with the jitted version."""
    n = line_arr.shape[0]
    nc = offsets.shape[0] - 1
    m = 0
    for c in range(nc):
        lo = offsets[c]
        length = offsets[c + 1] - lo
        for start in range(n - length + 1):
            ok = True
            for j in range(length):
                if line_arr[start + j, kinds[lo + j]] != fillers[lo + j]:
                    ok = False
                    break
            if ok:
                if out is not None:
                    out[m, 0] = c
                    out[m, 1] = start
                m += 1
    return m


if USING_NUMBA:
    _match_all_jit = njit(cache=True)(_match_all_py)

    def match_all(line_arr, kinds, fillers, offsets):
        count = _match_all_jit(line_arr, kinds, fillers, offsets, None)
        out = np.empty((count, 2), dtype=np.int64)
        if count:
            _match_all_jit(line_arr, kinds, fillers, offsets, out)
        return out

else:

    def match_all(line_arr, kinds, fillers, offsets):
        n = line_arr.shape[0]
        nc = offsets.shape[0] - 1
        cids = []
        starts = []
        for c in range(nc):
            lo = int(offsets[c])
            length = int(offsets[c + 1]) - lo
            if length > n:
                continue
            window = n - length + 1
            ok = np.ones(window, dtype=bool)
            for j in range(length):
                ok &= line_arr[j:j + window, kinds[lo + j]] == fillers[lo + j]
            hits = np.flatnonzero(ok)
            cids.extend([c] * len(hits))
            starts.extend(hits.tolist())
        out = np.empty((len(cids), 2), dtype=np.int64)
        out[:, 0] = cids
        out[:, 1] = starts
        return out
