"""Tripartite correlations: who can steer whom, and where.

Three families of witnesses over the output spectra: pairwise vLF variances
V_ij (below 4 flags inseparability of that splitting), triple-mode sums
V_ijk, and obr inferred-variance products (below 1 flags EPR steering of
mode i by the other two).  The two working regimes give opposite patterns:
the first steers through every partition while no pairwise variance dips,
the second violates the pairwise criterion for modes 1-2 instead.
"""

from harmoniccascade import (
    REGIME_PRESETS,
    DriftDiffusion,
    evaluate_grid,
    require_steady_state,
    spectrum_grid,
    summarize_grid,
)
from harmoniccascade.correlations import OBR_ORDER, PAIR_ORDER, TRIPLE_ORDER

for regime, p in REGIME_PRESETS.items():
    ss = require_steady_state(p)
    dd = DriftDiffusion.from_steady_state(p, ss.state)
    reports = evaluate_grid(spectrum_grid(p, dd))
    summary = summarize_grid(reports)

    print(f"regime {regime} grid minima (value @ omega)")
    for i, j in PAIR_ORDER:
        v, w = summary.min_v_pair[(i, j)]
        mark = "  <-- below 4" if v < 4 else ""
        print(f"  V_{i}{j}   = {v:13.9f} @ {w:+.2f}{mark}")
    for t in TRIPLE_ORDER:
        v, w = summary.min_v_triple[t]
        mark = "  <-- below 4" if v < 4 else ""
        print(f"  V_{t[0]}{t[1]}{t[2]}  = {v:13.9f} @ {w:+.2f}{mark}")
    for t in OBR_ORDER:
        v, w = summary.min_obr[t]
        mark = "  <-- steering" if v < 1 else ""
        print(f"  OBR_{t[0]}{t[1]}{t[2]} = {v:13.9f} @ {w:+.2f}{mark}")
    v, w = summary.min_sum_obr
    print(f"  sum OBR minimum {v:.9f} @ omega {w:+.2f} "
          f"({'genuine tripartite steering' if v < 1 else 'above 1'})")
    print()
