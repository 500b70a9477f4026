"""Brute-force dip oracle.

For sorted samples x_1 < ... < x_m (ties merged with multiplicity), the
candidate unimodal CDF G is piecewise linear between sample points with
free values G_i = G(x_i). Unimodality is expressed as slopes that rise
up to a peak segment k and fall afterwards. For each k we solve

    min t  s.t.  |G_i - F_n(x_i-)| <= t,  |G_i - F_n(x_i)| <= t,
                 0 <= G_1, G_m <= 1, slopes monotone around k

with an LP; the dip is the minimum over k. Independent of the
convex-minorant / concave-majorant iteration used by the library.

Usage: python3 dip_oracle.py  (prints frozen values used by the C++ tests)
"""
import numpy as np
from scipy.optimize import linprog


def dip_lp(samples):
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    ux, counts = np.unique(x, return_counts=True)
    m = len(ux)
    cum = np.cumsum(counts) / n
    lo = np.concatenate([[0.0], cum[:-1]])
    if m == 1:
        return 0.5 / n if n > 0 else 0.0
    best = np.inf
    # Variables: G_1..G_m, t
    nv = m + 1
    for k in range(m - 1):
        a_ub, b_ub = [], []

        def row():
            return np.zeros(nv)

        for i in range(m):
            for target in (lo[i], cum[i]):
                r = row(); r[i] = 1; r[-1] = -1; a_ub.append(r); b_ub.append(target)
                r = row(); r[i] = -1; r[-1] = -1; a_ub.append(r); b_ub.append(-target)
        for i in range(m - 1):
            r = row(); r[i] = 1; r[i + 1] = -1; a_ub.append(r); b_ub.append(0.0)
        # slope_j = (G_{j+1} - G_j) / h_j
        h = np.diff(ux)
        for j in range(m - 2):
            r = row()
            # rising before the peak segment: slope_j <= slope_{j+1}
            sgn = 1.0 if j + 1 <= k else -1.0
            r[j] += -sgn * (-1.0 / h[j]); r[j + 1] += -sgn * (1.0 / h[j])
            r[j + 1] += sgn * (-1.0 / h[j + 1]); r[j + 2] += sgn * (1.0 / h[j + 1])
            # sgn=+1: slope_j - slope_{j+1} <= 0 ; sgn=-1: slope_{j+1} - slope_j <= 0
            a_ub.append(-r); b_ub.append(0.0)
        bounds = [(0.0, 1.0)] * m + [(0.0, None)]
        c = np.zeros(nv); c[-1] = 1.0
        res = linprog(c, A_ub=np.array(a_ub), b_ub=np.array(b_ub), bounds=bounds,
                      method="highs")
        if res.status == 0:
            best = min(best, res.fun)
    return max(best, 0.5 / n)


CASES = {
    "equally_spaced_10": [float(i) for i in range(10)],
    "two_clusters": [0.00, 0.01, 0.02, 1.00, 1.01, 1.02],
    "skewed_7": [0.0, 0.1, 0.15, 0.2, 0.9, 2.5, 2.6],
    "mixed_12": [0.31, 1.2, -0.4, 2.2, 2.25, 2.3, 0.05, -1.7, 3.9, 4.0, 4.05, 0.6],
    "three_clusters_9": [0.0, 0.1, 0.2, 5.0, 5.1, 5.2, 10.0, 10.1, 10.2],
}

if __name__ == "__main__":
    try:
        import diptest
    except ImportError:
        diptest = None
    for name, xs in CASES.items():
        lp = dip_lp(xs)
        ref = diptest.dipstat(np.array(xs)) if diptest else float("nan")
        print(f"{name}: lp={lp:.12f} diptest_pkg={ref:.12f}")
