"""Independent reference values for the C++ test suite.

Run with python3; the printed numbers are frozen into the tests. Nothing here
shares code with the library: plain numpy/scipy/hashlib only.
"""
import hashlib
import itertools

import numpy as np
from statsmodels.stats.proportion import proportion_confint


def h2(p):
    return 0.0 if p in (0.0, 1.0) else float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def entropy(v):
    v = np.asarray(v, dtype=float).ravel()
    v = v[v > 0]
    return float(-(v * np.log2(v)).sum())


def mi_from_joint(pxy):
    return entropy(pxy.sum(1)) + entropy(pxy.sum(0)) - entropy(pxy)


def bsc(p):
    return np.array([[1 - p, p], [p, 1 - p]])


def bec(e):
    return np.array([[1 - e, e, 0.0], [0.0, e, 1 - e]])


def main():
    out = {}
    out["entropy(0.9,0.1)"] = entropy([0.9, 0.1])
    out["I uniform through BSC(0.2)"] = mi_from_joint(0.5 * bsc(0.2))
    out["h(0.3)-h(0.1)"] = h2(0.3) - h2(0.1)
    out["h(0.2)"] = h2(0.2)

    # Posterior entropy of a 2-codeword n=1 code through an asymmetric binary channel.
    w = np.array([[0.7, 0.3], [0.2, 0.8]])
    joint = 0.5 * w  # rows: w1 (x = w1), cols: y3
    out["H(W1|Y3) asym n=1"] = entropy(joint) - entropy(joint.sum(0))

    # Same code at n=2 with codewords 01 and 10.
    cw = {0: (0, 1), 1: (1, 0)}
    j2 = np.zeros((2, 4))
    for m, x in cw.items():
        for k, y in enumerate(itertools.product(range(2), repeat=2)):
            j2[m, k] = 0.5 * w[x[0], y[0]] * w[x[1], y[1]]
    out["H(W1|Y3) asym n=2 01/10"] = entropy(j2) - entropy(j2.sum(0))

    for k, n in [(10, 100), (0, 50), (50, 50)]:
        lo, hi = proportion_confint(k, n, alpha=0.05, method="wilson")
        out[f"wilson({k},{n})"] = (float(lo), float(hi))

    out["sha256(abc)"] = hashlib.sha256(b"abc").hexdigest()

    # Less-noisy counterexample: min over binary U, p(u,x) of I(U;Ya) - I(U;Yb),
    # Ya = BEC(0.4), Yb = BSC(0.1); dense grid over p(u) and p(x|u).
    wa, wb = bec(0.4), bsc(0.1)
    g = np.linspace(0, 1, 201)
    A, B = np.meshgrid(g, g, indexing="ij")

    def mi_grid(pux, wch):
        # pux (..., 2, 2) -> I(U;Y) over the leading axes.
        pj = pux @ wch

        def ent(v, axes):
            v = np.where(v > 0, v, 1.0)
            return -(v * np.log2(v)).sum(axis=axes)

        return ent(pj.sum(-1), -1) + ent(pj.sum(-2), -1) - ent(pj, (-2, -1))

    best = np.inf
    for pu in g[1:-1]:
        row0 = np.stack([pu * (1 - A), pu * A], -1)
        row1 = np.stack([(1 - pu) * (1 - B), (1 - pu) * B], -1)
        pux = np.stack([row0, row1], -2)
        best = min(best, float((mi_grid(pux, wa) - mi_grid(pux, wb)).min()))
    out["less-noisy gap BEC(0.4) vs BSC(0.1), grid 201"] = best

    # More-capable gap on the same pair: max_p I(X;Yb) - I(X;Ya) (should be <= 0).
    mc = max(mi_from_joint(np.diag([1 - q, q]) @ wb) - mi_from_joint(np.diag([1 - q, q]) @ wa) for q in g)
    out["more-capable gap BEC(0.4) vs BSC(0.1)"] = mc

    for k, v in out.items():
        print(f"{k}: {v!r}")


if __name__ == "__main__":
    main()
