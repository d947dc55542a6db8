#!/usr/bin/env python3
"""Monte Carlo response surfaces for Dickey-Fuller tau quantiles.

Simulates the lag-0 Dickey-Fuller t-ratio under a driftless Gaussian random
walk for several regression sample sizes T, takes empirical quantiles at a
fixed probability grid and fits q(T) = c0 + c1/T + c2/T^2 by least squares.
Output is a C++ initializer list pasted into include/asymvol/stats/adf_table.hpp.
"""
import numpy as np

PROBS = [0.001, 0.005, 0.01, 0.025, 0.05, 0.10, 0.20, 0.30, 0.40, 0.50,
         0.60, 0.70, 0.80, 0.90, 0.95, 0.975, 0.99, 0.995, 0.999]
SIZES = [20, 30, 50, 75, 100, 150, 250, 400, 700, 1000]
REPS = 400_000
CHUNK = 20_000


def taus(T, reps, rng):
    out_nc, out_c = [], []
    done = 0
    while done < reps:
        m = min(CHUNK, reps - done)
        e = rng.standard_normal((m, T + 1))
        e[:, 0] = 0.0
        y = np.cumsum(e, axis=1)
        lag = y[:, :-1]
        dy = np.diff(y, axis=1)
        # no deterministic term
        sxx = np.einsum("ij,ij->i", lag, lag)
        sxy = np.einsum("ij,ij->i", lag, dy)
        syy = np.einsum("ij,ij->i", dy, dy)
        g = sxy / sxx
        s2 = (syy - g * sxy) / (T - 1)
        out_nc.append(g / np.sqrt(s2 / sxx))
        # intercept
        lc = lag - lag.mean(axis=1, keepdims=True)
        dc = dy - dy.mean(axis=1, keepdims=True)
        sxx = np.einsum("ij,ij->i", lc, lc)
        sxy = np.einsum("ij,ij->i", lc, dc)
        syy = np.einsum("ij,ij->i", dc, dc)
        g = sxy / sxx
        s2 = (syy - g * sxy) / (T - 2)
        out_c.append(g / np.sqrt(s2 / sxx))
        done += m
    return np.concatenate(out_nc), np.concatenate(out_c)


def main():
    rng = np.random.default_rng(20140807)
    q_nc = np.empty((len(SIZES), len(PROBS)))
    q_c = np.empty_like(q_nc)
    for i, T in enumerate(SIZES):
        a, b = taus(T, REPS, rng)
        q_nc[i] = np.quantile(a, PROBS)
        q_c[i] = np.quantile(b, PROBS)
    inv = np.array([[1.0, 1.0 / T, 1.0 / T**2] for T in SIZES])
    for name, q in (("none", q_nc), ("intercept", q_c)):
        coef, *_ = np.linalg.lstsq(inv, q, rcond=None)
        print(f"// {name}")
        for j, p in enumerate(PROBS):
            c0, c1, c2 = coef[:, j]
            print(f"    {{{p}, {c0:.5f}, {c1:.4f}, {c2:.3f}, 0.0}},")


if __name__ == "__main__":
    main()
