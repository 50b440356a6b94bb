#!/usr/bin/env python3
"""Standalone pilot for the lambda-tracking threshold.

Simulates the self-adjusting (1+(lambda,lambda)) GA on OneMax with numpy,
without using the Rust implementation, and reports for several multipliers
k the fraction of iterations whose rounded offspring count is at most
k * ceil(sqrt(n / (n - f(x)))).

Usage: python3 scripts/pilot_lambda_tracking.py [--n 1000] [--runs 30] [--seed 2024]
"""

import argparse
import math

import numpy as np


def fitness_dependent_lambda(n, fitness):
    d = n - fitness
    k = max(1, math.isqrt(n // d))
    while k * k * d < n:
        k += 1
    while k > 1 and (k - 1) * (k - 1) * d >= n:
        k -= 1
    return k


def round_half_up(x):
    f = math.floor(x)
    return f if x - f < 0.5 else f + 1


def run(n, update_strength, ratio, rng):
    """Returns (evaluations, [(lambda_int, fitness_before) per iteration])."""
    x = rng.integers(0, 2, n, dtype=np.int8)  # target is all ones
    fx = int(x.sum())
    lam = 1.0
    grow = update_strength ** (1.0 / (ratio - 1.0))
    log = []
    evals = 1
    while fx < n:
        k = min(round_half_up(lam), n)
        log.append((k, fx))
        ell = rng.binomial(n, lam / n)
        best_val, best = -1, None
        for _ in range(k):
            y = x.copy()
            idx = rng.choice(n, ell, replace=False)
            y[idx] ^= 1
            v = int(y.sum())
            evals += 1
            if v == n:
                return evals, log
            if v > best_val:
                best_val, best = v, y
        top, cand = -1, None
        diff = np.nonzero(best != x)[0]
        for _ in range(k):
            take = diff[rng.random(diff.size) < 1.0 / lam]
            evals += 1
            if take.size == 0:
                v, y = fx, None  # a copy of x counts for the maximum but is never chosen
            else:
                y = x.copy()
                y[take] = best[take]
                v = int(y.sum())
                if v == n:
                    return evals, log
            if v > top:
                top, cand = v, y
            elif v == top and cand is None:
                cand = y
        if cand is not None and top >= fx:
            success = top > fx
            x, fx = cand, top
        else:
            success = False
        lam = max(lam / update_strength, 1.0) if success else min(lam * grow, n)
    return evals, log


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--runs", type=int, default=30)
    ap.add_argument("--F", type=float, default=1.5)
    ap.add_argument("--r", type=float, default=5.0)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    rows = []
    total = 0
    for _ in range(args.runs):
        evals, log = run(args.n, args.F, args.r, rng)
        total += evals
        rows.extend(log)
    print(f"runs: {args.runs}, mean evaluations: {total / args.runs:.1f}, iterations: {len(rows)}")
    for mult in (1, 2, 4, 8, 16):
        ok = sum(k <= mult * fitness_dependent_lambda(args.n, f) for k, f in rows)
        print(f"k={mult:2d}: {ok / len(rows):.4f}")


if __name__ == "__main__":
    main()
