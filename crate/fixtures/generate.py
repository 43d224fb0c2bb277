"""Regenerates the synthetic fixtures. Output is deterministic."""

import random
from pathlib import Path

import numpy as np

HERE = Path(__file__).parent


def fit_sum(rng, count, lo, hi, total):
    """`count` integers in [lo, hi] summing to `total`."""
    vals = [rng.randint(lo, hi) for _ in range(count)]
    while sum(vals) != total:
        k = rng.randrange(count)
        if sum(vals) < total and vals[k] < hi:
            vals[k] += 1
        elif sum(vals) > total and vals[k] > lo:
            vals[k] -= 1
    return vals


def messages():
    rng = random.Random(1980)
    n = 32
    low = fit_sum(rng, 202, 1, 10, 1083) + fit_sum(rng, 40, 11, 20, 620)
    high = fit_sum(rng, 185, 21, 100, 12860) + fit_sum(rng, 33, 101, 400, 3861)
    values = low + high + [0] * 532
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    assert len(pairs) == len(values) == 992
    rng.shuffle(values)
    lines = [f"# nodes: {n}", "# synthetic message counts, 0-based ids"]
    lines += [f"{i}\t{j}\t{w}" for (i, j), w in zip(pairs, values) if w > 0]
    (HERE / "messages_synthetic.tsv").write_text("\n".join(lines) + "\n")


def rankings():
    rng = random.Random(1961)
    n = 17
    out = HERE / "newcomb"
    out.mkdir(exist_ok=True)
    base = [rng.sample(range(1, n), n - 1) for _ in range(n)]
    for week in range(1, 16):
        rows = []
        for i in range(n):
            prefs = base[i][:]
            for _ in range(week):
                a, b = rng.randrange(n - 1), rng.randrange(n - 1)
                prefs[a], prefs[b] = prefs[b], prefs[a]
            it = iter(prefs)
            rows.append(" ".join("-" if j == i else str(next(it)) for j in range(n)))
        (out / f"week{week:02d}.txt").write_text("\n".join(rows) + "\n")


def correlations():
    rng = np.random.default_rng(2006)
    n, t, modules = 90, 400, 6
    module = np.repeat(np.arange(modules), n // modules)
    shared = rng.standard_normal((modules, t))
    glob = rng.standard_normal(t)
    load = rng.uniform(0.5, 0.9, n)
    x = load[:, None] * shared[module] + 0.53 * glob + rng.standard_normal((n, t))
    r = np.corrcoef(x)
    r = np.round(r, 6)
    r = (r + r.T) / 2
    np.fill_diagonal(r, 1.0)
    lines = [" ".join(f"{v:.6f}" for v in row) for row in r]
    (HERE / "correlation_synthetic.txt").write_text("\n".join(lines) + "\n")
    iu = np.triu_indices(n, 1)
    for tau in (0.22, 0.24, 0.26):
        print(f"tau {tau}: {np.sum(r[iu] >= tau) / n:.2f} edges per node")


if __name__ == "__main__":
    messages()
    rankings()
    correlations()
