"""Time the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--papers 500000] [--refs 25] [--repeat 3]

Both backends are run on the same random citation graph and author lists;
the script also checks that they agree bit-for-bit.
"""
import argparse
import time

import numpy as np

from collabmetrics import _kernels


def make_graph(n_papers, mean_refs, n_authors, rng):
    ref_len = rng.poisson(mean_refs, n_papers)
    ref_offsets = np.zeros(n_papers + 1, dtype=np.int64)
    np.cumsum(ref_len, out=ref_offsets[1:])
    # ~10% of references point outside the corpus
    targets = rng.integers(0, n_papers, ref_offsets[-1])
    targets[rng.random(targets.shape[0]) < 0.1] = -1

    n_aut = np.minimum(rng.zipf(1.8, n_papers), 3000).astype(np.int64)
    listing_paper = np.repeat(np.arange(n_papers), n_aut)
    author = rng.integers(0, n_authors, listing_paper.shape[0])
    order = np.argsort(author, kind="stable")
    group_offsets = np.zeros(n_authors + 1, dtype=np.int64)
    np.cumsum(np.bincount(author, minlength=n_authors), out=group_offsets[1:])
    return ref_offsets, targets, n_aut, group_offsets, listing_paper[order]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--papers", type=int, default=500_000)
    parser.add_argument("--refs", type=float, default=25.0)
    parser.add_argument("--authors", type=int, default=70_000)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    ref_offsets, targets, n_aut, group_offsets, members = make_graph(
        args.papers, args.refs, args.authors, rng)
    print(f"{args.papers} papers, {targets.shape[0]} references, "
          f"{members.shape[0]} author listings")

    results = {}
    for name, (cit_fn, group_fn) in _kernels.BACKENDS.items():
        cit_fn(ref_offsets[:3], targets[:ref_offsets[2]], args.papers)  # JIT warm-up
        t_cit, (n_cit, n_icit) = best_of(
            lambda: cit_fn(ref_offsets, targets, args.papers), args.repeat)
        n_aut_f = n_aut.astype(np.float64)
        weight = 1.0 / n_aut_f
        group_fn(group_offsets[:2], members, n_aut_f, n_cit, n_icit, weight)
        t_grp, prof = best_of(
            lambda: group_fn(group_offsets, members, n_aut_f, n_cit, n_icit, weight),
            args.repeat)
        results[name] = (n_cit, n_icit, prof)
        print(f"{name:6s} citation_counts {t_cit * 1e3:9.1f} ms   "
              f"group_profiles {t_grp * 1e3:9.1f} ms")

    if len(results) == 2:
        a, b = results["numba"], results["numpy"]
        same = (np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
                and all(np.array_equal(x, y) for x, y in zip(a[2], b[2])))
        print("backends agree bit-for-bit:", same)


if __name__ == "__main__":
    main()
