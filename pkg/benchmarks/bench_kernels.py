"""Time the compiled and numpy kernel backends on training-sized inputs.

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --p 100 --epoch-rows 5000
"""

import argparse
import time
import timeit

import numpy as np

from rffnet import kernels
from rffnet.optimizer import MomentState, TrainConfig, TrainState, auto_num_features, epoch_step
from rffnet.spectral import sample_features


def best_of(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def kernel_cases(batch, pred_rows, s, p, seed=0):
    rng = np.random.default_rng(seed)
    ff = sample_features(p, s, seed)
    XL = rng.standard_normal((batch, p))
    XP = rng.standard_normal((pred_rows, p))
    beta = rng.standard_normal(s)
    r = rng.standard_normal(batch)
    _, S = kernels.cos_sin_features(XL, ff.omega, ff.phases)
    return {
        f"cos_features        {batch}x{s}": lambda impl: kernels.cos_features(XL, ff.omega, ff.phases, impl),
        f"cos_sin_features    {batch}x{s}": lambda impl: kernels.cos_sin_features(XL, ff.omega, ff.phases, impl),
        f"lambda_grad         {batch}x{s}": lambda impl: kernels.lambda_grad(XL, r, S, beta, ff.omega, impl),
        f"predict_scores      {pred_rows}x{s}": lambda impl: kernels.predict_scores(XP, ff.omega, ff.phases, beta, impl),
    }


def time_epoch(impl, n, p, s, batch):
    rng = np.random.default_rng(1)
    X, y = rng.standard_normal((n, p)), rng.standard_normal(n)
    ff = sample_features(p, s, 1)
    state = TrainState(np.zeros(s), np.full(p, 1 / np.sqrt(p)), MomentState.zeros(s, p))
    saved = kernels._impl
    kernels._impl = impl
    try:
        t0 = time.perf_counter()
        epoch_step(state, X, y, ff, TrainConfig(batch_size=batch), "squared")
        return time.perf_counter() - t0
    finally:
        kernels._impl = saved


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=18)
    ap.add_argument("--n", type=int, default=50_000, help="training size that sets the feature count")
    ap.add_argument("--batch", type=int, default=32)
    ap.add_argument("--pred-rows", type=int, default=2048)
    ap.add_argument("--epoch-rows", type=int, default=10_000, help="rows in the timed training epoch")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    s = auto_num_features(args.n)
    backends = kernels.available_backends()
    names = sorted(backends)
    print(f"p={args.p} s={s} backends={names} default={kernels.BACKEND}")
    print(f"{'kernel':34s}" + "".join(f"{n:>14s}" for n in names) + ("      speedup" if len(names) > 1 else ""))

    for label, fn in kernel_cases(args.batch, args.pred_rows, s, args.p).items():
        number = 2 if label.startswith("predict") else 200
        times = {n: best_of(lambda: fn(backends[n]), args.repeat, number) for n in names}
        row = f"{label:34s}" + "".join(f"{times[n] * 1e6:12.1f}us" for n in names)
        if len(names) > 1:
            row += f"{times['python'] / times['compiled']:12.2f}x"
        print(row)

    epoch = {n: time_epoch(backends[n], args.epoch_rows, args.p, s, args.batch) for n in names}
    row = f"{f'epoch of {args.epoch_rows} rows':34s}" + "".join(f"{epoch[n]:13.3f}s" for n in names)
    if len(names) > 1:
        row += f"{epoch['python'] / epoch['compiled']:12.2f}x"
    print(row)


if __name__ == "__main__":
    main()
