"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from clusterbell import _pykernels, qstate
from clusterbell.nonlocality import SC_TERMS, _StrategySpace

try:
    from clusterbell import _ckernels
except ImportError:
    _ckernels = None


def chsh_like(parties):
    # two settings per party, one term per party pattern; 2 * parties strategy bits
    bits, signs, blocks = [], [], []
    for k, pattern in enumerate(np.ndindex(*(2,) * parties)):
        bits.append([2 * p + a for p, a in enumerate(pattern)])
        signs.append(1 if sum(pattern) % 2 == 0 else -1)
        blocks.append(k % 2)
    return np.array(bits, dtype=np.int64), np.array(signs), np.array(blocks), 2, 2 * parties


def cases():
    rng = np.random.default_rng(1)
    s5 = qstate.linear_cluster(5).vector
    s6 = qstate.linear_cluster(6).vector
    r6 = qstate.random_state(6, rng)
    rho6 = qstate.apply_white_noise(r6, 0.7).density_matrix()
    strings = [t.pauli for t in SC_TERMS]
    space = _StrategySpace(strings)
    sc = (
        space.bit_table(strings),
        np.array([t.sign for t in SC_TERMS]),
        np.array([t.block - 1 for t in SC_TERMS]),
        2,
        space.nbits,
    )
    return {
        "stabilizer_scan n=5": ("stabilizer_scan", (s5, 5, 1e-9)),
        "stabilizer_scan n=6": ("stabilizer_scan", (s6, 6, 1e-9)),
        "lhv_scan S_C (7 bits)": ("lhv_scan", sc),
        "lhv_scan 8 parties (16 bits)": ("lhv_scan", chsh_like(8)),
        "apply_pauli n=6": ("apply_pauli", (r6.vector, 0b101101, 0b110011, 1j)),
        "expectation_pure n=6": ("expectation_pure", (r6.vector, 0b101101, 0b110011, 1j)),
        "expectation_mixed n=6": ("expectation_mixed", (rho6, 0b101101, 0b110011, 1j)),
    }


def best_time(fn, args, repeat):
    number = 1
    while timeit.timeit(lambda: fn(*args), number=number) < 0.05:
        number *= 4
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = [_pykernels] + ([_ckernels] if _ckernels else [])
    if _ckernels is None:
        print("compiled backend not built; timing the fallback only")
    header = f"{'kernel':32s}" + "".join(f"{b.BACKEND:>14s}" for b in backends)
    print(header + ("    speedup" if _ckernels else ""))
    for name, (fn, fargs) in cases().items():
        times = [best_time(getattr(b, fn), fargs, args.repeat) for b in backends]
        row = f"{name:32s}" + "".join(f"{t * 1e3:11.3f} ms" for t in times)
        if _ckernels:
            row += f"  {times[0] / times[1]:8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
