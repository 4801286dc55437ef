"""Compare the numba and numpy hill-climbing kernels on synthetic documents.

    python3 benchmarks/bench_backends.py --sentences 30 --docs 5

Both backends run on the same pairs with the same seeds; the script checks
that they return identical scores and reports their wall-time ratio. The
second table times constrained against unconstrained scoring.
"""
import argparse
import json

from docamr.bench import compare_backends, compare_modes


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sentences", type=int, default=30)
    ap.add_argument("--docs", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--restarts", type=int, default=4)
    ap.add_argument("--sizes", default="2,10,20,30")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    backends = {}
    for constrained in (False, True):
        backends["constrained" if constrained else "unconstrained"] = compare_backends(
            args.sentences, args.docs, args.seed, args.restarts, constrained)
    rows = compare_modes([int(x) for x in args.sizes.split(",")], args.docs, args.seed, args.restarts)
    if args.json:
        print(json.dumps({"backends": backends, "modes": [r.to_json() for r in rows]}, indent=2))
        return
    print(f"kernels, {args.docs} docs x {args.sentences} sentences")
    print(f"{'pool':>13} {'numba_s':>8} {'numpy_s':>8} {'ratio':>6} identical")
    for name, b in backends.items():
        print(f"{name:>13} {b['numba']['seconds']:>8.3f} {b['numpy']['seconds']:>8.3f} "
              f"{b['speedup']:>6.1f} {b['identical']}")
    print()
    print(f"{'sentences':>9} {'unconstr_s':>10} {'constr_s':>9} {'speedup':>8} violations")
    for r in rows:
        print(f"{r.sentences:>9} {r.unconstrained_s:>10.3f} {r.constrained_s:>9.3f} {r.speedup:>8.1f} {len(r.violations)}")


if __name__ == "__main__":
    main()
