"""Normalized level-projection ratios against k for several lambda and p."""
from _common import parser, write_csv

from freenil import twisted as tw


def main():
    args = parser(__doc__).parse_args()
    ps = [1.0, 1.1, 1.2, 1.5, 2.0]
    ks = list(range(9))
    rows = []
    for lam in (0.5, 1.0, 2.0):
        ratios = tw.kr_sweep(lam, ps, ks, tw.kr_family(lam))
        for p in ps:
            slope, resid = tw.loglog_slope([2 * k + 1 for k in ks], ratios[p])
            print(f"lam={lam:<4} p={p:<4} slope={slope:+.4f} residual={resid:.3f}")
            rows += [[lam, p, k, repr(r)] for k, r in zip(ks, ratios[p])]
    print(write_csv(args.out, "kr_sweep.csv", ["lam", "p", "k", "ratio"], rows))


if __name__ == "__main__":
    main()
