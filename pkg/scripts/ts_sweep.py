"""Gaussian-family sphere restriction ratios against the radius r."""
import numpy as np
from _common import parser, write_csv

from freenil import normharness as nh


def main():
    args = parser(__doc__).parse_args()
    rs = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0]
    rows = []
    for s in (1.0, 1.1, 1.2, 4 / 3):
        vals = [nh.tomas_stein_family_max(r, s) for r in rs]
        C = vals[rs.index(1.0)]
        print(f"s={s:.4f} C(r=1)={C:.6f} max excess={max(v / C - 1 for v in vals):.2e} "
              f"spread={np.ptp(np.log(vals)):.2e}")
        rows += [[s, r, repr(v)] for r, v in zip(rs, vals)]
    print(write_csv(args.out, "ts_sweep.csv", ["s", "r", "ratio"], rows))


if __name__ == "__main__":
    main()
