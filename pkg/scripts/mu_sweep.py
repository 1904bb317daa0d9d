"""Restriction-ratio slopes in mu for several (s, p), rescaled family and fixed input side by side."""
from fractions import Fraction

from _common import parser, write_csv

from freenil import normharness as nh
from freenil.centralft import AnalyticFn
from freenil.quadrature import QuadratureSpec

PAIRS = [(Fraction(6, 5), Fraction(2)), (Fraction(1), Fraction(1)), (Fraction(6, 5), Fraction(6, 5)),
         (Fraction(1), Fraction(2)), (Fraction(4, 3), Fraction(2))]


def main():
    args = parser(__doc__).parse_args()
    f = AnalyticFn.gaussian()
    spec = QuadratureSpec(n_theta=32)
    mus = [0.25, 1.0, 4.0, 16.0]
    rows = []
    print(f"{'s':>5} {'p':>5} {'band':>12} {'slope':>8} {'dilation':>8} {'printed':>8} {'fixed-f':>8} power-law")
    for s, p in PAIRS:
        mp = nh.MixedNormParams(s, p)
        fit = nh.mu_exponent_fit(f, mp, mus, spec)
        fixed = nh.mu_exponent_fit(f, mp, mus, spec, rescale=False)
        print(f"{str(s):>5} {str(p):>5} {mp.band:>12} {fit.slope:8.4f} {fit.dilation_exponent:8.4f} "
              f"{fit.printed_exponent:8.4f} {fixed.slope:8.4f} {fixed.power_law}")
        for mu, r, r0 in zip(mus, fit.ratios, fixed.ratios):
            rows.append([str(s), str(p), mu, repr(r), repr(r0)])
    print(write_csv(args.out, "mu_sweep.csv", ["s", "p", "mu", "ratio_rescaled", "ratio_fixed"], rows))


if __name__ == "__main__":
    main()
