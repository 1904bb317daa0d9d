"""Reconstruction error from spectral densities as the mu rule is refined."""
import numpy as np
from _common import parser, write_csv

from freenil import projector as pj
from freenil.corpus import gaussian_tensor_corpus


def main():
    ap = parser(__doc__)
    ap.add_argument("--points", type=int, default=8)
    args = ap.parse_args()
    pts = pj.default_points(args.points)
    rows = []
    for i, f in enumerate(gaussian_tensor_corpus()):
        exact = np.array([f.at(p) for p in pts])
        for n_mu in (12, 24, 48):
            rec = pj.reconstruct(f, pj.default_spec(f, n_mu), pts)
            err = np.linalg.norm(rec - exact) / np.linalg.norm(exact)
            print(f"function {i} n_mu={n_mu:3d} relative error {err:.3e}")
            rows.append([i, n_mu, repr(err)])
    print(write_csv(args.out, "reconstruction.csv", ["function", "n_mu", "rel_error"], rows))


if __name__ == "__main__":
    main()
