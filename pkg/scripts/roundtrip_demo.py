#!/usr/bin/env python3
"""Walk one chain complex through the equivalence and print the bookkeeping.

A seeded chain complex on the zero-completion of the endpoint-preserving
ordinal category is transported to an ordinary functor (augmented
simplicial-style dimensions), then back through the kernel intersections
(the normalized complex), recovering the original dimensions exactly.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dkequiv.builders import build_delta_bt
from dkequiv.equivalence import build_kernel_module, hat, unit_with
from dkequiv.functors import random_pointed_functor


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=5)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--dims", default="2,3,2,1,1",
                    help="comma-separated dimensions, one per ordinal")
    args = ap.parse_args()
    dims = tuple(int(x) for x in args.dims.split(","))
    s = build_delta_bt(args.size)
    assert len(dims) == s.cat.n_objects, "need one dimension per ordinal"
    km = build_kernel_module(s)
    f = random_pointed_functor(km.d, dims, seed=args.seed)
    print("chain complex dims:     ", list(f.dims))
    ranks = []
    for dr in km.d.nonzero_morphisms():
        r = km.d.d_to_r[dr]
        if s.cat.dom[r] == s.cat.cod[r] + 1:
            ranks.append((s.cat.dom[r] + 1, f.mat(dr).rank()))
    print("boundary ranks by level:", sorted(ranks))
    t = hat(km, f)
    print("transported dims:       ", list(t.dims))
    eta, ft = unit_with(km, f, t)
    print("normalized complex dims:", list(ft.dims))
    print("unit is a natural iso:  ", eta.validate().ok and eta.is_iso())
    assert ft.dims == f.dims
    return 0


if __name__ == "__main__":
    sys.exit(main())
