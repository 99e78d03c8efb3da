"""Dump canonical-basis structure constants on a box as JSON lines.

Each line holds the two factors, the product index and the coefficient, and
whether the coefficient lies in N[q, q^-1, pi].
"""

import argparse
import json
import sys
from dataclasses import dataclass

from qcover.pi_ring import cone_membership, format_coefficient
from qcover.udot import PositivityError
from qcover.verify import positivity_box


@dataclass
class Config:
    B: int = 2
    K: int = 4


def main(cfg: Config, out=sys.stdout) -> int:
    from qcover.udot import cb_element, cb_expand, multiply

    bad = 0
    for i1, i2 in positivity_box(cfg.B, cfg.K):
        prod = multiply(cb_element(*i1), cb_element(*i2))
        for idx, c in sorted(cb_expand(prod).items()):
            pos = cone_membership(c, "positive")
            bad += not pos
            rec = {"i1": list(i1), "i2": list(i2), "cb": list(idx), "coeff": format_coefficient(c), "positive": pos}
            out.write(json.dumps(rec) + "\n")
    if bad:
        raise PositivityError(f"{bad} coefficients outside the positive cone")
    return 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--box-b", type=int, default=Config.B)
    ap.add_argument("--box-k", type=int, default=Config.K)
    a = ap.parse_args()
    sys.exit(main(Config(B=a.box_b, K=a.box_k)))
