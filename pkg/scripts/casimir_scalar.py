"""Compare the action of C^2 on L(n, +-) with two candidate scalars.

Prints, for each n, whether C^2 acts by ((pi q)^(n+1) + q^(-n-1))^2/(pi q - q^-1)^4
and whether it acts by [n+1]^2/(pi q - q^-1)^2.
"""

import argparse
from dataclasses import dataclass

from qcover.pi_ring import PiRational, format_coefficient, simplify
from qcover.rep import casimir_scalar, casimir_scalar_literal, casimir_square, simple_module


@dataclass
class Config:
    max_n: int = 8


def acts_by(M, C2, lam) -> bool:
    lam = simplify(PiRational.coerce(lam))
    return all(not (M.act(C2, M.basis_vector(h)) - M.basis_vector(h).scale(lam)).simplified().coeffs for h in M.basis)


def main(cfg: Config) -> None:
    C2 = casimir_square()
    print(f"{'module':<10} {'true':>5} {'bracket^2':>10}  true scalar")
    for n in range(cfg.max_n + 1):
        for sg in (1, -1):
            M = simple_module(n, sg)
            ok_true = acts_by(M, C2, casimir_scalar(n))
            ok_lit = acts_by(M, C2, casimir_scalar_literal(n))
            name = f"L({n},{'+' if sg > 0 else '-'})"
            print(f"{name:<10} {str(ok_true):>5} {str(ok_lit):>10}  {format_coefficient(casimir_scalar(n))}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=Config.max_n)
    main(Config(max_n=ap.parse_args().max_n))
