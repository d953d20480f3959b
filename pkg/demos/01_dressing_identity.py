"""How good is the displaced-frame diagonalization at finite truncation?

The dressing transformation maps the full ion-cavity Hamiltonian onto a form
with no recoil phases; in infinite dimension the identity is exact for every
Lamb-Dicke parameter.  In a truncated Fock space the identity survives only
on the interior block, and only while the guard band is wide enough to absorb
the displacement spread (roughly sqrt(n_interior) * eta levels).  This script
sweeps eta and a few guard widths and prints the measured residuals, so you
can see both the exactness at small eta and the breakdown at large eta.
"""

from ioncat import (
    SystemParams,
    TruncationScheme,
    build_h_full,
    build_h_transformed,
    build_t,
    interior_block,
    max_abs,
)


def residual(p, trunc):
    h = build_h_full(p, trunc)
    t = build_t(p, trunc)
    ht = build_h_transformed(p, trunc)
    gap = t.mat @ h.mat @ t.mat.conj().T - ht.mat
    return max_abs(interior_block(gap, trunc)), max_abs(h.mat)


def main():
    n_vib, n_cav = 25, 8
    print(f"dims ({n_vib}, {n_cav}); residual = max interior |T H Tdag - H_T|")
    print(f"{'eta':>5} {'g':>7} {'guard':>6} {'residual':>12} {'rel':>12} {'ok @1e-6':>9}")
    for eta in (0.1, 0.5, 1.0, 1.5):
        for g in (0.0, 0.01):
            for guard in (5, 7):
                p = SystemParams(eta=eta, g=g)
                trunc = TruncationScheme(n_vib, n_cav, guard)
                res, h_max = residual(p, trunc)
                rel = res / h_max
                print(
                    f"{eta:5.2f} {g:7.3f} {guard:6d} {res:12.3e} {rel:12.3e}"
                    f" {'yes' if rel <= 1e-6 else 'NO':>9}"
                )
    print()
    print("The residual is independent of g: the recoil-phase coupling is")
    print("dressed exactly even in truncation.  What breaks at large eta is")
    print("the number-operator dressing, whose displacement reaches past the")
    print("truncation edge from the top interior levels.")


if __name__ == "__main__":
    main()
