"""Closed forms versus brute force: the full validation run.

Three evolution routes are compared over one trap period:

  closed form   the textbook-style state with counter-rotating coherent
                branches attached to the ion levels
  reference     dressing -> weak-coupling model -> exact exponential -> undress
  brute force   spectral exponential of the full Hamiltonian, no approximation

The run records where the closed forms track the real dynamics and where
they do not: the reference route reproduces the brute-force evolution
essentially exactly at weak coupling, while the closed-form state departs
from both with an O(eta) gap that the fidelity tracks quantify.  The
closed-form propagator is also not the identity at t = 0 (a deviation track
records the gap rather than asserting it away).
"""

import numpy as np

from ioncat import SystemParams, TruncationScheme, validation_run


def main():
    trunc = TruncationScheme(25, 8, 5)
    times = np.linspace(0.0, 2 * np.pi, 33)
    print("drive/coupling ratio sweep at eta = 0.5 (64 would match the CLI default)")
    header = (f"{'ratio':>6} {'min F(closed,ref)':>18} {'min F(closed,full)':>19} "
              f"{'min F(ref,full)':>16} {'gap(t=0)':>10}")
    print(header)
    for ratio in (10, 100, 1000):
        p = SystemParams(eta=0.5, g=0.5 / ratio)
        rep = validation_run(p, trunc, times)
        print(
            f"{ratio:6d} {np.min(rep.fidelity_regime):18.6f} "
            f"{np.min(rep.fidelity_full):19.6f} "
            f"{np.min(rep.fidelity_reference_vs_full):16.12f} "
            f"{rep.deviation_analytic[0]:10.3e}"
        )
    print()
    print("Reading the table: the reference route *is* the dynamics (last")
    print("fidelity column ~ 1), while the closed-form tracks dip well below")
    print("1 independently of the coupling -- the coherent branches the")
    print("closed forms predict do not develop under the dressed dynamics,")
    print("whose initial state is a superposition of displaced-well ground")
    print("states.  The t = 0 gap column is the same statement at the")
    print("propagator level.")


if __name__ == "__main__":
    main()
