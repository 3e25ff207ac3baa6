"""Walk through the bound ladder on a disordered transverse-field Ising chain.

An 8-spin chain evolves under slightly wrong field strengths. We compare the
exact simulation error against the certified upper bounds for two initial
states: a computational basis state (which entangles quickly and behaves like
a typical state) and the all-plus product state (which keeps the perturbation
terms coherent for much longer). The takeaway is that the typical state's
pathwise bound collapses onto the cheap Frobenius baseline after a short
crossover time, while the atypical state has to be tracked along the whole
trajectory.

Runs in a few seconds; no files are written.
"""

import numpy as np

from resilience_lab.bounds import TimeGrid, bound_ladder
from resilience_lab.dynamics import basis_state, plus_state
from resilience_lab.perturbation import build_qimf_1d, sample, standard_qimf_noise

N = 8
SIGMA = 0.1
ETA = 0.01
T_FINAL = 4.0


def main():
    h0 = build_qimf_1d(N)
    real = sample(standard_qimf_noise(N, SIGMA, ETA), seed=7)
    grid = TimeGrid.regular(T_FINAL, 21)
    print(f"{N}-site chain, field disorder sigma={SIGMA}, coupling defect eta={ETA}")
    print(f"sampled field offsets: {np.round(real.deltas, 4)}")
    for label, psi in (("typical |0...0>", basis_state(N)),
                       ("atypical |+...+>", plus_state(N))):
        report = bound_ladder(h0, real.h_pert, psi, grid)
        c = report.columns
        print(f"\n--- {label} (crossover estimate t = {report.crossover:g}) ---")
        print(f"{'t':>5} {'exact':>9} {'integral':>9} {'split':>9} "
              f"{'entangle':>9} {'frobenius':>9} {'spectral':>9}")
        for i in range(0, grid.points.size, 4):
            print(f"{grid.points[i]:5.1f}"
                  f" {c['exact_error'][i]:9.4f}"
                  f" {c['integral_bound'][i]:9.4f}"
                  f" {c['split_bound'][i]:9.4f}"
                  f" {c['entanglement_bound'][i]:9.4f}"
                  f" {c['frobenius_bound'][i]:9.4f}"
                  f" {c['spectral_bound'][i]:9.4f}")
    print("\nEvery column to the right is a certified upper bound for 'exact';")
    print("'split' switches from trajectory tracking to the Frobenius rate at")
    print("the crossover, which is why it stays cheap without going loose.")


if __name__ == "__main__":
    main()
