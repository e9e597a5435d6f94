"""Folded quasienergies versus static bias: numeric doublet against the vv2 formulas.

Default sweep: omega = 2, A = 3, eps in [0, 8] on 400 points.
"""

import numpy as np

from drivetls import SystemParams
from drivetls.dynamics_analysis import photon_number
from drivetls.floquet_engine import fold_quasienergy, solve_doublet
from drivetls.special_functions import bessel_j
from drivetls.vanvleck import ResonanceContext, resonance_bias, solve_vanvleck

from _common import parser, save


def main():
    ap = parser(__doc__)
    ap.add_argument("--omega", type=float, default=2.0)
    ap.add_argument("--amp", type=float, default=3.0)
    ap.add_argument("--points", type=int, default=400)
    args = ap.parse_args()

    base = SystemParams(1.0, 0.0, args.amp, args.omega)
    eps_grid = np.linspace(0.0, 8.0, args.points)
    rows = []
    for eps in eps_grid:
        p = base.replace(epsilon=float(eps))
        m = photon_number(eps, args.omega)
        d = solve_doublet(p, m)
        em, ep = solve_vanvleck(ResonanceContext(m, p)).quasienergies(m, args.omega, "vv2")
        rows.append([eps, m, *(fold_quasienergy(x, args.omega) for x in (d.e_minus, d.e_plus, em, ep))])
    rows = np.array(rows)
    dev = np.maximum(
        np.abs(fold_quasienergy(rows[:, 2] - rows[:, 4], args.omega)),
        np.abs(fold_quasienergy(rows[:, 3] - rows[:, 5], args.omega)),
    )
    save(args.out_dir, "quasienergies.csv", ["eps", "m", "num_minus", "num_plus", "vv2_minus", "vv2_plus", "deviation"], [*rows.T, dev])

    print("m   resonance bias   numeric gap   |Delta_m|")
    for m in range(1, 5):
        eps = resonance_bias(m, base)
        gap = solve_doublet(base.replace(epsilon=eps), m).omega_numeric
        print(f"{m}   {eps:14.6f}   {gap:11.6f}   {abs(bessel_j(m, args.amp / args.omega)):9.6f}")
    print(f"largest vv2 deviation {dev.max():.4f} at eps = {eps_grid[np.argmax(dev)]:.3f}")


if __name__ == "__main__":
    main()
