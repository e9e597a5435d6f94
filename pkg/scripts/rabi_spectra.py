"""Coherent survival probability and its Fourier lines at and between resonances.

Compares rwa, vv2 and numeric tiers at (eps, A) = (4, 4.1) for omega = 4
(one-photon resonance) and omega = 2.7 (between resonances).
"""

import numpy as np

from drivetls import SystemParams
from drivetls.dynamics_analysis import fourier_spectrum, photon_number, survival_trajectory, time_grid

from _common import parser, save


def main():
    ap = parser(__doc__)
    ap.add_argument("--t-max", type=float, default=300.0)
    args = ap.parse_args()
    for om in (4.0, 2.7):
        p = SystemParams(1.0, 4.0, 4.1, om)
        m = photon_number(p.epsilon, om)
        t = time_grid(p, args.t_max, 64)
        trajs = {tier: survival_trajectory(p, m, tier, t) for tier in ("rwa", "vv2", "numeric")}
        save(args.out_dir, f"survival_omega{om:g}.csv", ["t"] + [f"P_{k}" for k in trajs], [t, *[tr.values for tr in trajs.values()]])
        print(f"omega = {om}: m = {m}")
        for tier, tr in trajs.items():
            spec = fourier_spectrum(tr, "hann", subtract_asymptote=False)
            lines = spec.significant(0.05, exclude=("relaxation",))
            desc = ", ".join(f"{pk.nu:.3f} ({pk.kind})" for pk in lines)
            print(f"  {tier:8s} Omega = {tr.meta['rabi']:.4f}; lines above 5%: {desc}")


if __name__ == "__main__":
    main()
