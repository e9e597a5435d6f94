"""Dissipative survival probability at the two-photon resonance and its spectrum.

eps = 4.1, A = 3, omega = 2 with kappa = 0.01, beta = 10.  Writes the trajectories
of the rwa, vv2 and numeric tiers and prints the classified spectral lines.
"""

from drivetls import SystemParams
from drivetls.bath_dissipation import BathParams
from drivetls.dynamics_analysis import fourier_spectrum, survival_trajectory, time_grid

from _common import parser, save


def main():
    ap = parser(__doc__)
    ap.add_argument("--t-max", type=float, default=1000.0)
    ap.add_argument("--kappa", type=float, default=0.01)
    args = ap.parse_args()
    p = SystemParams(1.0, 4.1, 3.0, 2.0)
    b = BathParams(args.kappa, 10.0)
    t = time_grid(p, args.t_max, 64)
    trajs = {tier: survival_trajectory(p, 2, tier, t, b) for tier in ("rwa", "vv2", "numeric")}
    save(args.out_dir, "dissipative_survival.csv", ["t"] + [f"P_{k}" for k in trajs], [t, *[tr.values for tr in trajs.values()]])
    for tier, tr in trajs.items():
        spec = fourier_spectrum(tr, "hann", subtract_asymptote=True)
        print(f"{tier}: Omega = {tr.meta['rabi']:.4f}, {len(spec.unclassified(0.01))} unclassified lines")
        for pk in spec.significant(0.01):
            tag = "delta" if pk.is_delta else f"width {pk.width:.4f}"
            print(f"   nu = {pk.nu:7.4f}  {pk.kind:10s} height {pk.height:9.3f}  {tag}")


if __name__ == "__main__":
    main()
