"""Fourier coefficients of the position operator in the Floquet basis versus A.

First- and second-order analytic forms against the converged numeric doublet
at eps = 4, omega = 2 (two-photon resonance).
"""

import warnings

import numpy as np

from drivetls import SystemParams
from drivetls.bath_dissipation import numeric_position_table, position_table
from drivetls.errors import TruncationWarning
from drivetls.vanvleck import ResonanceContext

from _common import parser, save

HARMONICS = (0, 2, -2, 4)


def main():
    ap = parser(__doc__)
    ap.add_argument("--amp-max", type=float, default=12.0)
    ap.add_argument("--points", type=int, default=121)
    args = ap.parse_args()
    amps = np.linspace(0.0, args.amp_max, args.points)
    header, cols = ["A"], [amps]
    data = {}
    for amp in amps:
        p = SystemParams(1.0, 4.0, float(amp), 2.0)
        ctx = ResonanceContext(2, p)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            num, _ = numeric_position_table(p, 2)
        tables = {"vv1": position_table(ctx, "vv1", num.n_max), "vv2": position_table(ctx, "vv2", num.n_max), "numeric": num}
        for name, tab in tables.items():
            for ab, (a, b) in (("mm", (0, 0)), ("mp", (0, 1))):
                for n in HARMONICS:
                    data.setdefault(f"X{ab}_{n}_{name}", []).append(float(np.real(tab(a, b, n))))
    for key, values in data.items():
        header.append(key)
        cols.append(np.array(values))
    save(args.out_dir, "position_coefficients.csv", header, cols)
    for ab in ("mm", "mp"):
        for n in HARMONICS:
            v2, vn = np.abs(data[f"X{ab}_{n}_vv2"]), np.abs(data[f"X{ab}_{n}_numeric"])
            print(f"X_{ab} n={n:+d}: max | |vv2| - |numeric| | = {np.max(np.abs(v2 - vn)):.4f}")


if __name__ == "__main__":
    main()
