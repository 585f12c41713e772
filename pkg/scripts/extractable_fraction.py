"""Time-averaged fraction of block work that is extractable, against m/N."""
from _common import run_config

if __name__ == "__main__":
    table = run_config("fraction", "fraction.cfg", "results/fraction.csv")
    for axis in ("X", "Y", "Z"):
        rows = table.where(axis=axis, N=8)
        print(axis, " ".join(f"{r['R_bar']:.3f}" for r in rows))
