"""Per-site work curves for the X battery under every valid K-regular charger."""
from _common import run_config

if __name__ == "__main__":
    table = run_config("work_sweep", "work_sweep.cfg", "results/work_curves.csv")
    for n in sorted(set(table.column("N"))):
        for k in sorted(set(r["K"] for r in table.where(N=n))):
            peak = max(r["W_per_site"] for r in table.where(N=n, K=k))
            print(f"N={n:2d} K={k:2d} max W/N = {peak:.4f}")
