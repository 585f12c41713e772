"""Power against N for the collective charger; fitted exponent per fall rate."""
from _common import run_config

if __name__ == "__main__":
    table = run_config("collective_scaling", "collective.cfg", "results/collective.csv")
    for r in table.where(row_type="fit"):
        print(f"alpha={r['alpha']:g}: beta {r['beta']:.3f}")
