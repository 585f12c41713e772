"""Maximum average power against N (simulation) and against K (closed-form law)."""
import sys

from _common import run_config

if __name__ == "__main__":
    which = "k" if "--k" in sys.argv else "n"
    if "--k" in sys.argv:
        sys.argv.remove("--k")
    name = f"avg_power_{which}"
    table = run_config("avg_power", f"{name}.cfg", f"results/{name}.csv")
    for r in table.where():
        if r["row_type"].startswith("fit"):
            print(f"{r['axis']}: fitted exponent {r['beta']:.4f} (residual {r['residual']:.2e})")
