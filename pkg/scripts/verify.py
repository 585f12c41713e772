"""Run every consistency check and print a status line per check."""
import sys

from _common import run_config

if __name__ == "__main__":
    table = run_config("verify", "verify.cfg", "results/verify.csv")
    for r in table.where():
        print(f"{r['status']:>21}  {r['check']}: {r['measured']!r} (tol {r['tolerance']!r})")
    sys.exit(3 if "fail" in table.column("status") else 0)
