"""Sweeping the admission price: equilibrium response and operator revenue.

As c rises, the FIFO band narrows and shifts; past a point no two-threshold
equilibrium exists, and for very large c everyone bids (the degenerate
all-auction outcome). The sweep marks per-price outcomes and flags the
revenue-maximizing entry.
"""

import numpy as np

from hbfq import example_scenario, sweep_admission_price

scn = example_scenario()
cs = np.linspace(0.0, 2.0, 21)
res = sweep_admission_price(scn, cs, scan=140)

print("    c    status    beta1    beta2   lambda2   rev_fifo  rev_hbf  rev_total")
for i, e in enumerate(res.entries):
    mark = " <- max total" if i == res.argmax_total else (
        " <- max fifo" if i == res.argmax_fifo else "")
    if e.status == "root":
        print(f"{e.c:6.2f}  {e.status:8} {e.beta1:7.3f}  {e.beta2:7.3f}  {e.lambda2:7.3f}  "
              f"{e.revenue_fifo:8.4f} {e.revenue_hbf:8.4f}  {e.revenue_total:8.4f}{mark}")
    else:
        print(f"{e.c:6.2f}  {e.status:8} {'-':>7}  {'-':>7}  {'-':>7}  "
              f"{e.revenue_fifo:8.4f} {e.revenue_hbf:8.4f}  {e.revenue_total:8.4f}{mark}"
              if np.isfinite(e.revenue_total) else
              f"{e.c:6.2f}  {e.status:8} {'-':>7}  {'-':>7}  {'-':>7}  {'':8} {'':8}  (no equilibrium)")

best = res.entries[res.argmax_total]
print(f"\nrevenue-maximizing admission price on this grid: c = {best.c:.3f} "
      f"(total rate {best.revenue_total:.4f})")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ok = [e for e in res.entries if e.status == "root"]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot([e.c for e in ok], [e.revenue_total for e in ok], "o-", label="total")
    ax.plot([e.c for e in ok], [e.revenue_fifo for e in ok], "s--", label="fifo")
    ax.set_xlabel("admission price c")
    ax.set_ylabel("revenue rate")
    ax.legend()
    fig.tight_layout()
    fig.savefig("demo_sweep.png", dpi=120)
    print("wrote demo_sweep.png")
except ImportError:
    pass
