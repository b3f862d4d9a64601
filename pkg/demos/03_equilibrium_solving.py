"""Solving for the equilibrium routing and refuting the single-threshold shapes.

With a positive admission price and no minimum bid, no single-threshold split
survives: below any candidate threshold a customer can bid zero and still beat
the FIFO price, and above it a customer can buy the top position for the
standing top bid. The equilibrium that does exist sends the middle band of
sensitivities to FIFO; the solver pins its two thresholds by
X(beta1) = c (money balance) and D1(beta1) = D2 (delay balance).
"""

from hbfq import (check_lemma1, check_lemma2, example_scenario, format_report,
                  build_report, revenue, solve_single_threshold, solve_two_threshold,
                  verify_wardrop)

scn = example_scenario()

print("=== the two single-threshold candidates are never equilibria here ===")
for b1 in (2.0, 5.0, 8.0):
    w1 = check_lemma1(scn, b1)
    w2 = check_lemma2(scn, b1)
    print(f"candidate {b1:4.1f}:  low-FIFO witness type {w1.beta:6.3f} gains {w1.advantage:.4f}   "
          f"high-FIFO witness type {w2.beta:6.3f} gains {w2.advantage:.4f}")

print("\n=== two-threshold solve (default accounting) ===")
res = solve_two_threshold(scn)
sol = res.solutions[0]
b1, b2 = sol.policy.beta1, sol.policy.beta2
print(f"thresholds: beta1 = {b1:.9f}, beta2 = {b2:.9f}")
print(f"residuals:  X(beta1)-c = {sol.residuals['bid_vs_price']:.2e}   "
      f"indifference = {sol.residuals['indifference']:.2e}")
rep = verify_wardrop(scn, sol.policy)
print(f"independent routing check: max regret {rep.max_regret:.2e} on {rep.beta.size} types")
rf, rh = revenue(sol)
print(f"revenue rates: FIFO {rf:.4f}, auction {rh:.4f}")

print("\n=== minimum-bid regime (c <= m) uses the single-threshold solver ===")
sol1 = solve_single_threshold(scn.replace(m=0.5, c=0.1))
print(f"threshold {sol1.policy.beta1:.6f} ({sol1.diagnostics['case']}), "
      f"balance residual {sol1.residuals['min_bid_balance']:.2e}")

print("\n=== published-example discrepancy report ===")
print(format_report(build_report(oracle_panels=200_000)))
