import math
from fractions import Fraction

import numpy as np

from ocrskit.distributions import (ProductDist, pair_singleton_dist,
                                   twise_symmetric)
from ocrskit.single_item import (ALMIGHTY_POLICIES, almighty_experiment,
                                 binomial_union_lower, bonferroni_lower,
                                 phi, phi_series, policy_guarantee,
                                 rank1_crs_quality, rank1_quality_lp,
                                 single_sample_ratio, sqrt2_policy,
                                 sqrt2_policy_search, threshold_alg_enumerate,
                                 threshold_alg_formula, threshold_best_params,
                                 threshold_hard_instance, threshold_opt,
                                 threshold_search, threshold_sup_bound,
                                 truncated_union_objective)

ok = True
def check(name, cond, detail=""):
    global ok
    print(("PASS" if cond else "FAIL"), name, detail)
    ok = ok and cond

# --- phi ---
check("phi(2)=1/2", phi(2) == Fraction(1, 2))
check("phi(3)=1/2", phi(3) == Fraction(1, 2))
check("phi(4)=5/8", phi(4) == Fraction(5, 8))
check("phi(6)=91/144", phi(6) == Fraction(91, 144))
check("phi_series(3)=2/3", phi_series(3) == Fraction(2, 3))
check("phi->1-1/e", abs(float(phi(20)) - (1 - math.exp(-1))) < 1e-12)

# --- bonferroni ---
check("bonf(1,2)=1/2", bonferroni_lower(1, 2) == Fraction(1, 2))
check("bonf(1,4)=5/8", bonferroni_lower(1, 4) == Fraction(5, 8))
try:
    bonferroni_lower(1, 3); check("bonf odd rejected", False)
except ValueError:
    check("bonf odd rejected", True)
# binomial form dominates
dom = all(binomial_union_lower(Fraction(c, 10), n, t) >= bonferroni_lower(Fraction(c, 10), t)
          for c in range(0, 11) for n in (2, 3, 5, 8) for t in (2, 4) if t <= n)
check("binomial >= series", dom)
# uniform x minimizes the truncated objective among same-sum points
rng = np.random.default_rng(1)
worst = 0.0
for _ in range(50):
    n = int(rng.integers(2, 7))
    t = int(rng.choice([2, 4]))
    if t > n:
        continue
    raw = rng.random(n)
    c = rng.random()
    x = [Fraction(v).limit_denominator(1000) for v in raw / raw.sum() * c]
    c_exact = sum(x)
    f_x = truncated_union_objective(x, t)
    f_u = truncated_union_objective([c_exact / n] * n, t)
    worst = min(worst, float(f_x - f_u))
check("uniform minimizes trunc objective", worst >= -1e-9, f"worst={worst}")

# --- rank1 quality ---
for n in (4, 8, 16, 64):
    D = twise_symmetric(n, 2)
    q = rank1_crs_quality(D)
    check(f"quality D_2,{n} = (n+1)/2n", q.value == Fraction(n + 1, 2 * n),
          f"got {q.value}")
pd = ProductDist({i: Fraction(1, 5) for i in range(5)})
qp = rank1_crs_quality(pd)
check("product quality = 1-(1-1/n)^n", qp.value == 1 - Fraction(4, 5) ** 5, f"{qp.value}")
D4 = twise_symmetric(16, 4)
q4 = rank1_crs_quality(D4)
check("quality D_4,16 = 1-z0", q4.value == 1 - D4.z[0], f"{q4.value} vs {1 - D4.z[0]}")
check("quality >= phi(4)", q4.value >= phi(4))
check("|quality-phi(4)| <= 4/16", abs(q4.value - phi(4)) <= Fraction(4, 16))
# explicit path agrees with symmetric path
De = twise_symmetric(6, 2).to_explicit()
qe = rank1_crs_quality(De)
check("explicit path agrees", qe.value == Fraction(7, 12), f"{qe.value}")
# LP cross-check
for D in (pair_singleton_dist(3), twise_symmetric(5, 2).to_explicit(),
          ProductDist({i: Fraction(1, 4) for i in range(4)}).to_explicit()):
    De = D if hasattr(D, "outcomes") else D.to_explicit()
    exact = float(rank1_crs_quality(De).value)
    lp = rank1_quality_lp(De)
    check("LP agrees", abs(exact - lp) < 1e-7, f"exact={exact:.6f} lp={lp:.6f}")

# --- sqrt2 policy ---
pol = sqrt2_policy([Fraction(1, 10)] * 10)
check("q1 = sqrt2-1", abs(pol.q[0] - (math.sqrt(2) - 1)) < 1e-12)
worst = 1.0
rng = np.random.default_rng(2)
for _ in range(200):
    n = int(rng.integers(1, 12))
    raw = rng.random(n)
    x = [Fraction(v).limit_denominator(10000) for v in raw / raw.sum() * rng.random()]
    g = policy_guarantee(x, sqrt2_policy(x).q)
    worst = min(worst, g)
check("guarantee >= sqrt2-1", worst >= math.sqrt(2) - 1 - 1e-9, f"worst={worst:.9f}")
best, _ = sqrt2_policy_search(50, np.random.default_rng(3), restarts=10, iters=100)
check("search beats nothing big", best <= math.sqrt(2) - 1 + 0.05, f"best={best:.6f}")
check("search reaches sqrt2-1", best >= math.sqrt(2) - 1 - 1e-9, f"best={best:.6f}")

# --- multiple-threshold hard instance ---
r, t = threshold_best_params()
check("t = (5-sqrt5)/4", abs(t - (5 - math.sqrt(5)) / 4) < 1e-12)
inst = threshold_hard_instance(8, Fraction(618, 1000), Fraction(691, 1000))
inst.verify(2)
check("PI verified", True)
opt = threshold_opt(inst)
check("opt matches E[max]", opt == inst.expected_max(), f"{opt} vs {inst.expected_max()}")
rng = np.random.default_rng(4)
agree = True
for _ in range(20):
    q = [Fraction(v).limit_denominator(100) for v in rng.random(10)]
    a, b = threshold_alg_enumerate(inst, q), threshold_alg_formula(inst, q)
    agree = agree and a == b
check("enumerate == formula", agree)
lim = 2 * math.sqrt(5) - 4
for n in (50, 200):
    ub = threshold_sup_bound(n, r, t)
    check(f"sup bound n={n} <= lim+5/n", ub <= lim + 5 / n, f"ub={ub:.6f} lim={lim:.6f}")
inst2 = threshold_hard_instance(40, Fraction(618, 1000), Fraction(6910, 10000))
val, q_at = threshold_search(inst2, grid=15, restarts=5, iters=100)
ub2 = threshold_sup_bound(40, Fraction(618, 1000), Fraction(6910, 10000))
check("search <= closed-form bound", val <= ub2 + 1e-9, f"search={val:.6f} ub={ub2:.6f}")
print(f"  search found {val:.6f} at {q_at}, bound {ub2:.6f}, limit {lim:.6f}")

# --- single sample ---
rep = single_sample_ratio(inst, trials=20000, rng=np.random.default_rng(5))
const = 3 - math.sqrt(5) - math.log(2)
check("single-sample ratio >= const-3sig",
      rep.ratio >= const - 3 * rep.ci99, f"ratio={rep.ratio:.4f} const={const:.4f}")

# --- almighty ---
for n in (4, 6):
    for pol, expect in zip(ALMIGHTY_POLICIES,
                           [Fraction(1, n), Fraction(n + 1, 4 * n), Fraction(1, n)]):
        repA = almighty_experiment(n, pol)
        vals = set(repA.conditional.values())
        check(f"almighty {pol.name} n={n}", vals == {expect} and repA.ok,
              f"got {vals}, bound {repA.bound}")

print("ALL SINGLE-ITEM CHECKS PASS" if ok else "FAILURES PRESENT")
