"""Scratch smoke test for families/harness/uniform/structured."""
import itertools
from fractions import Fraction

import numpy as np

from ocrskit.distributions import (ExplicitSubsetDist, ProductDist,
                                   kn_cycle_dist, twise_symmetric,
                                   pair_singleton_dist, subsample)
from ocrskit.families import (BucketFamily, CapFamily, ChainFamily,
                              LaminarCapFamily, ScaledScheme, FixedScheme)
from ocrskit.harness import (selectability, worst_order_balancedness,
                             scale_wrapper, ValueModel,
                             opt_membership_thresholds, prophet_simulate)
from ocrskit.matroids import (CographicMatroid, GraphicMatroid,
                              LaminarMatroid, Multigraph, TransversalMatroid,
                              UniformMatroid, complete_graph)
from ocrskit.uniform import (averaging_overflow, offline_uniform_crs,
                             simple_uniform_prepare, two_bucket_prepare)
from ocrskit.structured import (cographic_prepare, graphic_chain_prepare,
                                laminar_prepare, low_density_prepare,
                                round_laminar, transversal_flow,
                                transversal_prepare,
                                laminar_guarantee_constant)
from ocrskit.matroids import standard_r10, MatroidError

rng = np.random.default_rng(42)

# --- certificate vs brute force on random families -------------------------
def check_cert(fam, dists, label):
    for D in dists:
        ex = D.to_explicit() if not isinstance(D, ExplicitSubsetDist) else D
        for S in ex.support():
            for e in S:
                a = fam.selectable(e, S)
                b = fam.selectable_bruteforce(e, S)
                assert a == b, (label, e, sorted(S), a, b)
    print(f"{label}: certificate == brute force")

D6 = twise_symmetric(6, 2)
check_cert(CapFamily(2, range(6)), [D6], "CapFamily")
check_cert(BucketFamily({i: ("good" if i < 4 else "bad") for i in range(6)},
                        {"good": 2, "bad": 1}), [D6], "BucketFamily")

lam = LaminarCapFamily([(frozenset({0, 1, 2}), 1), (frozenset(range(6)), 3),
                        (frozenset({3, 4}), 1)], range(6))
check_cert(lam, [D6], "LaminarCapFamily")

# nested counterexample for the naive conjunction: A=cap 4 over 0..6, B=cap 2 over 0..4
lam2 = LaminarCapFamily([(frozenset(range(7)), 4), (frozenset(range(5)), 2)],
                        range(8))
R = frozenset({0, 1, 2, 3, 4, 6})
assert lam2.selectable(6, R) == lam2.selectable_bruteforce(6, R) == True
print("nested-cap counterexample handled exactly:", lam2.selectable(6, R))

# --- simple uniform --------------------------------------------------------
sch = simple_uniform_prepare(D6, 2)
rep = selectability(sch, D6)
print("simple uniform k=2 on 2-wise(6): min sel", rep.minimum, ">= 1-b:", rep.bound, rep.ok)

av = averaging_overflow(D6, 2)
print("averaging:", av.total, "<=", av.bound, av.ok)

# --- two bucket ------------------------------------------------------------
Dp = ProductDist({i: Fraction(1, 5) for i in range(8)})
tb = two_bucket_prepare(Dp, 4)
print("two-bucket params:", tb.params.good_cap, tb.params.bad_cap,
      f"bstar={tb.params.bstar:.4f}", tb.params.method, "eps:", tb.params.eps)
rep = selectability(tb, Dp)
print("two-bucket min sel:", float(rep.minimum), "guarantee:", float(tb.c))
check_cert(tb.family, [Dp], "two-bucket family")

# --- offline CRS: symmetric fast path vs explicit elimination --------------
crs_sym = offline_uniform_crs(D6, 2)
crs_exp = offline_uniform_crs(D6.to_explicit(), 2)
print("offline CRS scores (sym) :", [str(s) for s in crs_sym.scores])
print("offline CRS scores (expl):", [str(s) for s in crs_exp.scores])
bal = crs_sym.balancedness(D6)
print("offline CRS balancedness:", min(bal.values()), ">= 1-bound:",
      1 - crs_sym.bound, min(bal.values()) >= 1 - crs_sym.bound)

# --- graphic chain on K4 ---------------------------------------------------
K4 = complete_graph(4)
b = Fraction(1, 4)
Dk4 = ProductDist({e: b / 2 for e in range(6)})   # density(K4) = 2
gs = graphic_chain_prepare(K4, Dk4, b)
print("K4 chain slices:", [sorted(s) for s in gs.slices])
rep = selectability(gs, Dk4)
print("K4 chain min sel:", rep.minimum, ">= 1-2b:", 1 - 2 * b, rep.ok)
check_cert(gs.family, [Dk4], "ChainFamily(K4)")

# stall: kn_cycle_dist(5) at b < 1/2 lies outside bP
K5 = complete_graph(5)
D5 = kn_cycle_dist(5)
try:
    graphic_chain_prepare(K5, D5, Fraction(2, 5))
    print("ERROR: no stall")
except MatroidError as err:
    print("K5 cycle dist stalls as expected:", str(err)[:40])

# wrapped chain: (1/4,1/2) -> keep 1/4 -> (1,1/8)
wrapped = scale_wrapper(lambda Dt: graphic_chain_prepare(K4, Dt, b), b)
Dfull = ProductDist({e: Fraction(1, 2) for e in range(6)})
ws = wrapped(Dfull)
print("wrapped (b,c):", ws.b, ws.c)
rep = selectability(ws, Dfull)
print("wrapped chain min sel:", rep.minimum, ">= 1/8:", rep.minimum >= Fraction(1, 8))

# --- laminar ---------------------------------------------------------------
lamM = LaminarMatroid([(range(6), 5), ({0, 1, 2}, 3), ({0, 1}, 3)])
rl = round_laminar(lamM)
print("rounded constraints:", [(sorted(s), c) for s, c in rl.constraints],
      "dropped:", [(sorted(s), c) for s, c in rl.dropped])

Dlam = ProductDist({i: Fraction(1, 50) for i in range(6)})
ls = laminar_prepare(lamM, Dlam)
print("laminar instance c:", float(ls.c), "universal:", ls.universal_c,
      ">= 1/2.661:", laminar_guarantee_constant() >= 1 / 2.661)
rep = selectability(ls, Dlam)
print("laminar min sel:", float(rep.minimum))
check_cert(ls.family, [Dlam], "laminar family")

# --- low density on R10 ----------------------------------------------------
R10 = standard_r10()
ld = low_density_prepare(R10)
print("R10 gamma:", ld.gamma, "c:", ld.c)
D10 = twise_symmetric(10, 2)
rep = selectability(ld, D10)
print("R10 low-density sel (all items):",
      set(float(s.estimate) for s in rep.stats))

# --- cographic -------------------------------------------------------------
cg = cographic_prepare(K4, None, Fraction(1, 2))
print("cographic K4 gamma:", cg.gamma, "c:", cg.c,
      "classes:", cg.classes)
Dcg = twise_symmetric(6, 2)
rep = selectability(cg, Dcg)
print("cographic K4 min sel:", rep.minimum, ">= (1-b)/3:",
      rep.minimum >= Fraction(1, 6))

# with a genuine 2-cut: two triangles joined by a doubled edge
tt = Multigraph({0: (0, 1), 1: (1, 2), 2: (0, 2), 3: (3, 4), 4: (4, 5),
                 5: (3, 5), 6: (2, 3), 7: (2, 3)})
cg2 = cographic_prepare(tt, None, Fraction(1, 2))
print("2-cut graph classes:", cg2.classes, "gamma:", cg2.gamma)

# --- transversal -----------------------------------------------------------
TM = TransversalMatroid({0: [0, 1], 1: [0], 2: [1], 3: [0, 1, 2]})
x = {0: Fraction(1, 4), 1: Fraction(1, 4), 2: Fraction(1, 4), 3: Fraction(1, 4)}
fl = transversal_flow(TM, x, Fraction(1, 2))
print("flow feasible:", fl.feasible, "value:", fl.value)
Dt = ProductDist(x)
ts = transversal_prepare(TM, Dt, Fraction(1, 2))
rep = selectability(ts, Dt)
print("transversal min sel:", rep.minimum, ">= 1-b:", rep.minimum >= Fraction(1, 2))
fams = ts.realizations()
print("label realizations:", len(fams), "weights sum:",
      sum(p for _, p in fams))
for fam, _ in fams[:3]:
    check_cert(fam, [Dt], "LabelFamily")

# infeasible x: witness
bad = {0: Fraction(3, 5), 1: Fraction(3, 5), 2: Fraction(1, 4), 3: Fraction(1, 4)}
fl2 = transversal_flow(TM, bad, Fraction(1, 2), allow_shortfall=True)
print("violation witness:", sorted(fl2.violation) if fl2.violation else None)

# --- worst order -----------------------------------------------------------
wob = worst_order_balancedness(sch, D6)
print("worst-order balancedness (simple k=2):", wob["balancedness"],
      "exhaustive:", wob["exhaustive"])

# --- prophet on rank-2 uniform ---------------------------------------------
U = UniformMatroid(range(6), 2)
model = ValueModel({i: 6 - i for i in range(6)}, D6)
p, bias = opt_membership_thresholds(U, model)
print("membership p:", [str(p[i]) for i in range(6)], "sum:", sum(p.values()))
pr = prophet_simulate(U, model, lambda Dc: simple_uniform_prepare(Dc, 2),
                      trials=4000, rng=np.random.default_rng(7))
print(f"prophet ratio: {pr.ratio:.3f} bound: {pr.bound:.3f} ok: {pr.ok}")

print("ALL SMOKE2 CHECKS DONE")
