import os
import sys
import tempfile
from fractions import Fraction

import numpy as np

sys.path.insert(0, "src")

from ocrskit.distributions import ProductDist
from ocrskit.harness import selectability
from ocrskit.matroids import GraphicMatroid, MatroidError, standard_r10
from ocrskit.regular import (DecompositionError, binary_cycle_space,
                             compose_cycle_space, gluing_check,
                             load_decomposition, regular_prepare,
                             validate_good)

work = tempfile.mkdtemp()

def put(name, text):
    with open(os.path.join(work, name), "w") as fh:
        fh.write(text)

put("triangle.graph", "graph 3 3\n0 1\n1 2\n0 2\n")
put("c4.bin", "binary 3 4\ncolumns 0 1 3 4\n1 0 0 1\n0 1 0 1\n0 0 1 1\n")
put("two_triangles.dcmp", """
; 2-sum of two triangles along shared element 2 -> a 4-cycle
(root-binary :file c4.bin)
(2 (leaf graphic :file triangle.graph :elements (0 1 2))
   (leaf graphic :file triangle.graph :elements (2 3 4) :A (2))
   :z (2))
""")

tree = load_decomposition(open(os.path.join(work, "two_triangles.dcmp")).read(), work)
assert sorted(tree.ground) == [0, 1, 3, 4], tree.ground
rep = validate_good(tree)
assert rep.ok, rep.issues
print("two-triangle 2-sum validates")

# cycle-space composition equals the supplied representation
want = binary_cycle_space(tree.root_rep)
got = compose_cycle_space(tree.root)
assert want.elements == got.elements and sorted(want.basis) == sorted(got.basis)
assert got.basis == [0b1111]
print("composed cycle space = {1111} over (0,1,3,4)")

D = ProductDist({e: Fraction(1, 4) for e in [0, 1, 3, 4]})
scheme = regular_prepare(tree, D)
assert scheme.b == Fraction(1, 3)
assert float(scheme.c) == 0.125, scheme.c
rep2 = selectability(scheme, D, mode="exact")
print("glued selectability:", {s.item: str(s.estimate) for s in rep2.stats})
assert rep2.ok and all(s.exact for s in rep2.stats)
assert rep2.minimum >= Fraction(1, 12)

trials, bad = gluing_check(scheme, tree.root_rep, D, trials=2000,
                           rng=np.random.default_rng(7))
assert bad == 0, (trials, bad)
print("gluing check: 2000 trials, 0 dependent outputs")

# --- sum head spelled as (sum 2 ...) parses identically -------------------
put("alt.dcmp", """
(root-binary :file c4.bin)
(sum 2 (leaf graphic :file triangle.graph :elements (0 1 2))
       (leaf graphic :file triangle.graph :elements (2 3 4) :A (2))
       :z (2))
""")
tree_alt = load_decomposition(open(os.path.join(work, "alt.dcmp")).read(), work)
assert validate_good(tree_alt).ok
print("(sum 2 ...) head accepted")

# --- single graphic leaf reduces to the wrapped chain scheme ---------------
put("single.dcmp", "(leaf graphic :file triangle.graph)\n")
tree1 = load_decomposition(open(os.path.join(work, "single.dcmp")).read(), work)
assert validate_good(tree1).ok
D1 = ProductDist({e: Fraction(1, 5) for e in range(3)})
s1 = regular_prepare(tree1, D1)
assert float(s1.c) == 0.125
r1 = selectability(s1, D1, mode="exact")
assert r1.ok
print("single graphic leaf: min selectability", float(r1.minimum))

# --- plain R10 leaf: element marginal in I0 is exactly 1/2 -----------------
put("r10.dcmp", "(leaf r10)\n")
tree10 = load_decomposition(open(os.path.join(work, "r10.dcmp")).read(), work)
assert validate_good(tree10).ok
D10 = ProductDist({e: Fraction(1, 6) for e in range(10)})
s10 = regular_prepare(tree10, D10)
assert s10.c == 0.5 or float(s10.c) == 0.5, s10.c
inner = s10.leaf_schemes[0]
for e in range(10):
    inside = sum(w for fam, w in zip([f for f, _ in inner.weighted],
                                     [w for _, w in inner.weighted])
                 if e in fam.allowed for w in [1])
print("r10 leaf prepared, c =", float(s10.c))

# --- 1-sum (disjoint union) of two triangles --------------------------------
put("disjoint.dcmp", """
(1 (leaf graphic :file triangle.graph :elements (0 1 2))
   (leaf graphic :file triangle.graph :elements (3 4 5)))
""")
treeD = load_decomposition(open(os.path.join(work, "disjoint.dcmp")).read(), work)
repD = validate_good(treeD)
assert repD.ok, repD.issues
DD = ProductDist({e: Fraction(1, 5) for e in range(6)})
sD = regular_prepare(treeD, DD)
rD = selectability(sD, DD, mode="exact")
assert rD.ok
print("1-sum of disjoint triangles: min selectability", float(rD.minimum))

# --- negative: S(R10)-style leaf rejected at load ---------------------------
put("bad_kind.dcmp", "(leaf sr10)\n")
try:
    load_decomposition(open(os.path.join(work, "bad_kind.dcmp")).read(), work)
    raise AssertionError("sr10 leaf should be rejected")
except DecompositionError as exc:
    assert "not supported" in str(exc)
    print("S(R10)-style leaf rejected:", str(exc)[:60], "...")

# --- negative: grounds intersect beyond z ----------------------------------
put("bad_overlap.dcmp", """
(2 (leaf graphic :file triangle.graph :elements (0 1 2))
   (leaf graphic :file triangle.graph :elements (1 2 3) :A (2))
   :z (2))
""")
treeB = load_decomposition(open(os.path.join(work, "bad_overlap.dcmp")).read(), work)
repB = validate_good(treeB)
assert not repB.ok and any("intersect" in m for m in repB.issues), repB.issues
print("overlap beyond z flagged:", repB.issues[0][:70])

# --- negative: 3-sum whose set is not a circuit -----------------------------
put("k4.graph", "graph 4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n")
# edges of K4 in file order: 0=(0,1) 1=(0,2) 2=(0,3) 3=(1,2) 4=(1,3) 5=(2,3)
# the star at vertex 0 is {0,1,2}: a cocircuit, not a circuit
put("bad_3sum.dcmp", """
(3 (leaf graphic :file k4.graph :elements (0 1 2 3 4 5))
   (leaf graphic :file k4.graph :elements (0 1 2 6 7 8) :A (0 1 2))
   :z (0 1 2))
""")
treeC = load_decomposition(open(os.path.join(work, "bad_3sum.dcmp")).read(), work)
repC = validate_good(treeC)
assert not repC.ok and any("circuit" in m for m in repC.issues), repC.issues
print("non-circuit 3-sum flagged:", [m for m in repC.issues if "circuit" in m][0][:70])

# --- valid 3-sum: two K4s glued on a triangle -------------------------------
# triangle {0,3,5}? edges 0=(0,1), 3=(1,2), 1=(0,2): {0,1,3} is a triangle.
put("good_3sum.dcmp", """
(3 (leaf graphic :file k4.graph :elements (0 1 2 3 4 5))
   (leaf graphic :file k4.graph :elements (0 1 6 3 7 8) :A (0 1 3))
   :z (0 1 3))
""")
treeG = load_decomposition(open(os.path.join(work, "good_3sum.dcmp")).read(), work)
repG = validate_good(treeG)
assert repG.ok, repG.issues
print("K4 +3 K4 on a triangle validates; ground:", sorted(treeG.ground))
# composed matroid should be graphic: K4 3-sum K4 on a triangle = two K4s
# sharing a triangle with the triangle removed ("prism-like"), rank 4
space = compose_cycle_space(treeG.root)
print("composed cycle-space dim:", space.dim(), "over", len(space.elements), "elements")
DG = ProductDist({e: Fraction(1, 8) for e in sorted(treeG.ground)})
sG = regular_prepare(treeG, DG)
rG = selectability(sG, DG, mode="exact")
assert rG.ok, [(s.item, float(s.estimate)) for s in rG.stats]
print("3-sum scheme min selectability:", float(rG.minimum))

# --- negative: bad root representation --------------------------------------
put("badrep.bin", "binary 3 4\ncolumns 0 1 3 4\n1 0 0 1\n0 1 0 1\n0 0 1 0\n")
put("badrep.dcmp", """
(root-binary :file badrep.bin)
(2 (leaf graphic :file triangle.graph :elements (0 1 2))
   (leaf graphic :file triangle.graph :elements (2 3 4) :A (2))
   :z (2))
""")
treeR = load_decomposition(open(os.path.join(work, "badrep.dcmp")).read(), work)
repR = validate_good(treeR)
assert not repR.ok and any("cycle space" in m for m in repR.issues), repR.issues
print("wrong root representation flagged")

# --- negative: missing / doubled empty-A root in a component ---------------
put("bad_roots.dcmp", """
(2 (leaf graphic :file triangle.graph :elements (0 1 2) :A (2))
   (leaf graphic :file triangle.graph :elements (2 3 4) :A (2))
   :z (2))
""")
treeN = load_decomposition(open(os.path.join(work, "bad_roots.dcmp")).read(), work)
repN = validate_good(treeN)
assert not repN.ok and any("root" in m for m in repN.issues), repN.issues
print("doubled :A root flagged:", [m for m in repN.issues if "root" in m][0][:70])

print("ALL REGULAR CHECKS PASS")
