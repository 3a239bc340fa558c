"""Finite topological spaces over finite sets.

Builds the forgetful functor from spaces on at most two points, classifies
it, and shows how initial families put topologies on a set.
"""
from topofam.corpus.builders import build_finfilt, build_fintop
from topofam.fibered import creates_families, fiber_order, is_u_initial
from topofam.topological import bot_object, classify, top_object

top = build_fintop(2)
print(f"{top.T.name}: {len(top.T.objects)} spaces, {len(top.T.arrows)} continuous maps")
print(f"{top.S.name}: {len(top.S.objects)} sets, {len(top.S.arrows)} maps")

c = classify(top)
print("flags:", ", ".join(k for k, v in c.flags.items() if v))
print("routes:", c.routes["topological"])

# The fibre over a set is its lattice of topologies; an identity map runs
# from a finer topology to each coarser one.
up = fiber_order(top, "2")
for x in top.over("2"):
    print(f"  {x} -> {sorted(up[x] - {x})}")

# Topologies at the ends of each fibre: indiscrete on top, discrete below.
for s in top.S.objects:
    print(f"over {s}: top {top_object(top, s)}, bottom {bot_object(top, s)}")

# Pull the Sierpinski space back along the swap of its two points.
creation = creates_families(top, "initial")
sierpinski = "2[-,1,01]"
data = [("2->2:10", sierpinski)]
f = creation.witness("2", data)
print(f"initial lift of swap onto {sierpinski}: apex {f.anchor}, initial={is_u_initial(top, f)}")

# Sets with a filter: over the one-point set the top and bottom differ.
filt = build_finfilt(2)
print(f"filters over 1: top {top_object(filt, '1')}, bottom {bot_object(filt, '1')}")
