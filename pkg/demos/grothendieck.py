"""From poset-valued pseudofunctors to fibrations and back.

The total projection is topological exactly when every fibre is a complete
lattice and every transition map has a left adjoint.
"""
from topofam.corpus import counterexamples as cx
from topofam.corpus.random_models import random_pseudofunctor
from topofam.grothendieck import (
    check_topological_pseudofunctor,
    extract_pseudofunctor,
    left_adjoint_of_transition,
    pseudofunctor_isomorphism,
    total_category,
)

p = cx.lattice_pseudofunctor()
tc = total_category(p)
print(f"{tc.total.name}: objects {list(tc.total.objects)}")
for a, (s, t) in tc.total.arrows.items():
    print(f"  {a}: {s} -> {t} over {tc.projection.ar(a)}")

q = extract_pseudofunctor(tc.context(), p.name)
print("extracted back up to isomorphism:", pseudofunctor_isomorphism(p, q) is not None)

for phi in p.base.arrow_ids:
    g = left_adjoint_of_transition(p.pullback(phi))
    print(f"left adjoint of {phi}^*: {None if g is None else g.table}")

for r in (p, cx.antichain_fiber_pseudofunctor()):
    print(f"{r.name}: topological = {check_topological_pseudofunctor(r)}")

verdicts = [check_topological_pseudofunctor(random_pseudofunctor(seed)) for seed in range(30)]
print(f"random pseudofunctors: {sum(verdicts)} of {len(verdicts)} topological")
