"""The constructive pipeline: split, decompose, compare, normalize.

Splittings are pasted from per-chart right inverses with a partition of
unity over the finite base; a splitting plus core decompositions gives
the unique decomposition; two decompositions differ by a statomorphism;
conjugating the transitions by the decomposition removes every
nonlinear tail.
"""

from mvb.atlas import validate
from mvb.cubecat import full_set, nonempty_subsets, partitions
from mvb.rand import twisted_instance
from mvb.split import (
    act_by_statomorphism,
    decompose,
    find_splitting,
    is_decomposition,
    is_splitting,
    normalize_atlas,
    split_pullback,
    torsor_statomorphism,
)

a = twisted_instance(2718, n=3, n_points=2, n_charts=2)

sigma = find_splitting(a, "least-chart")
print("splitting found (least-chart):", is_splitting(sigma))

d1 = decompose(a, "least-chart")
d2 = decompose(a, "uniform-average")
print("decompositions verify:", is_decomposition(d1), is_decomposition(d2))

tau = torsor_statomorphism(d1, d2)
nontrivial = sum(1 for g in tau.data.values() if not g.is_identity())
print("strategies differ by a statomorphism; nontrivial at",
      nontrivial, "of", len(tau.data), "chart points")
print("acting on the first by it recovers the second:",
      act_by_statomorphism(d1, tau).data == d2.data)

normalized = normalize_atlas(a, d1)
tails = sum(
    0 if g.components[(s, rho)].is_zero() else 1
    for g in normalized.transitions.values()
    for s in nonempty_subsets(full_set(3))
    for rho in partitions(s) if len(rho) > 1
)
print("normalized atlas: nonlinear tails remaining:", tails,
      " valid:", validate(normalized).valid)

section = split_pullback(a)
print("simultaneous section of the pullback projection is natural:",
      section.is_natural())
