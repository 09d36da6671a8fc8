"""Cores, cores by stages, the pullback, and the ultracore sequence.

The core at (S, J) keeps exactly the slots that are unions of J and the
leftover singletons; the pullback trivializes the top slot; and the
ultracore measures the difference, fiberwise exactly.
"""

from mvb.atlas import FiniteBase, decomposed, validate
from mvb.cores import core, core_by_stages, pullback, ultracore_sequence
from mvb.cubecat import full_set, nonempty_subsets
from mvb.gauge import DimAssignment
from mvb.rand import twisted_instance

dims = DimAssignment(3, {s: 1 for s in nonempty_subsets(full_set(3))})
plain = decomposed(dims, FiniteBase(["p"]))

spec, pres = core(plain, [1, 2, 3], [1, 2])
print("core at (S, J) = ({1,2,3}, {1,2}): axes", [list(b) for b in pres.axis_blocks],
      " total fiber dim:", pres.node_dim(full_set(2)))
print("core presentation validates?", validate(pres).valid)

twisted = twisted_instance(77, n=3, n_points=2, n_charts=2)
print("\ncore by stages on a twisted instance (K={1} inside J={1,2}):",
      core_by_stages(twisted, [1, 2, 3], [1, 2], [1]).status)

pb = pullback(twisted)
print("pullback: top slot dim", pb.presentation.dims.dim(full_set(3)),
      ", projection fiberwise surjective:", pb.certificate.status)

iota, pi, cert = ultracore_sequence(twisted, 1)
identity = [w for w in cert.witnesses if "dimension_identity" in w][0]
total, ultra, pulled = identity["dimension_identity"]
print("ultracore sequence over axis 1:", cert.status,
      "  dimension identity: %d = %d + %d" % (total, ultra, pulled))
