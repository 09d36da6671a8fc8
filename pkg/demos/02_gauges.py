"""Gauges: partition-indexed multilinear families and their group law.

A chart change of a double bundle sends (v1, v2, v12) to
(a v1, b v2, c v12 + w(v1, v2)); composition mixes the linear parts and
the bilinear tail exactly as chart algebra demands, and inversion solves
for the inverse tail block by block.
"""

from fractions import Fraction

from mvb.cubecat import IndexSet, Partition
from mvb.exactlin import MultiTensor
from mvb.gauge import DimAssignment, Gauge, identity_gauge

J1, J2, J12 = IndexSet([1]), IndexSet([2]), IndexSet([1, 2])
dims = DimAssignment(2, {J1: 1, J2: 1, J12: 1})


def scalar_gauge(a, b, c, w):
    return Gauge(dims, dims, {
        (J1, Partition([J1])): MultiTensor(1, (1,), [a]),
        (J2, Partition([J2])): MultiTensor(1, (1,), [b]),
        (J12, Partition([J12])): MultiTensor(1, (1,), [c]),
        (J12, Partition([J1, J2])): MultiTensor(1, (1, 1), [w]),
    })


g = scalar_gauge(1, 1, 1, 2)
v = {J1: (Fraction(3),), J2: (Fraction(5),), J12: (Fraction(7),)}
out = g.evaluate(v)
print("twist by w=2 on (3, 5, 7):",
      [str(out[s][0]) for s in (J1, J2, J12)], " (7 + 2*3*5 = 37)")

f = scalar_gauge(2, 3, 5, 7)
h = scalar_gauge(11, 13, 17, 19)
composite = h.compose(f)
print("composite tail of (a,b,c,w)=(2,3,5,7) then (11,13,17,19):",
      str(composite.component(J12, Partition([J1, J2])).entries[0]),
      " (17*7 + 19*2*3 = 233)")

inv = f.invert()
print("inverse tail of (2,3,5,7):",
      str(inv.component(J12, Partition([J1, J2])).entries[0]),
      " (-w/(abc) = -7/30)")
assert f.compose(inv) == identity_gauge(dims)
assert inv.compose(f) == identity_gauge(dims)
print("two-sided inverse verified exactly")

tau = scalar_gauge(1, 1, 1, 9)
print("statomorphism (identity linear parts)?", tau.is_statomorphism())
print("statomorphisms closed under composition?",
      tau.compose(scalar_gauge(1, 1, 1, -4)).is_statomorphism())
