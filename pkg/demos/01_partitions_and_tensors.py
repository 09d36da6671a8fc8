"""Index combinatorics and exact tensors: the ground floor of the kit.

Every higher construction indexes its data by finite subsets of the
positive integers and by set partitions of those subsets, and stores
multilinear maps as flat rational tensors.
"""

from fractions import Fraction

from mvb.cubecat import IndexSet, Partition, coarsen, full_set, partitions, subsets
from mvb.exactlin import MultiTensor, kernel_basis, rank, solve_linear

ground = IndexSet([1, 2, 3])
print("subsets of", list(ground), "by cardinality then lexicographic:")
for s in subsets(ground):
    print("  ", list(s))

print("\npartition counts (Bell numbers):")
for size in range(1, 6):
    print("   #%d -> %d" % (size, len(partitions(full_set(size)))))

rho = Partition([[4], [1, 3], [2]])
print("\ncanonical block order of {{4},{1,3},{2}}:", [list(b) for b in rho])
print("coarsened by {{1,2},{3}}:",
      [list(b) for b in coarsen(rho, Partition([[1, 2], [3]]))])

print("\nexact linear algebra never rounds:")
a = MultiTensor.from_rows([[2, 1], [1, 1]])
b = (Fraction(1), Fraction(3))
x = solve_linear(a, b)
print("   solve [[2,1],[1,1]] x = (1,3)  ->  x =", tuple(map(str, x)))
print("   rank:", rank(a), "  kernel of [[1,2]]:",
      [tuple(map(str, v)) for v in kernel_basis(MultiTensor.from_rows([[1, 2]]))])

bilinear = MultiTensor(1, (2, 2), [1, 0, 0, Fraction(1, 2)])
print("   bilinear form value on (1,2),(3,4):",
      str(bilinear.apply([(Fraction(1), Fraction(2)), (Fraction(3), Fraction(4))])[0]))
