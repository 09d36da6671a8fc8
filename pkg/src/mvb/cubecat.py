"""Index combinatorics for cube categories.

Finite subsets of the positive integers serve as cube-category objects,
set partitions index the multilinear components of chart changes, and
diagonal partitions reindex cores onto smaller cubes.
"""

from .errors import InvalidPartition


class IndexSet(tuple):
    """A finite subset of {1, 2, ...}, stored as a strictly increasing tuple."""

    def __new__(cls, elements=()):
        elems = tuple(sorted(set(elements)))
        for i in elems:
            if not isinstance(i, int) or isinstance(i, bool) or i < 1:
                raise InvalidPartition("index sets hold positive integers, got %r" % (i,))
        return super().__new__(cls, elems)

    def union(self, other):
        return IndexSet(tuple(self) + tuple(other))

    def intersection(self, other):
        other = set(other)
        return IndexSet(i for i in self if i in other)

    def difference(self, other):
        other = set(other)
        return IndexSet(i for i in self if i not in other)

    def issubset(self, other):
        return set(self) <= set(other)

    def isdisjoint(self, other):
        return set(self).isdisjoint(other)

    def __repr__(self):
        return "IndexSet(%s)" % (list(self),)


def full_set(n):
    """The set {1, ..., n}."""
    return IndexSet(range(1, n + 1))


class Partition(tuple):
    """A set partition: disjoint nonempty IndexSets in canonical order.

    Canonical order sorts blocks by their minimum element; two partitions
    of the same ground set are equal iff they are equal as tuples.
    """

    def __new__(cls, blocks):
        blocks = tuple(IndexSet(b) for b in blocks)
        if any(len(b) == 0 for b in blocks):
            raise InvalidPartition("empty block")
        seen = set()
        for b in blocks:
            for i in b:
                if i in seen:
                    raise InvalidPartition("blocks overlap at %d" % i)
                seen.add(i)
        return super().__new__(cls, sorted(blocks, key=lambda b: b[0]))

    @property
    def ground(self):
        return IndexSet(i for b in self for i in b)

    def __repr__(self):
        return "Partition(%s)" % ([list(b) for b in self],)


class DiagonalPartition:
    """A partition of S into one distinguished block J and singletons.

    This is the reindexing device for cores: the core of an S-node at J
    lives over the cube whose axes are J and the points of S minus J.
    """

    def __init__(self, ground, distinguished):
        self.ground = IndexSet(ground)
        self.distinguished = IndexSet(distinguished)
        if len(self.distinguished) == 0:
            raise InvalidPartition("distinguished block must be nonempty")
        if not self.distinguished.issubset(self.ground):
            raise InvalidPartition("distinguished block not inside ground set")
        self.singletons = tuple(
            IndexSet([i]) for i in self.ground.difference(self.distinguished)
        )

    def as_partition(self):
        return Partition((self.distinguished,) + self.singletons)

    @property
    def blocks(self):
        return tuple(self.as_partition())

    def __eq__(self, other):
        return (
            isinstance(other, DiagonalPartition)
            and self.ground == other.ground
            and self.distinguished == other.distinguished
        )

    def __hash__(self):
        return hash((self.ground, self.distinguished))

    def __repr__(self):
        return "DiagonalPartition(%s, %s)" % (list(self.ground), list(self.distinguished))


def subsets(index_set):
    """All subsets of an IndexSet, ordered by cardinality then lexicographically."""
    index_set = IndexSet(index_set)
    out = [IndexSet()]
    for i in index_set:
        out.extend(s.union([i]) for s in list(out))
    out.sort(key=lambda s: (len(s), tuple(s)))
    return out


def nonempty_subsets(index_set):
    return [s for s in subsets(index_set) if s]


def partitions(index_set):
    """All set partitions of a nonempty IndexSet.

    Blocks of each partition are in canonical order; the list itself is
    ordered by block count, then lexicographically on the block tuples,
    so serialized output is reproducible.
    """
    index_set = IndexSet(index_set)
    if len(index_set) == 0:
        raise InvalidPartition("partitions of the empty set are not enumerated")

    def _gen(elems):
        if not elems:
            yield []
            return
        rest, last = elems[:-1], elems[-1]
        for smaller in _gen(rest):
            for k in range(len(smaller)):
                yield smaller[:k] + [smaller[k] + [last]] + smaller[k + 1:]
            yield smaller + [[last]]

    out = [Partition(blocks) for blocks in _gen(list(index_set))]
    out.sort(key=lambda p: (len(p), tuple(tuple(b) for b in p)))
    return out


def coarsen(partition, grouping):
    """Merge blocks of ``partition`` according to a partition of {1..k}.

    ``grouping`` partitions the block positions 1..k (canonical order of
    ``partition``); the result has one block per group, the union of the
    grouped blocks.
    """
    partition = Partition(partition)
    grouping = Partition(grouping)
    k = len(partition)
    if grouping.ground != full_set(k):
        raise InvalidPartition(
            "grouping must partition {1..%d}, got ground %s" % (k, list(grouping.ground))
        )
    merged = []
    for group in grouping:
        union = IndexSet()
        for pos in group:
            union = union.union(partition[pos - 1])
        merged.append(union)
    return Partition(merged)


def unions_of_blocks(diagonal, chosen):
    """The union of a sub-collection of blocks of a DiagonalPartition."""
    blocks = set(diagonal.blocks)
    out = IndexSet()
    for block in chosen:
        block = IndexSet(block)
        if block not in blocks:
            raise InvalidPartition("%r is not a block of %r" % (block, diagonal))
        out = out.union(block)
    return out


def is_union_of_blocks(index_set, blocks):
    """True iff ``index_set`` is a union of some of the given disjoint blocks."""
    remaining = set(IndexSet(index_set))
    for block in blocks:
        if remaining >= set(block):
            remaining -= set(block)
        elif remaining & set(block):
            return False
    return not remaining
