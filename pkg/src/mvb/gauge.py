"""Partition-indexed families of multilinear maps.

A gauge assigns to every nonempty subset J of the cube axes and every
set partition of J a multilinear tensor into the J-slot.  Chart changes
of a multiple vector bundle, statomorphisms, and per-point morphism
data are all gauges; they differ only in the constraints placed on the
one-block ("linear part") components.

Composition follows the chart-cocycle sum: the (J, rho)-component of
g after f collects, over all ways of grouping rho's blocks, the outer
g-component on the merged blocks applied to inner f-components on each
group.  Inversion solves g . f = id by recursion on the block count of
rho: the one-block components invert as matrices, and each k-block
component of the inverse is determined by components with fewer blocks,
because every other term of the composition sum only involves inner
components on proper subgroups.
"""

from .cubecat import (
    IndexSet,
    Partition,
    coarsen,
    full_set,
    nonempty_subsets,
    partitions,
)
from .errors import DimensionMismatch, SingularMatrix
from .exactlin import (
    MultiTensor,
    compose_tensors,
    invert_matrix,
    vec_add,
    zero_vector,
)


class DimAssignment:
    """A dimension for every nonempty subset of {1..n}."""

    def __init__(self, n, dims):
        self.n = int(n)
        self.dims = {}
        for key, value in dims.items():
            key = IndexSet(key)
            if not key or not key.issubset(full_set(self.n)):
                raise DimensionMismatch("bad dimension key %r for n=%d" % (key, self.n))
            if int(value) < 0:
                raise DimensionMismatch("negative dimension at %r" % (key,))
            self.dims[key] = int(value)
        for subset in nonempty_subsets(full_set(self.n)):
            if subset not in self.dims:
                raise DimensionMismatch("missing dimension for %s" % (list(subset),))

    def dim(self, subset):
        return self.dims[IndexSet(subset)]

    def node_dim(self, node):
        """Total fiber dimension of the node over the absolute base."""
        node = IndexSet(node)
        return sum(d for key, d in self.dims.items() if key.issubset(node))

    def block_dims(self, partition):
        return tuple(self.dim(b) for b in Partition(partition))

    def __eq__(self, other):
        return (
            isinstance(other, DimAssignment)
            and self.n == other.n
            and self.dims == other.dims
        )

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.dims.items()))))

    def __repr__(self):
        return "DimAssignment(n=%d, %s)" % (
            self.n,
            {tuple(k): v for k, v in sorted(self.dims.items())},
        )


def singleton_dims(dims):
    """Copy of ``dims`` with every non-singleton dimension set to zero."""
    return DimAssignment(
        dims.n,
        {key: (value if len(key) == 1 else 0) for key, value in dims.dims.items()},
    )


def diagonal_dims(dims, blocks):
    """Dimensions over the cube of the given disjoint blocks.

    Axis positions follow the canonical block order; the dimension of a
    set of positions is the ambient dimension of the union of the
    corresponding blocks.
    """
    blocks = tuple(Partition(blocks))
    k = len(blocks)
    new = {}
    for nu in nonempty_subsets(full_set(k)):
        union = IndexSet()
        for pos in nu:
            union = union.union(blocks[pos - 1])
        new[nu] = dims.dim(union)
    return DimAssignment(k, new)


class Gauge:
    """A complete family of components from one DimAssignment to another."""

    def __init__(self, source_dims, target_dims, components):
        if source_dims.n != target_dims.n:
            raise DimensionMismatch("source and target live over different cubes")
        self.n = source_dims.n
        self.source_dims = source_dims
        self.target_dims = target_dims
        self.components = {}
        for subset in nonempty_subsets(full_set(self.n)):
            for rho in partitions(subset):
                tensor = components.get((subset, rho))
                in_dims = source_dims.block_dims(rho)
                out_dim = target_dims.dim(subset)
                if tensor is None:
                    tensor = MultiTensor.zeros(out_dim, in_dims)
                if tensor.out_dim != out_dim or tensor.in_dims != in_dims:
                    raise DimensionMismatch(
                        "component (%s, %s) has shape %dx%s, expected %dx%s"
                        % (list(subset), [list(b) for b in rho],
                           tensor.out_dim, list(tensor.in_dims),
                           out_dim, list(in_dims))
                    )
                self.components[(subset, rho)] = tensor

    def component(self, subset, rho):
        return self.components[(IndexSet(subset), Partition(rho))]

    def linear_part(self, subset):
        subset = IndexSet(subset)
        return self.components[(subset, Partition([subset]))]

    def is_square(self):
        return self.source_dims == self.target_dims

    def is_identity(self):
        if not self.is_square():
            return False
        for (subset, rho), tensor in self.components.items():
            if len(rho) == 1:
                if not tensor.is_identity():
                    return False
            elif not tensor.is_zero():
                return False
        return True

    def is_statomorphism(self):
        """Identity one-block parts over equal dims; nonlinear parts free."""
        if not self.is_square():
            return False
        return all(
            self.components[(subset, Partition([subset]))].is_identity()
            for subset in nonempty_subsets(full_set(self.n))
        )

    def is_block_diagonal(self):
        return all(
            tensor.is_zero()
            for (subset, rho), tensor in self.components.items()
            if len(rho) > 1
        )

    def evaluate(self, vectors):
        """Apply the family to per-subset input vectors.

        ``vectors`` maps each nonempty subset of some node to its
        coordinate vector; the support must be downward closed (all
        nonempty subsets of a fixed node), which makes every partition
        block available.
        """
        support = {IndexSet(k): tuple(v) for k, v in vectors.items()}
        for subset, vec in support.items():
            if len(vec) != self.source_dims.dim(subset):
                raise DimensionMismatch(
                    "input at %s has length %d, expected %d"
                    % (list(subset), len(vec), self.source_dims.dim(subset))
                )
        out = {}
        for subset in support:
            acc = zero_vector(self.target_dims.dim(subset))
            for rho in partitions(subset):
                args = [support[b] for b in rho]
                acc = vec_add(acc, self.components[(subset, rho)].apply(args))
            out[subset] = acc
        return out

    def compose(self, other):
        """The gauge acting as ``self`` after ``other``."""
        if other.target_dims != self.source_dims:
            raise DimensionMismatch("middle dimensions do not match")
        components = {}
        for subset in nonempty_subsets(full_set(self.n)):
            for rho in partitions(subset):
                k = len(rho)
                total_in = other.source_dims.block_dims(rho)
                acc = MultiTensor.zeros(self.target_dims.dim(subset), total_in)
                for grouping in partitions(full_set(k)):
                    coarse = coarsen(rho, grouping)
                    outer = self.components[(subset, coarse)]
                    inners = []
                    slot_groups = []
                    for group in grouping:
                        positions = [pos - 1 for pos in group]
                        group_blocks = Partition([rho[pos] for pos in positions])
                        union = group_blocks.ground
                        inners.append(other.components[(union, group_blocks)])
                        slot_groups.append(positions)
                    term = compose_tensors(outer, inners, slot_groups, total_in)
                    acc = acc.plus(term)
                components[(subset, rho)] = acc
        return Gauge(other.source_dims, self.target_dims, components)

    def invert(self):
        """Two-sided inverse; requires invertible one-block parts."""
        if not self.is_square():
            raise DimensionMismatch("only square gauges invert")
        inv_linear = {}
        for subset in nonempty_subsets(full_set(self.n)):
            tensor = self.linear_part(subset)
            try:
                inv_linear[subset] = invert_matrix(tensor)
            except SingularMatrix:
                raise SingularMatrix(
                    "one-block part at %s is singular" % (list(subset),)
                )
        components = {}
        for subset in nonempty_subsets(full_set(self.n)):
            trivial = Partition([subset])
            components[(subset, trivial)] = inv_linear[subset]
            for rho in partitions(subset):
                k = len(rho)
                if k == 1:
                    continue
                total_in = self.source_dims.block_dims(rho)
                residue = MultiTensor.zeros(self.target_dims.dim(subset), total_in)
                for grouping in partitions(full_set(k)):
                    if len(grouping) == 1:
                        continue  # the unknown term, solved for below
                    coarse = coarsen(rho, grouping)
                    outer = self.components[(subset, coarse)]
                    inners = []
                    slot_groups = []
                    for group in grouping:
                        positions = [pos - 1 for pos in group]
                        group_blocks = Partition([rho[pos] for pos in positions])
                        inners.append(components[(group_blocks.ground, group_blocks)])
                        slot_groups.append(positions)
                    residue = residue.plus(
                        compose_tensors(outer, inners, slot_groups, total_in)
                    )
                solved = compose_tensors(
                    inv_linear[subset].scaled(-1), [residue],
                    [list(range(k))], total_in,
                )
                components[(subset, rho)] = solved
        return Gauge(self.source_dims, self.target_dims, components)

    def diagonal_restrict(self, blocks):
        """Restrict to targets and partitions built from unions of blocks.

        The result is a gauge over the cube whose axis i is the i-th
        block in canonical order; components come from the ambient
        components at the corresponding unions.  This realizes both face
        restriction (singleton blocks) and core reindexing.
        """
        blocks = tuple(Partition(blocks))
        k = len(blocks)
        src = diagonal_dims(self.source_dims, blocks)
        tgt = diagonal_dims(self.target_dims, blocks)
        components = {}
        for nu in nonempty_subsets(full_set(k)):
            target_union = IndexSet()
            for pos in nu:
                target_union = target_union.union(blocks[pos - 1])
            for sigma in partitions(nu):
                big_blocks = []
                for part in sigma:
                    union = IndexSet()
                    for pos in part:
                        union = union.union(blocks[pos - 1])
                    big_blocks.append(union)
                ambient = self.components[(target_union, Partition(big_blocks))]
                components[(nu, sigma)] = ambient
        return Gauge(src, tgt, components)

    def __eq__(self, other):
        return (
            isinstance(other, Gauge)
            and self.source_dims == other.source_dims
            and self.target_dims == other.target_dims
            and self.components == other.components
        )

    def __hash__(self):
        return hash((self.source_dims, self.target_dims,
                     tuple(sorted(self.components.items(),
                                  key=lambda kv: (kv[0][0], kv[0][1])))))

    def __repr__(self):
        return "Gauge(n=%d)" % self.n


def identity_gauge(dims):
    components = {}
    for subset in nonempty_subsets(full_set(dims.n)):
        components[(subset, Partition([subset]))] = MultiTensor.identity(dims.dim(subset))
    return Gauge(dims, dims, components)


def reorder_inputs(tensor, new_to_old):
    """Permute the input blocks of a tensor.

    ``new_to_old[m]`` is the old position feeding new slot ``m``.
    """
    k = len(tensor.in_dims)
    assert sorted(new_to_old) == list(range(k))
    new_in = tuple(tensor.in_dims[o] for o in new_to_old)
    entries = []
    for i0 in range(tensor.out_dim):
        for new_idx in _all_indices(new_in):
            old_idx = [0] * k
            for m, o in enumerate(new_to_old):
                old_idx[o] = new_idx[m]
            entries.append(tensor.entry(i0, old_idx))
    return MultiTensor(tensor.out_dim, new_in, entries)


def _all_indices(dims):
    if not dims:
        yield ()
        return
    for i in range(dims[0]):
        for rest in _all_indices(dims[1:]):
            yield (i,) + rest


def permute_gauge(gauge, mapping):
    """Relabel the cube axes of a square-shaped index permutation.

    ``mapping`` is a bijection on {1..n}.  Canonical block order may
    change under relabeling, so tensor input slots are reordered to
    match.
    """
    n = gauge.n
    assert sorted(mapping) == list(range(1, n + 1))
    assert sorted(mapping.values()) == list(range(1, n + 1))

    def relabel_set(subset):
        return IndexSet(mapping[i] for i in subset)

    src = DimAssignment(n, {relabel_set(k): v for k, v in gauge.source_dims.dims.items()})
    tgt = DimAssignment(n, {relabel_set(k): v for k, v in gauge.target_dims.dims.items()})
    components = {}
    for (subset, rho), tensor in gauge.components.items():
        new_subset = relabel_set(subset)
        images = [relabel_set(b) for b in rho]
        new_rho = Partition(images)
        # position in new canonical order -> position among images
        new_to_old = [images.index(block) for block in new_rho]
        components[(new_subset, new_rho)] = reorder_inputs(tensor, new_to_old)
    return Gauge(src, tgt, components)
