"""Cores, the n-pullback, and the ultracore exact sequence.

A core at (S, J) consists of the elements of the S-node whose chart
coordinates vanish on every slot that meets J without containing it;
the surviving slots are exactly the unions of blocks of the diagonal
partition {J, singletons of S minus J}.  Since disjoint unions of such
slots are again such slots, transitions preserve the core
componentwise; the restriction is nevertheless re-checked against
ambient evaluation on basis elements rather than assumed.

Core presentations reuse the ambient charts, which keeps the induced
morphism of a core a literal restriction of the ambient data.
"""

from fractions import Fraction

from .atlas import AtlasPresentation
from .bundle import (
    BundleMorphism,
    add,
    canonicalize,
    element,
    elements_equal,
    project_to,
    zero_element,
    zero_lift,
)
from .certify import Certificate
from .cubecat import (
    DiagonalPartition,
    IndexSet,
    Partition,
    full_set,
    is_union_of_blocks,
    nonempty_subsets,
    partitions,
    subsets,
)
from .errors import InvalidInput
from .exactlin import MultiTensor, kernel_basis, rank, zero_vector
from .gauge import DimAssignment, Gauge, diagonal_dims


class CoreSpec:
    """The pair (S, J) with its diagonal reindexing."""

    def __init__(self, ambient, inner):
        self.ambient = IndexSet(ambient)
        self.inner = IndexSet(inner)
        if not self.inner or not self.inner.issubset(self.ambient):
            raise InvalidInput("core needs a nonempty inner subset of the ambient node")
        self.reindexing = DiagonalPartition(self.ambient, self.inner)

    @property
    def blocks(self):
        return self.reindexing.blocks

    def __repr__(self):
        return "CoreSpec(S=%s, J=%s)" % (list(self.ambient), list(self.inner))


def partition_core(presentation, ambient, blocks, check=False):
    """The sub-bundle of union-of-blocks slots, as a presentation over
    the cube with one axis per block (canonical order)."""
    a = presentation
    ambient = IndexSet(ambient)
    blocks = Partition(blocks)
    if blocks.ground != ambient:
        raise InvalidInput("blocks must partition the ambient node")
    if not ambient.issubset(full_set(a.n)):
        raise InvalidInput("ambient node outside the cube")
    dims = diagonal_dims(a.dims, blocks)
    transitions = {
        key: g.diagonal_restrict(blocks) for key, g in a.transitions.items()
    }
    out = AtlasPresentation(len(blocks), dims, a.base, a.charts, transitions,
                            axis_blocks=tuple(blocks))
    if check:
        cert = core_closure_certificate(a, ambient, blocks)
        if not cert.passed:
            raise InvalidInput("core restriction failed to match ambient evaluation")
    return out


def core(presentation, ambient, inner, check=True):
    """The (ambient, inner)-core presentation with its CoreSpec."""
    spec = CoreSpec(ambient, inner)
    pres = partition_core(presentation, spec.ambient, spec.blocks, check=check)
    return spec, pres


def embed_core_element(presentation, blocks, core_elem):
    """View a core element as an ambient element with zero filled in."""
    blocks = tuple(Partition(blocks))
    node = IndexSet(i for pos in core_elem.node for i in blocks[pos - 1])
    comps = {}
    for key in nonempty_subsets(node):
        comps[key] = zero_vector(presentation.dims.dim(key))
    for nu, vec in core_elem.components.items():
        union = IndexSet(i for pos in nu for i in blocks[pos - 1])
        comps[union] = vec
    return element(presentation, node, core_elem.chart, core_elem.point, comps)


def restrict_core_element(presentation, core_pres, ambient_elem):
    """Inverse of the embedding; requires core membership."""
    blocks = core_pres.axis_blocks
    e = canonicalize(presentation, ambient_elem)
    comps = {}
    for key, vec in e.components.items():
        if is_union_of_blocks(key, blocks):
            positions = IndexSet(
                pos + 1 for pos, b in enumerate(blocks) if set(b) <= set(key)
            )
            if positions:
                comps[positions] = vec
        elif any(x != 0 for x in vec):
            raise InvalidInput("element is not in the core: slot %s nonzero" % (list(key),))
    node = IndexSet(
        pos + 1 for pos, b in enumerate(blocks) if set(b) <= set(e.node)
    )
    return element(core_pres, node, e.chart, e.point, comps)


def is_core_member(presentation, elem, inner):
    """Membership of an S-node element in the (S, inner)-core."""
    inner = IndexSet(inner)
    e = canonicalize(presentation, elem)
    for key, vec in e.components.items():
        meets = not key.isdisjoint(inner)
        contains = inner.issubset(key)
        if meets and not contains and any(x != 0 for x in vec):
            return False
    return True


def is_diagonal_core_member(presentation, elem, blocks):
    """Membership in the sub-bundle of union-of-blocks slots."""
    blocks = Partition(blocks)
    e = canonicalize(presentation, elem)
    for key, vec in e.components.items():
        if not is_union_of_blocks(key, blocks) and any(x != 0 for x in vec):
            return False
    return True


def in_zero_image(presentation, elem, kept):
    """Membership in the image of the zero section from the kept node."""
    kept = IndexSet(kept)
    e = canonicalize(presentation, elem)
    for key, vec in e.components.items():
        if not key.issubset(kept) and any(x != 0 for x in vec):
            return False
    return True


def core_closure_certificate(presentation, ambient, blocks):
    """Check that restricted transitions reproduce ambient evaluation.

    For every transition and every component of the core gauge, basis
    elements supported on the component's blocks are pushed through the
    ambient gauge; the output must agree on union slots and vanish
    elsewhere.
    """
    a = presentation
    blocks = Partition(blocks)
    core_dims = diagonal_dims(a.dims, blocks)
    k = len(blocks)
    witnesses = []
    for (dst, src, p), g in sorted(a.transitions.items()):
        sub = g.diagonal_restrict(blocks)
        for nu in nonempty_subsets(full_set(k)):
            for rho in partitions(nu):
                for basis in _basis_tuples(core_dims, rho):
                    small = {s: zero_vector(core_dims.dim(s))
                             for s in nonempty_subsets(full_set(k))}
                    for block_nu, vec in basis:
                        small[block_nu] = vec
                    big = {s: zero_vector(a.dims.dim(s))
                           for s in nonempty_subsets(full_set(a.n))}
                    for s_small, vec in small.items():
                        union = IndexSet(i for pos in s_small for i in blocks[pos - 1])
                        big[union] = vec
                    out_small = sub.evaluate(small)
                    out_big = g.evaluate(big)
                    for s_big, vec in out_big.items():
                        if is_union_of_blocks(s_big, blocks):
                            positions = IndexSet(
                                pos + 1 for pos, b in enumerate(blocks)
                                if set(b) <= set(s_big)
                            )
                            if out_small[positions] != vec:
                                return Certificate.failing(
                                    "core restriction reproduces ambient evaluation",
                                    {"transition": [dst, src, p],
                                     "slot": list(s_big)})
                        elif any(x != 0 for x in vec):
                            return Certificate.failing(
                                "core restriction reproduces ambient evaluation",
                                {"transition": [dst, src, p],
                                 "slot": list(s_big), "leak": True})
        witnesses.append({"transition": [dst, src, p]})
    return Certificate.passing(
        "core restriction reproduces ambient evaluation", witnesses)


def _basis_tuples(dims, rho):
    """Families assigning one basis vector to each block of rho."""
    per_block = []
    for block in rho:
        d = dims.dim(block)
        vecs = []
        for j in range(d):
            v = [0] * d
            v[j] = 1
            vecs.append(tuple(v))
        per_block.append([(block, tuple(v)) for v in vecs])
    if any(not choices for choices in per_block):
        return
    def rec(i):
        if i == len(per_block):
            yield ()
            return
        for choice in per_block[i]:
            for rest in rec(i + 1):
                yield (choice,) + rest
    yield from rec(0)


def core_by_stages(presentation, ambient, inner, first):
    """Certificate that the (S, J)-core equals the core-of-core via K.

    Checks (a) the two derived presentations agree under the identity
    reindexing and (b) the direct membership predicate matches the
    staged one on basis and random samples.
    """
    import random as _random
    a = presentation
    s_set, j_set, k_set = IndexSet(ambient), IndexSet(inner), IndexSet(first)
    if not (k_set and k_set.issubset(j_set) and j_set.issubset(s_set)):
        raise InvalidInput("need nonempty first <= inner <= ambient")

    direct_spec, direct = core(a, s_set, j_set, check=False)
    stage1_spec, stage1 = core(a, s_set, k_set, check=False)
    # positions of the stage-1 axes that the second stage merges
    merged_positions = IndexSet(
        pos + 1 for pos, b in enumerate(stage1.axis_blocks)
        if set(b) <= set(j_set)
    )
    stage2_spec, stage2 = core(stage1, full_set(stage1.n), merged_positions, check=False)

    if stage2.dims != direct.dims or stage2.transitions != direct.transitions:
        return Certificate.failing(
            "core constructed by stages", {"ambient": list(s_set),
                                           "inner": list(j_set),
                                           "first": list(k_set)})

    rng = _random.Random(2024)
    samples = []
    from .rand import random_element
    for _ in range(12):
        samples.append(random_element(rng, a, node=s_set))
    for _ in range(12):
        e = random_element(rng, a, node=s_set)
        comps = {
            key: (vec if is_union_of_blocks(key, direct_spec.blocks)
                  else zero_vector(len(vec)))
            for key, vec in e.components.items()
        }
        samples.append(element(a, s_set, e.chart, e.point, comps))

    checked = 0
    for e in samples:
        direct_member = is_core_member(a, e, j_set)
        staged = is_core_member(a, e, k_set)
        if staged:
            ec = canonicalize(a, e)
            for j in j_set.difference(k_set):
                proj = project_to(a, ec, ec.node.difference([j]))
                if not in_zero_image(a, proj, s_set.difference(j_set)):
                    staged = False
                    break
            if staged:
                bottom = project_to(a, ec, s_set.difference(k_set))
                staged = in_zero_image(a, bottom, s_set.difference(j_set))
        if staged != direct_member:
            return Certificate.failing(
                "core constructed by stages",
                {"point": e.point, "chart": e.chart,
                 "direct": direct_member, "staged": staged})
        checked += 1
    return Certificate.passing(
        "core constructed by stages",
        [{"samples": checked, "presentations_equal": True}])


def core_morphism(tau, ambient, inner):
    """Restrict a natural morphism to the (ambient, inner)-cores."""
    if not tau.is_natural():
        raise InvalidInput("core restriction needs a natural morphism")
    spec = CoreSpec(ambient, inner)
    src = partition_core(tau.source, spec.ambient, spec.blocks, check=False)
    tgt = partition_core(tau.target, spec.ambient, spec.blocks, check=False)
    data = {
        key: g.diagonal_restrict(spec.blocks) for key, g in tau.data.items()
    }
    return BundleMorphism(src, tgt, data)


class PullbackPresentation:
    """The n-pullback with its projection from the total bundle."""

    def __init__(self, presentation, projection, certificate):
        self.presentation = presentation
        self.projection = projection
        self.certificate = certificate


def _drop_top_dims(dims):
    top = full_set(dims.n)
    return DimAssignment(
        dims.n,
        {key: (0 if key == top else value) for key, value in dims.dims.items()},
    )


def fiber_matrix(morphism, axis, base_elem):
    """Matrix of the morphism between the fibers over a base element.

    The fiber over an element of the axis-dropped node has one
    coordinate block per slot containing the axis; morphisms are linear
    on these blocks once the base slots are fixed.
    """
    src = morphism.source
    tgt = morphism.target
    n = src.n
    top = full_set(n)
    fiber_slots = [s for s in nonempty_subsets(top) if axis in s]
    src_cols = []
    for slot in fiber_slots:
        for j in range(src.dims.dim(slot)):
            src_cols.append((slot, j))
    tgt_rows = []
    for slot in fiber_slots:
        for i in range(tgt.dims.dim(slot)):
            tgt_rows.append((slot, i))

    lifted = zero_lift(src, base_elem, top)
    columns = []
    for slot, j in src_cols:
        comps = dict(lifted.components)
        v = [0] * src.dims.dim(slot)
        v[j] = 1
        comps[slot] = tuple(v)
        image = morphism.apply(element(src, top, lifted.chart, lifted.point, comps))
        col = []
        for tslot, i in tgt_rows:
            col.append(image.components[tslot][i])
        columns.append(col)
    rows = [[columns[c][r] for c in range(len(src_cols))] for r in range(len(tgt_rows))]
    if not rows:
        return MultiTensor.zeros(0, (len(src_cols),))
    return MultiTensor.from_rows(rows)


def pullback(presentation):
    """The pullback bundle: the total slot trivialized, projection kept.

    Fiberwise surjectivity of the projection is certified by rank
    computations over sampled base elements in every chart.
    """
    import random as _random
    a = presentation
    n = a.n
    top = full_set(n)
    dims_p = _drop_top_dims(a.dims)

    def trim(g):
        comps = {}
        for (subset, rho), tensor in g.components.items():
            o = dims_p.dim(subset)
            ins = tuple(dims_p.dim(b) for b in rho)
            if o == tensor.out_dim and ins == tensor.in_dims:
                comps[(subset, rho)] = tensor
        return Gauge(dims_p, dims_p, comps)

    p_pres = AtlasPresentation(
        n, dims_p, a.base, a.charts,
        {key: trim(g) for key, g in a.transitions.items()},
    )

    proj_data = {}
    for c in a.charts:
        for pt in c.domain:
            comps = {}
            for subset in nonempty_subsets(top):
                if subset != top:
                    comps[(subset, Partition([subset]))] = MultiTensor.identity(
                        a.dims.dim(subset))
            proj_data[(c.id, pt)] = Gauge(a.dims, dims_p, comps)
    projection = BundleMorphism(a, p_pres, proj_data)

    rng = _random.Random(77)
    from .rand import random_element
    witnesses = []
    for c in a.charts:
        for pt in c.domain:
            for axis in range(1, n + 1):
                bases = [zero_element(a, top.difference([axis]), pt, c.id)]
                for _ in range(2):
                    bases.append(random_element(
                        rng, a, node=top.difference([axis]), point=pt, chart=c.id))
                for base_elem in bases:
                    m = fiber_matrix(projection, axis, base_elem)
                    if rank(m) != m.out_dim:
                        return PullbackPresentation(
                            p_pres, projection,
                            Certificate.failing(
                                "pullback projection fiberwise surjective",
                                {"chart": c.id, "point": pt, "axis": axis}))
            witnesses.append({"chart": c.id, "point": pt})
    certificate = Certificate.passing(
        "pullback projection fiberwise surjective", witnesses)
    return PullbackPresentation(p_pres, projection, certificate)


def ultracore_dims(dims, axis):
    """Dims of the ultracore pulled back over the axis-dropped node."""
    top = full_set(dims.n)
    out = {}
    for key, value in dims.dims.items():
        if axis not in key or key == top:
            out[key] = value
        else:
            out[key] = 0
    return DimAssignment(dims.n, out)


def ultracore_pullback_presentation(presentation, axis):
    a = presentation
    dims_q = ultracore_dims(a.dims, axis)

    def restrict_gauge(g):
        comps = {}
        for (subset, rho), tensor in g.components.items():
            o = dims_q.dim(subset)
            ins = tuple(dims_q.dim(b) for b in rho)
            if o == tensor.out_dim and ins == tensor.in_dims:
                comps[(subset, rho)] = tensor
        return Gauge(dims_q, dims_q, comps)

    return AtlasPresentation(
        a.n, dims_q, a.base, a.charts,
        {key: restrict_gauge(g) for key, g in a.transitions.items()},
    )


def ultracore_inclusion(presentation, axis):
    """The inclusion of the pulled-back ultracore over the axis side."""
    a = presentation
    top = full_set(a.n)
    q_pres = ultracore_pullback_presentation(a, axis)
    data = {}
    for c in a.charts:
        for pt in c.domain:
            comps = {}
            for subset in nonempty_subsets(top):
                if axis not in subset or subset == top:
                    comps[(subset, Partition([subset]))] = MultiTensor.identity(
                        a.dims.dim(subset))
            data[(c.id, pt)] = Gauge(q_pres.dims, a.dims, comps)
    return q_pres, BundleMorphism(q_pres, a, data)


def include_by_nested_sums(presentation, axis, core_elem, side_elem, ordering=None):
    """Rebuild a total element from an ultracore member and a side element.

    Starting from the core member, each step adds (over the next axis
    of the ordering) the zero lift of the side element's projection to
    the tail node seen so far.  The result does not depend on the
    chosen ordering of the side axes; callers may re-run with permuted
    orderings to confirm.
    """
    a = presentation
    top = full_set(a.n)
    side_axes = list(top.difference([axis]))
    if ordering is None:
        ordering = side_axes
    if sorted(ordering) != sorted(side_axes):
        raise InvalidInput("ordering must enumerate the side axes")
    if core_elem.point != side_elem.point:
        raise InvalidInput("elements over different points")
    if not is_core_member(a, core_elem, top):
        raise InvalidInput("first element is not in the ultracore")
    chart = a.canonical_chart(core_elem.point)
    from .bundle import transport
    out = transport(a, core_elem, chart)
    side = transport(a, side_elem, chart)
    n = a.n
    for l in range(1, n):
        tail = IndexSet(ordering[n - 1 - l:])
        e_tail = project_to(a, side, tail)
        out = add(a, out, zero_lift(a, e_tail, top), ordering[n - 1 - l])
    return out


def ultracore_sequence(presentation, axis):
    """The inclusion, projection, and exactness data over one side.

    Returns (inclusion morphism, projection morphism, certificate); the
    certificate carries the per-fiber rank checks, the dimension
    identity, and the ordering-independence witnesses.
    """
    import random as _random
    from itertools import permutations
    a = presentation
    n = a.n
    top = full_set(n)
    if axis not in top:
        raise InvalidInput("axis %r outside the cube" % (axis,))
    pb = pullback(presentation)
    q_pres, iota = ultracore_inclusion(a, axis)
    pi = pb.projection

    rng = _random.Random(axis * 1000 + 9)
    from .rand import random_element
    d_ultra = a.dims.dim(top)
    witnesses = []
    for c in a.charts:
        for pt in c.domain:
            bases = [zero_element(a, top.difference([axis]), pt, c.id),
                     random_element(rng, a, node=top.difference([axis]),
                                    point=pt, chart=c.id)]
            for base_elem in bases:
                m_pi = fiber_matrix(pi, axis, base_elem)
                q_base = element(q_pres, base_elem.node, base_elem.chart,
                                 base_elem.point,
                                 {k: v for k, v in base_elem.components.items()})
                m_iota = fiber_matrix(iota, axis, q_base)
                if rank(m_iota) != d_ultra:
                    return iota, pi, Certificate.failing(
                        "ultracore sequence exact",
                        {"chart": c.id, "point": pt, "reason": "inclusion not injective"})
                if rank(m_pi) != m_pi.out_dim:
                    return iota, pi, Certificate.failing(
                        "ultracore sequence exact",
                        {"chart": c.id, "point": pt, "reason": "projection not surjective"})
                columns = [tuple(r) for r in zip(*m_iota.rows())] if m_iota.out_dim else []
                for col in columns:
                    if any(x != 0 for x in m_pi.apply([col])):
                        return iota, pi, Certificate.failing(
                            "ultracore sequence exact",
                            {"chart": c.id, "point": pt,
                             "reason": "image not inside kernel"})
                kernel_dim = len(kernel_basis(m_pi))
                if kernel_dim != d_ultra:
                    return iota, pi, Certificate.failing(
                        "ultracore sequence exact",
                        {"chart": c.id, "point": pt,
                         "reason": "kernel dimension %d != ultracore %d"
                                   % (kernel_dim, d_ultra)})
            witnesses.append({"chart": c.id, "point": pt})

    total = a.dims.node_dim(top)
    p_total = pb.presentation.dims.node_dim(top)
    if total != d_ultra + p_total:
        return iota, pi, Certificate.failing(
            "ultracore sequence exact",
            {"reason": "dimension identity %d != %d + %d" % (total, d_ultra, p_total)})

    # ordering independence of the nested-sum inclusion
    side_axes = list(top.difference([axis]))
    orders = list(permutations(side_axes))
    if len(orders) > 3:
        orders = [orders[0], orders[len(orders) // 2], orders[-1]]
    pt = a.base.points[0]
    for _ in range(3):
        z = zero_element(a, top, pt)
        zc = dict(z.components)
        zc[top] = tuple(Fraction(rng.randint(-3, 3)) for _ in range(d_ultra))
        z = element(a, top, z.chart, pt, zc)
        side = random_element(rng, a, node=top.difference([axis]), point=pt)
        results = [
            include_by_nested_sums(a, axis, z, side, list(order))
            for order in orders
        ]
        for other in results[1:]:
            if not elements_equal(a, results[0], other):
                return iota, pi, Certificate.failing(
                    "ultracore sequence exact",
                    {"reason": "ordering dependence in the inclusion"})

    cert = Certificate.passing(
        "ultracore sequence exact",
        witnesses + [{"dimension_identity": [total, d_ultra, p_total]},
                     {"orderings_checked": len(orders)}])
    return iota, pi, cert
