"""Elements, fiber operations, morphisms, and functorial constructions.

An element is a chart-relative coordinate tuple; equality is decided by
transporting to the canonical (least) chart of its base point, which
gives the quotient semantics a normal form.  Within a fixed chart every
fiber operation is the coordinatewise one; all twisting lives in the
transitions.
"""

from fractions import Fraction

from .atlas import AtlasPresentation, decomposed
from .cubecat import (
    IndexSet,
    Partition,
    full_set,
    nonempty_subsets,
    partitions,
    subsets,
)
from .errors import DimensionMismatch, InvalidInput
from .exactlin import MultiTensor, vec_add, vec_scale, zero_vector
from .gauge import DimAssignment, Gauge, identity_gauge


class BundleElement:
    """A point of a node, in the coordinates of one chart."""

    def __init__(self, node, chart, point, components):
        self.node = IndexSet(node)
        self.chart = str(chart)
        self.point = str(point)
        comps = {}
        for key, vec in components.items():
            key = IndexSet(key)
            if not key or not key.issubset(self.node):
                raise InvalidInput("component %s outside node %s" % (list(key), list(self.node)))
            comps[key] = tuple(Fraction(x) for x in vec)
        for key in nonempty_subsets(self.node):
            if key not in comps:
                raise InvalidInput("missing component at %s" % (list(key),))
        self.components = comps

    def component(self, subset):
        return self.components[IndexSet(subset)]

    def __eq__(self, other):
        """Chart-literal equality; use ``elements_equal`` for quotient equality."""
        return (
            isinstance(other, BundleElement)
            and self.node == other.node
            and self.chart == other.chart
            and self.point == other.point
            and self.components == other.components
        )

    def __repr__(self):
        return "BundleElement(node=%s, chart=%r, point=%r)" % (
            list(self.node), self.chart, self.point,
        )


def element(presentation, node, chart, point, components):
    node = IndexSet(node)
    if not node.issubset(full_set(presentation.n)):
        raise InvalidInput("node outside the cube")
    if point not in presentation.chart(chart).domain:
        raise InvalidInput("point %r outside chart %r" % (point, chart))
    e = BundleElement(node, chart, point, components)
    for key, vec in e.components.items():
        if len(vec) != presentation.dims.dim(key):
            raise DimensionMismatch(
                "component %s has length %d, expected %d"
                % (list(key), len(vec), presentation.dims.dim(key))
            )
    return e


def zero_element(presentation, node, point, chart=None):
    chart = chart or presentation.canonical_chart(point)
    comps = {
        s: zero_vector(presentation.dims.dim(s))
        for s in nonempty_subsets(IndexSet(node))
    }
    return element(presentation, node, chart, point, comps)


def transport(presentation, elem, to_chart):
    """Rewrite an element in another chart containing its point."""
    if elem.chart == to_chart:
        return elem
    g = presentation.transition(to_chart, elem.chart, elem.point)
    out = g.evaluate(elem.components)
    return element(presentation, elem.node, to_chart, elem.point, out)


def canonicalize(presentation, elem):
    return transport(presentation, elem, presentation.canonical_chart(elem.point))


def elements_equal(presentation, e1, e2):
    if e1.node != e2.node or e1.point != e2.point:
        return False
    return canonicalize(presentation, e1) == canonicalize(presentation, e2)


def project(presentation, elem, axis):
    """Drop every component containing the axis."""
    if axis not in elem.node:
        raise InvalidInput("axis %d not in node %s" % (axis, list(elem.node)))
    node = elem.node.difference([axis])
    comps = {k: v for k, v in elem.components.items() if axis not in k}
    return element(presentation, node, elem.chart, elem.point, comps)


def project_to(presentation, elem, node):
    out = elem
    for axis in elem.node.difference(node):
        out = project(presentation, out, axis)
    return out


def _common_chart(presentation, e1, e2):
    if e1.point != e2.point:
        raise InvalidInput("elements over different base points")
    if e1.chart == e2.chart:
        return e1, e2
    chart = presentation.canonical_chart(e1.point)
    return transport(presentation, e1, chart), transport(presentation, e2, chart)


def add(presentation, e1, e2, axis):
    """Fiberwise sum in the bundle structure over the axis-dropped node."""
    if e1.node != e2.node:
        raise InvalidInput("nodes differ")
    if axis not in e1.node:
        raise InvalidInput("axis %d not in node" % axis)
    e1, e2 = _common_chart(presentation, e1, e2)
    for key in e1.components:
        if axis not in key and e1.components[key] != e2.components[key]:
            raise InvalidInput(
                "fiber mismatch over axis %d at component %s" % (axis, list(key))
            )
    comps = {
        k: (vec_add(v, e2.components[k]) if axis in k else v)
        for k, v in e1.components.items()
    }
    return element(presentation, e1.node, e1.chart, e1.point, comps)


def scale(presentation, scalar, elem, axis):
    if axis not in elem.node:
        raise InvalidInput("axis %d not in node" % axis)
    comps = {
        k: (vec_scale(scalar, v) if axis in k else v)
        for k, v in elem.components.items()
    }
    return element(presentation, elem.node, elem.chart, elem.point, comps)


def zero_lift(presentation, elem, node):
    """Extend by zero slots; all factorizations through intermediate
    zero sections agree with this in any chart."""
    node = IndexSet(node)
    if not elem.node.issubset(node):
        raise InvalidInput("can only lift to a supernode")
    comps = dict(elem.components)
    for key in nonempty_subsets(node):
        if key not in comps:
            comps[key] = zero_vector(presentation.dims.dim(key))
    return element(presentation, node, elem.chart, elem.point, comps)


class BundleMorphism:
    """A natural transformation stored as per-chart per-point gauges.

    Source and target share the base and the chart system; ``data``
    holds, for every (chart, point) with the point in the chart domain,
    a gauge from source dims to target dims expressing the morphism in
    that chart on both sides.
    """

    def __init__(self, source, target, data):
        if not source.same_chart_system(target):
            raise InvalidInput("morphisms need a shared base and chart system")
        self.source = source
        self.target = target
        self.data = dict(data)
        for c in source.charts:
            for p in c.domain:
                g = self.data.get((c.id, p))
                if g is None:
                    raise InvalidInput("missing morphism data at (%r, %r)" % (c.id, p))
                if g.source_dims != source.dims or g.target_dims != target.dims:
                    raise DimensionMismatch("morphism data shape mismatch at (%r, %r)" % (c.id, p))

    def gauge_at(self, chart, point):
        return self.data[(chart, point)]

    def apply(self, elem):
        g = self.data[(elem.chart, elem.point)]
        out = g.evaluate(elem.components)
        return element(self.target, elem.node, elem.chart, elem.point, out)

    def is_natural(self):
        """Target transition after data equals data after source transition."""
        for p in self.source.base:
            at = self.source.charts_at(p)
            for ca in at:
                for cb in at:
                    left = self.target.transition(cb, ca, p).compose(self.data[(ca, p)])
                    right = self.data[(cb, p)].compose(self.source.transition(cb, ca, p))
                    if left != right:
                        return False
        return True

    def compose(self, other):
        if other.target is not self.source and not (
            other.target.same_chart_system(self.source)
            and other.target.dims == self.source.dims
        ):
            raise InvalidInput("morphisms do not chain")
        data = {
            key: g.compose(other.data[key]) for key, g in self.data.items()
        }
        return BundleMorphism(other.source, self.target, data)

    def invert(self):
        data = {key: g.invert() for key, g in self.data.items()}
        return BundleMorphism(self.target, self.source, data)

    def is_fiberwise_bijective(self):
        from .exactlin import rank
        for g in self.data.values():
            for subset in nonempty_subsets(full_set(self.source.n)):
                lin = g.linear_part(subset)
                if lin.out_dim != lin.in_dims[0] or rank(lin) != lin.out_dim:
                    return False
        return True

    def __eq__(self, other):
        return (
            isinstance(other, BundleMorphism)
            and self.data == other.data
            and self.source.dims == other.source.dims
            and self.target.dims == other.target.dims
        )

    def __repr__(self):
        return "BundleMorphism(n=%d, entries=%d)" % (self.source.n, len(self.data))


def identity_morphism(presentation):
    ident = identity_gauge(presentation.dims)
    data = {
        (c.id, p): ident for c in presentation.charts for p in c.domain
    }
    return BundleMorphism(presentation, presentation, data)


def morphism_from_canonical(source, target, family):
    """Extend per-point canonical-chart gauges to all charts by naturality."""
    data = {}
    for c in source.charts:
        for p in c.domain:
            can = source.canonical_chart(p)
            g = family[p]
            data[(c.id, p)] = target.transition(c.id, can, p).compose(g).compose(
                source.transition(can, c.id, p))
    return BundleMorphism(source, target, data)


def _grouped_offsets(ambient_dims, core_part, frozen_set):
    """Offsets of the frozen-slot summands inside a grouped dimension."""
    offsets = {}
    total = 0
    for sub in subsets(frozen_set):
        offsets[sub] = total
        total += ambient_dims.dim(core_part.union(sub))
    return offsets, total


def face(presentation, outer, inner):
    """The sub-bundle on nodes between ``inner`` and ``outer``.

    With ``inner`` empty this is the literal restriction to the
    sub-cube: slots and transitions indexed by subsets of ``outer``.
    With ``inner`` nonempty the face is an (#outer - #inner)-fold
    bundle over the inner node, whose fiber coordinates along the free
    axes group every ambient slot meeting them; the inner coordinates
    are frozen parameters, modeled here along the zero section, so all
    transition terms fed by purely inner slots drop out.
    """
    a = presentation
    outer, inner = IndexSet(outer), IndexSet(inner)
    if not inner.issubset(outer) or not outer.issubset(full_set(a.n)):
        raise InvalidInput("need inner <= outer <= full cube")
    free = sorted(outer.difference(inner))
    m = len(free)
    relabel = {axis: pos + 1 for pos, axis in enumerate(free)}
    unlabel = {pos + 1: axis for pos, axis in enumerate(free)}
    if m == 0:
        dims0 = DimAssignment(0, {})
        empty = Gauge(dims0, dims0, {})
        transitions = {key: empty for key in a.transitions}
        return AtlasPresentation(0, dims0, a.base, a.charts, transitions)

    frozen_subsets = subsets(inner)

    new_dims = {}
    for nu in nonempty_subsets(full_set(m)):
        core_part = IndexSet(unlabel[i] for i in nu)
        new_dims[nu] = sum(a.dims.dim(core_part.union(s)) for s in frozen_subsets)
    face_dims = DimAssignment(m, new_dims)

    def face_gauge(ambient):
        components = {}
        for nu in nonempty_subsets(full_set(m)):
            target_core = IndexSet(unlabel[i] for i in nu)
            out_offsets, out_dim = _grouped_offsets(a.dims, target_core, inner)
            for sigma in partitions(nu):
                blocks_core = [IndexSet(unlabel[i] for i in b) for b in sigma]
                in_offsets = []
                in_dims = []
                for bc in blocks_core:
                    offs, total = _grouped_offsets(a.dims, bc, inner)
                    in_offsets.append(offs)
                    in_dims.append(total)
                entries = [Fraction(0)] * (out_dim * _prod(in_dims))
                for out_sub in frozen_subsets:
                    target_full = target_core.union(out_sub)
                    d_out = a.dims.dim(target_full)
                    if d_out == 0:
                        continue
                    for in_subs in _disjoint_covers(out_sub, len(sigma), frozen_subsets):
                        blocks_full = [bc.union(s) for bc, s in zip(blocks_core, in_subs)]
                        amb = ambient.components[(target_full, Partition(blocks_full))]
                        order = list(Partition(blocks_full))
                        slot_of = [order.index(b) for b in blocks_full]
                        dims_full = [a.dims.dim(b) for b in blocks_full]
                        if any(d == 0 for d in dims_full):
                            continue
                        for o in range(d_out):
                            for idx in _indices(dims_full):
                                amb_idx = [0] * len(blocks_full)
                                for pos, b in enumerate(idx):
                                    amb_idx[slot_of[pos]] = b
                                val = amb.entry(o, amb_idx)
                                if not val:
                                    continue
                                flat = out_offsets[out_sub] + o
                                for pos in range(len(sigma)):
                                    flat = flat * in_dims[pos] + (
                                        in_offsets[pos][in_subs[pos]] + idx[pos])
                                entries[flat] += val
                components[(nu, sigma)] = MultiTensor(out_dim, in_dims, entries)
        return Gauge(face_dims, face_dims, components)

    transitions = {key: face_gauge(g) for key, g in a.transitions.items()}
    return AtlasPresentation(
        m, face_dims, a.base, a.charts, transitions,
        axis_blocks=tuple(IndexSet([axis]) for axis in free),
    )


def _prod(values):
    out = 1
    for v in values:
        out *= v
    return out


def _indices(dims):
    if not dims:
        yield ()
        return
    for i in range(dims[0]):
        for rest in _indices(dims[1:]):
            yield (i,) + rest


def _disjoint_covers(target, count, pool):
    """All assignments of ``count`` disjoint pool members covering target."""
    if count == 0:
        if not target:
            yield ()
        return
    for first in pool:
        if first.issubset(target):
            rest = target.difference(first)
            for tail in _disjoint_covers(rest, count - 1, pool):
                yield (first,) + tail


def hom_dims(e_dims, f_dims):
    """Slot dimensions of the morphism bundle: one summand per partition."""
    if e_dims.n != f_dims.n:
        raise DimensionMismatch("cube dimensions differ")
    out = {}
    for subset in nonempty_subsets(full_set(e_dims.n)):
        total = 0
        for rho in partitions(subset):
            term = f_dims.dim(subset)
            for block in rho:
                term *= e_dims.dim(block)
            total += term
        out[subset] = total
    return DimAssignment(e_dims.n, out)


def hom_bundle(e_pres, f_pres):
    """The bundle of pointwise morphisms, emitted in decomposed form.

    Each slot at J concatenates, over the partitions of J in
    enumeration order, the flattened component tensors of a pointwise
    morphism expressed in the canonical charts of its base point.
    """
    if e_pres.base != f_pres.base:
        raise InvalidInput("morphism bundle needs a common base")
    if e_pres.n != f_pres.n:
        raise InvalidInput("morphism bundle needs equal cube dimension")
    return decomposed(hom_dims(e_pres.dims, f_pres.dims), e_pres.base)


def hom_decode(e_pres, f_pres, hom_elem):
    """Per-subset tensors encoded in a morphism-bundle element."""
    out = {}
    for subset in nonempty_subsets(hom_elem.node):
        vec = hom_elem.components[subset]
        pos = 0
        for rho in partitions(subset):
            o = f_pres.dims.dim(subset)
            ins = e_pres.dims.block_dims(rho)
            size = o * _prod(ins)
            out[(subset, rho)] = MultiTensor(o, ins, vec[pos:pos + size])
            pos += size
        if pos != len(vec):
            raise DimensionMismatch("morphism slot at %s has wrong length" % (list(subset),))
    return out


def hom_encode(e_pres, f_pres, node, point, tensors):
    """Inverse of ``hom_decode``; builds the morphism-bundle element."""
    h = hom_bundle(e_pres, f_pres)
    comps = {}
    for subset in nonempty_subsets(IndexSet(node)):
        vec = []
        for rho in partitions(subset):
            vec.extend(tensors[(subset, rho)].entries)
        comps[subset] = tuple(vec)
    return element(h, node, h.charts[0].id, point, comps)


def hom_apply(e_pres, f_pres, hom_elem, elem):
    """Evaluate a pointwise morphism on an element of the source bundle."""
    if elem.point != hom_elem.point:
        raise InvalidInput("morphism and element over different points")
    if not elem.node.issubset(hom_elem.node):
        raise InvalidInput("element node outside the morphism node")
    tensors = hom_decode(e_pres, f_pres, hom_elem)
    e_can = canonicalize(e_pres, elem)
    comps = {}
    for subset in nonempty_subsets(elem.node):
        acc = zero_vector(f_pres.dims.dim(subset))
        for rho in partitions(subset):
            args = [e_can.components[b] for b in rho]
            acc = vec_add(acc, tensors[(subset, rho)].apply(args))
        comps[subset] = acc
    return element(
        f_pres, elem.node, f_pres.canonical_chart(elem.point), elem.point, comps,
    )


def tangent_prolongation(presentation):
    """One more cube axis carrying the fiber-derivative slots.

    Over a discrete base the derivative of a transition in the base
    directions vanishes, so the lifted transition repeats each component
    once per choice of the block that absorbs the new axis; the new
    singleton slot has dimension zero.  This limitation is inherent to
    locally constant data and is part of the model.
    """
    a = presentation
    n1 = a.n + 1
    new_axis = n1
    dims = {}
    for subset in nonempty_subsets(full_set(n1)):
        if new_axis not in subset:
            dims[subset] = a.dims.dim(subset)
        elif len(subset) == 1:
            dims[subset] = 0
        else:
            dims[subset] = a.dims.dim(subset.difference([new_axis]))
    t_dims = DimAssignment(n1, dims)

    def lift_gauge(g):
        comps = {}
        for (subset, rho), tensor in g.components.items():
            comps[(subset, rho)] = tensor
            for pos, block in enumerate(rho):
                new_blocks = [
                    b if i != pos else b.union([new_axis]) for i, b in enumerate(rho)
                ]
                comps[(subset.union([new_axis]), Partition(new_blocks))] = tensor
        return Gauge(t_dims, t_dims, comps)

    transitions = {key: lift_gauge(g) for key, g in a.transitions.items()}
    return AtlasPresentation(n1, t_dims, a.base, a.charts, transitions)
