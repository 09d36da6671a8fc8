"""Splittings, decompositions, the statomorphism torsor, normalization.

The pipeline follows the constructive existence proofs:

* Splittings are built by recursion over the cube: all proper faces are
  split first (compatibly, because every face splitting is fetched from
  a shared cache), then a per-chart right inverse of the pullback
  projection with zero top slot is linearized over the remaining axes
  by frame interpolation, and the chart-local results are pasted with a
  partition of unity over the finite base.  Over a discrete base the
  zero-top choice is already fiberwise multilinear in its own chart, so
  the interpolation is the identity there; it is still executed, and it
  does real work for any other admissible right inverse.

* A splitting plus compatible decompositions of the codimension-one
  cores determines a unique decomposition.  The chain construction
  handles one pair of merged axes at a time, writing each element as a
  sum of an already-handled part and a core part; every component of
  the result is extracted from chain evaluations on basis elements, so
  face restrictions of the output agree with the construction on faces
  by uniqueness rather than by bookkeeping.

* Full decomposition recurses over coarsenings of the axis partition.
  Every object that appears (a core of a face, a face of a core, an
  intersection of cores) is identified by the pair (ambient node, block
  partition) and split exactly once; this sharing is what makes the
  staged core decompositions compatible.
"""

from fractions import Fraction

from .atlas import (
    AtlasPresentation,
    associated_decomposed,
    associated_vacant,
    validate,
)
from .bundle import (
    BundleMorphism,
    add,
    element,
    elements_equal,
    morphism_from_canonical,
    project,
    project_to,
    zero_lift,
)
from .cores import partition_core, pullback
from .cubecat import (
    IndexSet,
    Partition,
    full_set,
    nonempty_subsets,
    partitions,
)
from .errors import InvalidInput, SemanticError
from .exactlin import MultiTensor, unit_vector, vec_add, vec_scale, zero_vector
from .gauge import Gauge, identity_gauge

STRATEGIES = ("least-chart", "uniform-average")


class Splitting(BundleMorphism):
    """A monomorphism from the vacant model, identity on singleton slots."""

    def __init__(self, source, target, data, parent=None):
        super().__init__(source, target, data)
        self.parent = parent or target


class Decomposition(BundleMorphism):
    """An isomorphism from the decomposed model, identity on every building slot."""

    def __init__(self, source, target, data, parent=None):
        super().__init__(source, target, data)
        self.parent = parent or target


def is_splitting(morphism):
    """Naturality plus identity singleton components, checked exactly."""
    if not morphism.is_natural():
        return False
    n = morphism.source.n
    for g in morphism.data.values():
        for i in range(1, n + 1):
            single = IndexSet([i])
            if not g.components[(single, Partition([single]))].is_identity():
                return False
    return True


def is_decomposition(morphism):
    """Naturality, identity building components, fiberwise bijectivity."""
    if not morphism.is_natural():
        return False
    n = morphism.source.n
    for g in morphism.data.values():
        for subset in nonempty_subsets(full_set(n)):
            if not g.linear_part(subset).is_identity():
                return False
    return morphism.is_fiberwise_bijective()


def _position_blocks(blocks, positions):
    blocks = tuple(blocks)
    return Partition([blocks[pos - 1] for pos in positions])


def _merge_blocks(blocks, positions):
    blocks = tuple(blocks)
    merged = IndexSet()
    rest = []
    for pos, b in enumerate(blocks, start=1):
        if pos in positions:
            merged = merged.union(b)
        else:
            rest.append(b)
    return Partition([merged] + rest)


def _tuples(dims):
    if not dims:
        yield ()
        return
    for j in range(dims[0]):
        for rest in _tuples(dims[1:]):
            yield (j,) + rest


def _support_element(model, chart, point, assignment):
    """Top-node element of a decomposed model supported on given slots."""
    comps = {}
    for s in nonempty_subsets(full_set(model.n)):
        comps[s] = assignment.get(s, zero_vector(model.dims.dim(s)))
    return element(model, full_set(model.n), chart, point, comps)


def _merged_slot_map(blocks, positions):
    """Maps between object slots and merged-cube slots for one merge."""
    merged_blocks = _merge_blocks(blocks, positions)
    blocks = tuple(blocks)
    old_to_new = {}
    for pos_new, block_new in enumerate(merged_blocks, start=1):
        old_positions = IndexSet(
            pos + 1 for pos, b in enumerate(blocks) if set(b) <= set(block_new)
        )
        old_to_new[old_positions] = pos_new
    return old_to_new, merged_blocks


def _to_merged(core_model, old_to_new, x):
    """Rewrite a core-supported element in merged-cube coordinates."""
    k_new = core_model.n
    comps = {s: zero_vector(core_model.dims.dim(s))
             for s in nonempty_subsets(full_set(k_new))}
    for s, vec in x.components.items():
        pieces = [p for p in old_to_new if p.issubset(s)]
        covered = IndexSet(i for p in pieces for i in p)
        if covered == s:
            comps[IndexSet(old_to_new[p] for p in pieces)] = vec
        elif any(v != 0 for v in vec):
            raise InvalidInput("element is not supported on the core")
    return element(core_model, full_set(k_new), x.chart, x.point, comps)


def _from_merged(obj, old_to_new, y):
    """Embed a merged-cube element back into the object's top node."""
    new_to_old = {new: old for old, new in old_to_new.items()}
    k = obj.n
    comps = {s: zero_vector(obj.dims.dim(s))
             for s in nonempty_subsets(full_set(k))}
    for s, vec in y.components.items():
        old = IndexSet(i for pos in s for i in new_to_old[pos])
        comps[old] = vec
    return element(obj, full_set(k), y.chart, y.point, comps)


class _Chain:
    """The staged construction of a decomposition from a splitting and
    codimension-one core decompositions, for one presentation."""

    def __init__(self, obj, sigma, core_decs, blocks, check_bracketing=False):
        self.obj = obj
        self.k = obj.n
        self.model = associated_decomposed(obj)
        self.vacant = associated_vacant(obj)
        self.sigma = sigma
        self.check_bracketing = check_bracketing
        self.pairs = sorted(
            (s for s in nonempty_subsets(full_set(self.k)) if len(s) == 2),
            key=tuple,
        )
        self.core_decs = core_decs
        self.slot_maps = {
            mu: _merged_slot_map(blocks, mu)[0] for mu in self.pairs
        }

    def _allowed(self, subset, stage):
        if len(subset) == 1:
            return True
        return any(self.pairs[i].issubset(subset) for i in range(stage))

    def vacant_part(self, x):
        comps = {
            s: (x.components[s] if len(s) == 1
                else zero_vector(self.vacant.dims.dim(s)))
            for s in nonempty_subsets(full_set(self.k))
        }
        return element(self.vacant, x.node, x.chart, x.point, comps)

    def apply(self, x, stage=None):
        stage = len(self.pairs) if stage is None else stage
        for s, vec in x.components.items():
            if not self._allowed(s, stage) and any(v != 0 for v in vec):
                raise InvalidInput("element outside stage %d support" % stage)
        if stage == 0:
            return self.sigma.apply(self.vacant_part(x))
        mu = self.pairs[stage - 1]
        s_axis, t_axis = tuple(mu)
        y_assign = {}
        z_assign = {}
        complement = full_set(self.k).difference(mu)
        for s, vec in x.components.items():
            if self._allowed(s, stage - 1):
                y_assign[s] = vec
            if s.issubset(complement):
                if self._allowed(s, stage - 1):
                    z_assign[s] = vec
            elif mu.issubset(s) and not self._allowed(s, stage - 1):
                z_assign[s] = vec
        y = _support_element(self.model, x.chart, x.point, y_assign)
        z = _support_element(self.model, x.chart, x.point, z_assign)

        left = self.apply(y, stage - 1)
        dec = self.core_decs[mu]
        core_image = _from_merged(
            self.obj, self.slot_maps[mu],
            dec.apply(_to_merged(dec.source, self.slot_maps[mu], z)),
        )
        result = self._assemble(left, core_image, s_axis, t_axis)
        if self.check_bracketing:
            other = self._assemble(left, core_image, t_axis, s_axis)
            if not elements_equal(self.obj, result, other):
                raise SemanticError("bracketing orders disagree in the chain")
        return result

    def _assemble(self, left, core_image, s_axis, t_axis):
        lifted = zero_lift(self.obj, project(self.obj, left, s_axis), left.node)
        inner = add(self.obj, lifted, core_image, t_axis)
        return add(self.obj, left, inner, s_axis)

    def extract(self, presentation_base):
        """All gauge components of the chain, per point in the canonical
        chart, read off from evaluations on basis-supported elements."""
        k = self.k
        family = {}
        for p in presentation_base:
            can = self.obj.canonical_chart(p)
            comps = {}
            for target in nonempty_subsets(full_set(k)):
                d_out = self.obj.dims.dim(target)
                for rho in partitions(target):
                    block_dims = [self.model.dims.dim(b) for b in rho]
                    size = 1
                    for d in block_dims:
                        size *= d
                    entries = [Fraction(0)] * (d_out * size)
                    for j, basis in enumerate(_tuples(block_dims)):
                        assignment = {
                            b: unit_vector(self.model.dims.dim(b), idx)
                            for b, idx in zip(rho, basis)
                        }
                        x = _support_element(self.model, can, p, assignment)
                        out = self.apply(x)
                        vec = project_to(self.obj, out, target).components[target]
                        for i0 in range(d_out):
                            entries[i0 * size + j] = vec[i0]
                    comps[(target, rho)] = MultiTensor(
                        d_out, tuple(block_dims), entries)
            family[p] = Gauge(self.model.dims, self.obj.dims, comps)
        return family


class DecompositionBuilder:
    """Shared-cache recursion over the coarsening lattice of one atlas.

    A key is a pair (ambient node, partition of it); the object of a
    key is the corresponding diagonal core presentation.  The top-level
    bundle is the key (full cube, singleton partition).  Splittings and
    decompositions are memoized per key, so any object reached twice is
    split exactly once.
    """

    def __init__(self, presentation, strategy="least-chart", theta_top=None):
        if strategy not in STRATEGIES:
            raise InvalidInput("unknown strategy %r" % (strategy,))
        self.A = presentation
        self.strategy = strategy
        self.theta_top = theta_top
        self._objects = {}
        self._splittings = {}
        self._decompositions = {}

    def top_key(self):
        ground = full_set(self.A.n)
        return (ground, Partition([[i] for i in ground]))

    def object(self, key):
        if key not in self._objects:
            ambient, blocks = key
            self._objects[key] = partition_core(self.A, ambient, blocks, check=False)
        return self._objects[key]

    def subkey(self, key, positions):
        sub = _position_blocks(key[1], positions)
        return (sub.ground, sub)

    def merged_key(self, key, positions):
        return (key[0], _merge_blocks(key[1], positions))

    # -- splittings ----------------------------------------------------

    def splitting(self, key):
        if key in self._splittings:
            return self._splittings[key]
        obj = self.object(key)
        k = obj.n
        vac = associated_vacant(obj)
        if k <= 1:
            data = {}
            for c in obj.charts:
                for p in c.domain:
                    comps = {}
                    if k == 1:
                        single = IndexSet([1])
                        comps[(single, Partition([single]))] = MultiTensor.identity(
                            obj.dims.dim(single))
                    data[(c.id, p)] = Gauge(vac.dims, obj.dims, comps)
            morphism = Splitting(vac, obj, data, parent=obj)
            self._splittings[key] = morphism
            return morphism

        face_tensors = self._face_tensors(key, obj)
        top_can = self._paste_top(obj, face_tensors)

        family = {}
        for p in self.A.base:
            can = obj.canonical_chart(p)
            comps = {}
            for nu in nonempty_subsets(full_set(k)):
                singles = Partition([[i] for i in nu])
                if len(nu) == k:
                    comps[(nu, singles)] = top_can[p]
                else:
                    comps[(nu, singles)] = face_tensors[(nu, can, p)]
            family[p] = Gauge(vac.dims, obj.dims, comps)
        morphism = Splitting(
            vac, obj, morphism_from_canonical(vac, obj, family).data, parent=obj,
        )
        self._splittings[key] = morphism
        return morphism

    def _face_tensors(self, key, obj):
        """Multilinear face components from the cached sub-splittings."""
        k = obj.n
        out = {}
        for nu in nonempty_subsets(full_set(k)):
            if len(nu) == k:
                continue
            if len(nu) == 1:
                d = obj.dims.dim(nu)
                for c in obj.charts:
                    for p in c.domain:
                        out[(nu, c.id, p)] = MultiTensor.identity(d)
                continue
            sub_split = self.splitting(self.subkey(key, nu))
            sub_top = full_set(len(nu))
            singles = Partition([[i] for i in sub_top])
            for c in obj.charts:
                for p in c.domain:
                    out[(nu, c.id, p)] = sub_split.data[(c.id, p)].components[
                        (sub_top, singles)]
        return out

    def _paste_top(self, obj, face_tensors):
        """Pasted top component per point, in the canonical chart.

        Per chart the zero-top right inverse is linearized over axes
        2..k by frame interpolation; chart-local values are transported
        to the canonical chart and combined with the strategy weights.
        """
        k = obj.n
        top = full_set(k)
        block_dims = [obj.dims.dim(IndexSet([i])) for i in range(1, k + 1)]
        d_top = obj.dims.dim(top)
        size = 1
        for d in block_dims:
            size *= d
        out = {}
        for p in self.A.base:
            at = sorted(obj.charts_at(p))
            can = at[0]
            if self.strategy == "least-chart":
                weights = {can: Fraction(1)}
            else:
                weights = {cid: Fraction(1, len(at)) for cid in at}

            columns = []
            for basis in _tuples(block_dims):
                acc = zero_vector(d_top)
                for cid, w in weights.items():
                    to_chart = obj.transition(cid, can, p)
                    args = [
                        to_chart.linear_part(IndexSet([i + 1])).apply(
                            [unit_vector(block_dims[i], basis[i])])
                        for i in range(k)
                    ]
                    local = self._local_value(obj, face_tensors, cid, p, args)
                    moved = obj.transition(can, cid, p).evaluate(local)
                    acc = vec_add(acc, vec_scale(w, moved[top]))
                columns.append(acc)
            entries = [Fraction(0)] * (d_top * size)
            for j, col in enumerate(columns):
                for i0 in range(d_top):
                    entries[i0 * size + j] = col[i0]
            out[p] = MultiTensor(d_top, tuple(block_dims), entries)
        return out

    def _local_value(self, obj, face_tensors, chart, point, args):
        """Chart-local splitting value on singleton arguments."""
        k = obj.n
        top = full_set(k)
        comps = {}
        for nu in nonempty_subsets(top):
            if len(nu) == k:
                continue
            comps[nu] = face_tensors[(nu, chart, point)].apply(
                [args[i - 1] for i in nu])
        comps[top] = self._linearized_top(obj, chart, point)(args)
        return comps

    def _linearized_top(self, obj, chart, point):
        k = obj.n
        d_top = obj.dims.dim(full_set(k))
        base = self.theta_top or (lambda c, p, a: zero_vector(d_top))
        fn = lambda a: base(chart, point, a)
        block_dims = [obj.dims.dim(IndexSet([i])) for i in range(1, k + 1)]
        for axis in range(2, k + 1):
            fn = _frame_interpolate(fn, axis - 1, block_dims[axis - 1], d_top)
        return fn

    # -- decompositions --------------------------------------------------

    def decomposition(self, key, check_bracketing=False):
        if key in self._decompositions:
            return self._decompositions[key]
        obj = self.object(key)
        k = obj.n
        model = associated_decomposed(obj)
        if k <= 1:
            data = {
                (c.id, p): identity_gauge(obj.dims)
                for c in obj.charts for p in c.domain
            }
            morphism = Decomposition(model, obj, data, parent=obj)
            self._decompositions[key] = morphism
            return morphism

        sigma = self.splitting(key)
        core_decs = {}
        for mu in (s for s in nonempty_subsets(full_set(k)) if len(s) == 2):
            core_decs[mu] = self.decomposition(
                self.merged_key(key, mu), check_bracketing=check_bracketing)
        chain = _Chain(obj, sigma, core_decs, key[1],
                       check_bracketing=check_bracketing)
        family = chain.extract(self.A.base)
        morphism = Decomposition(
            model, obj, morphism_from_canonical(model, obj, family).data,
            parent=obj,
        )
        self._decompositions[key] = morphism
        return morphism


def _frame_interpolate(fn, slot, dim, out_dim):
    def interpolated(args):
        acc = zero_vector(out_dim)
        for j, beta in enumerate(args[slot]):
            if beta == 0:
                continue
            basis_args = list(args)
            basis_args[slot] = unit_vector(dim, j)
            acc = vec_add(acc, vec_scale(beta, fn(basis_args)))
        return acc
    return interpolated


def find_splitting(presentation, strategy="least-chart", theta_top=None):
    """A splitting of a valid presentation, built by the face recursion."""
    report = validate(presentation)
    if not report.valid:
        raise SemanticError("presentation does not validate: %r" % (report,))
    builder = DecompositionBuilder(presentation, strategy, theta_top=theta_top)
    return builder.splitting(builder.top_key())


def decompose(presentation, strategy="least-chart", check_bracketing=False):
    """A decomposition of a valid presentation via the staged pipeline."""
    report = validate(presentation)
    if not report.valid:
        raise SemanticError("presentation does not validate: %r" % (report,))
    builder = DecompositionBuilder(presentation, strategy)
    return builder.decomposition(builder.top_key(), check_bracketing=check_bracketing)


def _disjoint_families(slots):
    """Nonempty families of pairwise disjoint slots."""
    slots = list(slots)

    def rec(i, current):
        if i == len(slots):
            if current:
                yield tuple(current)
            return
        yield from rec(i + 1, current)
        s = slots[i]
        if all(s.isdisjoint(t) for t in current):
            yield from rec(i + 1, current + [s])

    yield from rec(0, [])


def _merged_slots(n, mu):
    out = []
    for s in nonempty_subsets(full_set(n)):
        inter = s.intersection(mu)
        if not inter or inter == mu:
            out.append(s)
    return out


def check_compatibility(presentation, sigma, core_decs):
    """Verify the intersection conditions between a splitting and the
    codimension-one core decompositions.

    The core decomposition over each merged pair must restrict to the
    splitting on the vacant slots away from the pair, and any two core
    decompositions must agree on the slots supported by both cores.
    Raises with the violated intersection on failure.
    """
    a = presentation
    n = a.n
    builder = DecompositionBuilder(a)
    key = builder.top_key()
    model = associated_decomposed(a)
    pairs = sorted((s for s in nonempty_subsets(full_set(n)) if len(s) == 2),
                   key=tuple)
    for mu in pairs:
        if mu not in core_decs:
            raise InvalidInput("missing core decomposition at %s" % (list(mu),))
    slot_maps = {mu: _merged_slot_map(key[1], mu)[0] for mu in pairs}
    locations = [(c.id, p) for c in a.charts for p in c.domain]

    vac = associated_vacant(a)

    def vacant_part(x):
        comps = {
            s: (x.components[s] if len(s) == 1 else zero_vector(0))
            for s in nonempty_subsets(full_set(n))
        }
        return element(vac, x.node, x.chart, x.point, comps)

    for mu in pairs:
        dec = core_decs[mu]
        single_slots = [IndexSet([i]) for i in full_set(n).difference(mu)]
        for family in _disjoint_families(single_slots):
            dims = [a.dims.dim(s) for s in family]
            for basis in _tuples(dims):
                assignment = {
                    s: unit_vector(a.dims.dim(s), idx) for s, idx in zip(family, basis)
                }
                for chart, p in locations:
                    x = _support_element(model, chart, p, assignment)
                    via_core = _from_merged(
                        a, slot_maps[mu],
                        dec.apply(_to_merged(dec.source, slot_maps[mu], x)))
                    via_sigma = sigma.apply(vacant_part(x))
                    if not elements_equal(a, via_core, via_sigma):
                        raise SemanticError(
                            "core decomposition at %s violates the splitting"
                            % (list(mu),))
    for idx, mu in enumerate(pairs):
        for nu in pairs[idx + 1:]:
            shared = sorted(set(_merged_slots(n, mu)) & set(_merged_slots(n, nu)),
                            key=tuple)
            for family in _disjoint_families(shared):
                dims = [a.dims.dim(s) for s in family]
                for basis in _tuples(dims):
                    assignment = {
                        s: unit_vector(a.dims.dim(s), idx2)
                        for s, idx2 in zip(family, basis)
                    }
                    for chart, p in locations:
                        x = _support_element(model, chart, p, assignment)
                        via_mu = _from_merged(
                            a, slot_maps[mu],
                            core_decs[mu].apply(
                                _to_merged(core_decs[mu].source, slot_maps[mu], x)))
                        via_nu = _from_merged(
                            a, slot_maps[nu],
                            core_decs[nu].apply(
                                _to_merged(core_decs[nu].source, slot_maps[nu], x)))
                        if not elements_equal(a, via_mu, via_nu):
                            raise SemanticError(
                                "core decompositions at %s and %s disagree"
                                % (list(mu), list(nu)))
    return True


def splitting_to_decomposition(presentation, sigma, core_decs,
                               check_bracketing=True):
    """The unique decomposition restricting to the given splitting and
    codimension-one core decompositions.

    ``core_decs`` maps each two-element axis set to a decomposition of
    the merged-axes core.  Compatibility is a checked precondition; the
    chain evaluates both bracketing orders of its defining sum when
    ``check_bracketing`` is set.
    """
    a = presentation
    check_compatibility(a, sigma, core_decs)
    builder = DecompositionBuilder(a)
    key = builder.top_key()
    obj = builder.object(key)
    model = associated_decomposed(obj)
    chain = _Chain(obj, sigma, {IndexSet(mu): dec for mu, dec in core_decs.items()},
                   key[1], check_bracketing=check_bracketing)
    family = chain.extract(a.base)
    return Decomposition(
        model, obj, morphism_from_canonical(model, obj, family).data, parent=obj,
    )


def extract_splitting(presentation, decomposition):
    """The splitting induced by a decomposition: compose with the vacant
    inclusion, i.e. keep the all-singleton components."""
    a = presentation
    vac = associated_vacant(a)
    data = {}
    for (chart, p), g in decomposition.data.items():
        comps = {}
        for subset in nonempty_subsets(full_set(a.n)):
            for rho in partitions(subset):
                if all(len(b) == 1 for b in rho):
                    comps[(subset, rho)] = g.components[(subset, rho)]
        data[(chart, p)] = Gauge(vac.dims, a.dims, comps)
    return Splitting(vac, a, data, parent=a)


def extract_core_decompositions(presentation, decomposition):
    """Decompositions of the codimension-one cores, by restriction."""
    a = presentation
    n = a.n
    builder = DecompositionBuilder(a)
    key = builder.top_key()
    out = {}
    for mu in (s for s in nonempty_subsets(full_set(n)) if len(s) == 2):
        merged = builder.merged_key(key, mu)
        obj = builder.object(merged)
        model = associated_decomposed(obj)
        data = {
            keyp: g.diagonal_restrict(merged[1])
            for keyp, g in decomposition.data.items()
        }
        out[mu] = Decomposition(model, obj, data, parent=obj)
    return out


def torsor_statomorphism(dec_a, dec_b):
    """The unique statomorphism translating one decomposition into the
    other: the inverse of the first after the second."""
    tau = dec_a.invert().compose(dec_b)
    for g in tau.data.values():
        if not g.is_statomorphism():
            raise SemanticError("decompositions do not differ by a statomorphism")
    return tau


def act_by_statomorphism(dec, tau):
    """Right action of a statomorphism on a decomposition."""
    composed = dec.compose(tau)
    return Decomposition(dec.source, dec.target, composed.data, parent=dec.parent)


def normalize_atlas(presentation, decomposition):
    """Conjugate the transitions by the decomposition gauges.

    The result has zero components on every non-trivial partition, so
    it equals the associated decomposed model; the original and the
    normalized presentation are intertwined by the per-chart gauges.
    """
    a = presentation
    transitions = {}
    for (dst, src, p), g in a.transitions.items():
        conj = decomposition.data[(dst, p)].invert().compose(g).compose(
            decomposition.data[(src, p)])
        if not conj.is_block_diagonal():
            raise SemanticError(
                "normalized transition %r <- %r at %r is not block-diagonal"
                % (dst, src, p))
        transitions[(dst, src, p)] = conj
    return AtlasPresentation(a.n, a.dims, a.base, a.charts, transitions,
                             a.axis_blocks)


def split_pullback(presentation, strategy="least-chart"):
    """A right inverse of the pullback projection splitting every
    ultracore sequence at once, assembled from one decomposition."""
    a = presentation
    top = full_set(a.n)
    dec = decompose(a, strategy)
    pb = pullback(a)
    p_pres = pb.presentation

    data = {}
    for (chart, p), g in dec.data.items():
        comps = {}
        for subset in nonempty_subsets(top):
            if subset != top:
                comps[(subset, Partition([subset]))] = MultiTensor.identity(
                    a.dims.dim(subset))
        inclusion = Gauge(p_pres.dims, dec.source.dims, comps)
        trimmed = {}
        for (subset, rho), tensor in g.components.items():
            o = p_pres.dims.dim(subset)
            ins = tuple(p_pres.dims.dim(b) for b in rho)
            if o == tensor.out_dim and ins == tensor.in_dims:
                trimmed[(subset, rho)] = tensor
        dec_p = Gauge(p_pres.dims, p_pres.dims, trimmed)
        data[(chart, p)] = g.compose(inclusion).compose(dec_p.invert())
    morphism = BundleMorphism(p_pres, a, data)

    composite = pb.projection.compose(morphism)
    ident = identity_gauge(p_pres.dims)
    for g in composite.data.values():
        if g != ident:
            raise SemanticError("pullback splitting is not a section")
    return morphism
