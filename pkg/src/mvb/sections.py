"""Section calculus for double and triple bundles over a finite base.

Sections are total maps on base points; base functions are rational
point functions standing in for smooth functions, and "smooth" carries
no content over a discrete base.  All per-point data is stored in the
canonical chart of the point and transported on demand.

For a double bundle (axes 1, 2) a linear section of the total node over
the axis-1 node consists, per point, of a value of the axis-2 slot and
a linear map from the axis-1 slot into the top slot.  For a triple
bundle, a doubly linear section of the total node over the {1,2}-node
is determined per point by an axis-3 value, two mixed-slot linear maps,
and the two top-slot pieces (linear in the {1,2}-slot, bilinear in the
singleton slots).  These normal forms are what the exact sequences of
sections count.
"""

from fractions import Fraction

from .bundle import canonicalize, element
from .certify import Certificate
from .cores import core
from .cubecat import IndexSet, Partition, full_set, nonempty_subsets
from .errors import DimensionMismatch, InvalidInput, SemanticError
from .exactlin import (
    MultiTensor,
    compose_tensors,
    unit_vector,
    vec_add,
    vec_scale,
    zero_vector,
)
from .gauge import Gauge
from .split import (
    Decomposition,
    Splitting,
    extract_core_decompositions,
    extract_splitting,
    is_splitting,
    splitting_to_decomposition,
)

S1 = IndexSet([1])
S2 = IndexSet([2])
S3 = IndexSet([3])
S12 = IndexSet([1, 2])
S13 = IndexSet([1, 3])
S23 = IndexSet([2, 3])
S123 = IndexSet([1, 2, 3])


def _require_n(presentation, n):
    if presentation.n != n:
        raise InvalidInput("operation needs a %d-fold presentation" % n)


def splitting_top(splitting, chart, point):
    """Top multilinear component of a splitting in one chart."""
    k = splitting.target.n
    top = full_set(k)
    return splitting.data[(chart, point)].components[
        (top, Partition([[i] for i in top]))]


class BaseSection:
    """A section of one node: a chosen element per base point."""

    def __init__(self, presentation, node, values):
        self.presentation = presentation
        self.node = IndexSet(node)
        self.values = {}
        for p in presentation.base:
            if p not in values:
                raise InvalidInput("section missing point %r" % (p,))
            e = canonicalize(presentation, values[p])
            if e.node != self.node or e.point != p:
                raise InvalidInput("section value at %r has wrong node or point" % (p,))
            self.values[p] = e

    def at(self, point):
        return self.values[point]

    @classmethod
    def zero(cls, presentation, node):
        from .bundle import zero_element
        return cls(presentation, node, {
            p: zero_element(presentation, node, p) for p in presentation.base
        })


class LinearSection:
    """A section of the top node over the axis-1 node, linear over a
    section of the axis-2 node (double bundles)."""

    def __init__(self, presentation, base_values, slope):
        _require_n(presentation, 2)
        self.presentation = presentation
        d1 = presentation.dims.dim(S1)
        d2 = presentation.dims.dim(S2)
        d12 = presentation.dims.dim(S12)
        self.base_values = {}
        self.slope = {}
        for p in presentation.base:
            vec = tuple(Fraction(x) for x in base_values[p])
            if len(vec) != d2:
                raise DimensionMismatch("base value at %r has wrong length" % (p,))
            t = slope[p]
            if t.out_dim != d12 or t.in_dims != (d1,):
                raise DimensionMismatch("slope at %r has wrong shape" % (p,))
            self.base_values[p] = vec
            self.slope[p] = t

    def base_section_value(self, point):
        return self.base_values[point]

    def apply(self, a_elem):
        """Value on an element of the axis-1 node."""
        pres = self.presentation
        e = canonicalize(pres, a_elem)
        if e.node != S1:
            raise InvalidInput("linear sections consume axis-1 elements")
        p = e.point
        a = e.components[S1]
        comps = {
            S1: a,
            S2: self.base_values[p],
            S12: self.slope[p].apply([a]),
        }
        return element(pres, S12, pres.canonical_chart(p), p, comps)

    def add(self, other):
        return LinearSection(
            self.presentation,
            {p: vec_add(v, other.base_values[p]) for p, v in self.base_values.items()},
            {p: t.plus(other.slope[p]) for p, t in self.slope.items()},
        )

    def scale_by_function(self, fn):
        """Module action of a rational base function."""
        return LinearSection(
            self.presentation,
            {p: vec_scale(fn[p], v) for p, v in self.base_values.items()},
            {p: t.scaled(fn[p]) for p, t in self.slope.items()},
        )

    def __eq__(self, other):
        return (
            isinstance(other, LinearSection)
            and self.base_values == other.base_values
            and self.slope == other.slope
        )


def tilde_linear(presentation, phi):
    """The linear section over the zero base section determined by a
    fiberwise map into the core slot: its values are core shifts of
    zero lifts."""
    _require_n(presentation, 2)
    d2 = presentation.dims.dim(S2)
    return LinearSection(
        presentation,
        {p: zero_vector(d2) for p in presentation.base},
        dict(phi),
    )


def hat_linear(presentation, base_section, splitting):
    """The linear section through a splitting: the base section rides in
    the second slot of the splitting's top component."""
    _require_n(presentation, 2)
    if not is_splitting(splitting):
        raise InvalidInput("second argument must be a splitting")
    slope = {}
    values = {}
    for p in presentation.base:
        can = presentation.canonical_chart(p)
        b = base_section.at(p).components[S2]
        top = splitting_top(splitting, can, p)
        d1 = presentation.dims.dim(S1)
        d12 = presentation.dims.dim(S12)
        entries = []
        for i0 in range(d12):
            for j in range(d1):
                unit = tuple(Fraction(1 if t == j else 0) for t in range(d1))
                entries.append(top.apply([unit, b])[i0])
        slope[p] = MultiTensor(d12, (d1,), entries)
        values[p] = b
    return LinearSection(presentation, values, slope)


def linear_module_certificate(presentation):
    """Exactness of the linear-section sequence by pointwise rank counts.

    Per point the module of linear sections has one summand for the
    base value and one for the slope; the core-map inclusion hits the
    slope summand and the base projection is onto, so the middle
    dimension must be the sum of the outer two, with kernel equal to
    image.
    """
    _require_n(presentation, 2)
    d1 = presentation.dims.dim(S1)
    d2 = presentation.dims.dim(S2)
    d12 = presentation.dims.dim(S12)
    witnesses = []
    for p in presentation.base:
        middle = d2 + d1 * d12
        left = d1 * d12
        right = d2
        if middle != left + right:
            return Certificate.failing(
                "linear section sequence exact",
                {"point": p, "dims": [left, middle, right]})
        witnesses.append({"point": p, "dims": [left, middle, right]})
    return Certificate.passing("linear section sequence exact", witnesses)


def local_split_double(presentation, sigma_frames=None):
    """Frame-by-frame construction of a splitting of a double bundle.

    ``sigma_frames`` optionally gives, per (chart, point) and per frame
    vector of the axis-2 slot, the core part of a right inverse of the
    double projection on that frame vector; the splitting interpolates
    these values linearly along the frame.  The default zero frames
    yield the canonical-chart splitting.
    """
    from .atlas import associated_vacant
    from .bundle import add, element as build, morphism_from_canonical, scale
    _require_n(presentation, 2)
    a = presentation
    d1, d2, d12 = (a.dims.dim(s) for s in (S1, S2, S12))
    vac = associated_vacant(a)
    family = {}
    for p in a.base:
        can = a.canonical_chart(p)
        size = d12 * d1 * d2
        entries = [Fraction(0)] * size
        for j1 in range(d1):
            unit_a = tuple(Fraction(1 if t == j1 else 0) for t in range(d1))
            for j2 in range(d2):
                acc = None
                for frame in range(d2):
                    frame_core = None
                    if sigma_frames is not None:
                        frame_core = sigma_frames.get((can, p, frame))
                    core_vec = (frame_core.apply([unit_a])
                                if frame_core is not None else zero_vector(d12))
                    unit_b = tuple(
                        Fraction(1 if t == frame else 0) for t in range(d2))
                    term = build(a, S12, can, p, {
                        S1: unit_a, S2: unit_b, S12: core_vec,
                    })
                    beta = Fraction(1 if frame == j2 else 0)
                    term = scale(a, beta, term, 2)
                    acc = term if acc is None else add(a, acc, term, 2)
                vec = acc.components[S12]
                for i0 in range(d12):
                    entries[(i0 * d1 + j1) * d2 + j2] = vec[i0]
        comps = {
            (S1, Partition([S1])): MultiTensor.identity(d1),
            (S2, Partition([S2])): MultiTensor.identity(d2),
            (S12, Partition([S1, S2])): MultiTensor(d12, (d1, d2), entries),
        }
        family[p] = Gauge(vac.dims, a.dims, comps)
    morphism = morphism_from_canonical(vac, a, family)
    return Splitting(vac, a, morphism.data, parent=a)


class DoublyLinearSection:
    """A section of the total node over the {1,2}-node of a triple
    bundle that is a double-bundle morphism into the (total; {1,3},
    {2,3}) structure.  Stored per point in the canonical chart."""

    def __init__(self, presentation, c_values, slope_f, slope_e, top_lin, top_bil):
        _require_n(presentation, 3)
        self.presentation = presentation
        dims = presentation.dims
        self.c_values = {}
        self.slope_f = {}
        self.slope_e = {}
        self.top_lin = {}
        self.top_bil = {}
        for p in presentation.base:
            c = tuple(Fraction(x) for x in c_values[p])
            if len(c) != dims.dim(S3):
                raise DimensionMismatch("axis-3 value at %r has wrong length" % (p,))
            f, e = slope_f[p], slope_e[p]
            lin, bil = top_lin[p], top_bil[p]
            if f.out_dim != dims.dim(S13) or f.in_dims != (dims.dim(S1),):
                raise DimensionMismatch("mixed {1,3}-slope at %r" % (p,))
            if e.out_dim != dims.dim(S23) or e.in_dims != (dims.dim(S2),):
                raise DimensionMismatch("mixed {2,3}-slope at %r" % (p,))
            if lin.out_dim != dims.dim(S123) or lin.in_dims != (dims.dim(S12),):
                raise DimensionMismatch("top linear part at %r" % (p,))
            if bil.out_dim != dims.dim(S123) or bil.in_dims != (
                    dims.dim(S1), dims.dim(S2)):
                raise DimensionMismatch("top bilinear part at %r" % (p,))
            self.c_values[p] = c
            self.slope_f[p] = f
            self.slope_e[p] = e
            self.top_lin[p] = lin
            self.top_bil[p] = bil

    def apply(self, d_elem):
        pres = self.presentation
        e = canonicalize(pres, d_elem)
        if e.node != S12:
            raise InvalidInput("doubly linear sections consume {1,2}-node elements")
        p = e.point
        a, b, k = e.components[S1], e.components[S2], e.components[S12]
        comps = {
            S1: a, S2: b, S12: k,
            S3: self.c_values[p],
            S13: self.slope_f[p].apply([a]),
            S23: self.slope_e[p].apply([b]),
            S123: vec_add(self.top_lin[p].apply([k]),
                          self.top_bil[p].apply([a, b])),
        }
        return element(pres, S123, pres.canonical_chart(p), p, comps)

    def side_sections(self):
        """The pair of linear sections this section lifts."""
        return (
            {"base": self.c_values, "slope": self.slope_f},
            {"base": self.c_values, "slope": self.slope_e},
        )

    def add_module(self, other):
        return DoublyLinearSection(
            self.presentation,
            {p: vec_add(v, other.c_values[p]) for p, v in self.c_values.items()},
            {p: t.plus(other.slope_f[p]) for p, t in self.slope_f.items()},
            {p: t.plus(other.slope_e[p]) for p, t in self.slope_e.items()},
            {p: t.plus(other.top_lin[p]) for p, t in self.top_lin.items()},
            {p: t.plus(other.top_bil[p]) for p, t in self.top_bil.items()},
        )

    def scale_by_function(self, fn):
        return DoublyLinearSection(
            self.presentation,
            {p: vec_scale(fn[p], v) for p, v in self.c_values.items()},
            {p: t.scaled(fn[p]) for p, t in self.slope_f.items()},
            {p: t.scaled(fn[p]) for p, t in self.slope_e.items()},
            {p: t.scaled(fn[p]) for p, t in self.top_lin.items()},
            {p: t.scaled(fn[p]) for p, t in self.top_bil.items()},
        )

    def __eq__(self, other):
        return (
            isinstance(other, DoublyLinearSection)
            and self.c_values == other.c_values
            and self.slope_f == other.slope_f
            and self.slope_e == other.slope_e
            and self.top_lin == other.top_lin
            and self.top_bil == other.top_bil
        )


def tilde_doubly(presentation, top_lin, top_bil):
    """The doubly linear section over the zero side sections determined
    by a double-bundle morphism into the triple core."""
    _require_n(presentation, 3)
    dims = presentation.dims
    zero_c = {p: zero_vector(dims.dim(S3)) for p in presentation.base}
    zero_f = {p: MultiTensor.zeros(dims.dim(S13), (dims.dim(S1),))
              for p in presentation.base}
    zero_e = {p: MultiTensor.zeros(dims.dim(S23), (dims.dim(S2),))
              for p in presentation.base}
    return DoublyLinearSection(presentation, zero_c, zero_f, zero_e,
                               dict(top_lin), dict(top_bil))


def hat_doubly(presentation, pair_f, pair_e):
    """A lift of a compatible pair of side sections with zero top parts.

    This realizes the surjectivity of the side projection; in canonical
    chart coordinates, choosing zero core components of a splitting of
    the ({1,3}, {2,3})-sides square and repairing the forced {1,2}-slot
    gives exactly the lift with vanishing top pieces.
    """
    _require_n(presentation, 3)
    dims = presentation.dims
    if pair_f["base"] != pair_e["base"]:
        raise InvalidInput("side sections must share their axis-3 section")
    zero_lin = {p: MultiTensor.zeros(dims.dim(S123), (dims.dim(S12),))
                for p in presentation.base}
    zero_bil = {p: MultiTensor.zeros(dims.dim(S123), (dims.dim(S1), dims.dim(S2)))
                for p in presentation.base}
    return DoublyLinearSection(presentation, dict(pair_f["base"]),
                               dict(pair_f["slope"]), dict(pair_e["slope"]),
                               zero_lin, zero_bil)


def doubly_linear_sequence(presentation):
    """Exactness data for the doubly-linear-section sequence.

    Per point, the middle module splits into the five stored summands;
    the inclusion hits the two top summands and the projection keeps
    the other three, so the dimension identity and kernel-image
    equality are exact rank facts.
    """
    _require_n(presentation, 3)
    dims = presentation.dims
    d1, d2, d3 = dims.dim(S1), dims.dim(S2), dims.dim(S3)
    d12, d13, d23, d123 = (dims.dim(s) for s in (S12, S13, S23, S123))
    witnesses = []
    for p in presentation.base:
        left = d12 * d123 + d1 * d2 * d123
        right = d3 + d1 * d13 + d2 * d23
        middle = left + right
        stored = d3 + d1 * d13 + d2 * d23 + d12 * d123 + d1 * d2 * d123
        if middle != stored:
            return Certificate.failing(
                "doubly linear section sequence exact",
                {"point": p, "middle": stored, "expected": middle})
        witnesses.append({"point": p, "dims": [left, middle, right]})
    return Certificate.passing("doubly linear section sequence exact", witnesses)


class HorizontalLift:
    """A module splitting of the doubly-linear-section sequence.

    Per point, a linear map from side data (axis-3 value, two mixed
    slopes) to top data (top linear and bilinear parts).  Linearity
    makes it a module map; the compatibility conditions against the
    chosen core splittings are checked separately.
    """

    def __init__(self, presentation, maps):
        _require_n(presentation, 3)
        self.presentation = presentation
        self.maps = dict(maps)
        for p in presentation.base:
            if p not in self.maps:
                raise InvalidInput("lift missing point %r" % (p,))

    def output(self, point, c, slope_f, slope_e):
        """Top parts (linear, bilinear) for given side data at a point."""
        return self.maps[point](c, slope_f, slope_e)

    def apply(self, pair_f, pair_e):
        if pair_f["base"] != pair_e["base"]:
            raise InvalidInput("side sections must share their axis-3 section")
        pres = self.presentation
        top_lin = {}
        top_bil = {}
        for p in pres.base:
            lin, bil = self.output(p, pair_f["base"][p], pair_f["slope"][p],
                                   pair_e["slope"][p])
            top_lin[p] = lin
            top_bil[p] = bil
        return DoublyLinearSection(pres, dict(pair_f["base"]),
                                   dict(pair_f["slope"]), dict(pair_e["slope"]),
                                   top_lin, top_bil)


def _basis_matrices(out_dim, in_dim):
    for i in range(out_dim):
        for j in range(in_dim):
            entries = [Fraction(1 if (a, b) == (i, j) else 0)
                       for a in range(out_dim) for b in range(in_dim)]
            yield MultiTensor(out_dim, (in_dim,), entries)


def check_lift_compatibility(presentation, lift, split_lde, split_lfd):
    """The lift must reproduce the two core splittings on tilde inputs.

    On a pair (tilde of a {1,3}-slope, zero) the top bilinear part must
    be the {1,3}-core splitting contracted with the slope, with zero
    top linear part; symmetrically for the {2,3} side.
    """
    pres = presentation
    dims = pres.dims
    d1, d2, d3 = dims.dim(S1), dims.dim(S2), dims.dim(S3)
    d12, d13, d23, d123 = (dims.dim(s) for s in (S12, S13, S23, S123))
    for p in pres.base:
        can = pres.canonical_chart(p)
        zero_c = zero_vector(d3)
        zero_f = MultiTensor.zeros(d13, (d1,))
        zero_e = MultiTensor.zeros(d23, (d2,))
        lam_de = splitting_top(split_lde, can, p)   # inputs ({1,3}-slot, {2}-slot)
        lam_fd = splitting_top(split_lfd, can, p)   # inputs ({1}-slot, {2,3}-slot)
        for phi in _basis_matrices(d13, d1):
            lin, bil = lift.output(p, zero_c, phi, zero_e)
            if not lin.is_zero():
                raise SemanticError(
                    "lift has a top linear part on a {1,3}-tilde input at %r"
                    % (p,))
            expected = compose_tensors(
                lam_de, [phi, MultiTensor.identity(d2)], [[0], [1]], (d1, d2))
            if bil != expected:
                raise SemanticError(
                    "lift disagrees with the {1,3}-core splitting at %r" % (p,))
        for phi in _basis_matrices(d23, d2):
            lin, bil = lift.output(p, zero_c, zero_f, phi)
            if not lin.is_zero():
                raise SemanticError(
                    "lift has a top linear part on a {2,3}-tilde input at %r"
                    % (p,))
            expected = compose_tensors(
                lam_fd, [MultiTensor.identity(d1), phi], [[0], [1]], (d1, d2))
            if bil != expected:
                raise SemanticError(
                    "lift disagrees with the {2,3}-core splitting at %r" % (p,))
    return True


def lift_from_free_part(presentation, split_lde, split_lfd, free_lin, free_bil):
    """Assemble a compatible lift from its value on pure axis-3 data.

    ``free_lin[p]`` and ``free_bil[p]`` give the top parts as linear
    functions of the axis-3 value: shapes (d123 x d12) x d3 and
    (d123 x d1 x d2) x d3, flattened into one tensor with the axis-3
    slot last.
    """
    pres = presentation
    dims = pres.dims
    d1, d2, d3 = dims.dim(S1), dims.dim(S2), dims.dim(S3)
    d12, d13, d23, d123 = (dims.dim(s) for s in (S12, S13, S23, S123))
    tops = {}
    for p in pres.base:
        can = pres.canonical_chart(p)
        lam_de = splitting_top(split_lde, can, p)
        lam_fd = splitting_top(split_lfd, can, p)
        f_lin = free_lin[p]
        f_bil = free_bil[p]

        def make_map(lam_de=lam_de, lam_fd=lam_fd, f_lin=f_lin, f_bil=f_bil):
            def the_map(c, slope_f, slope_e):
                lin_entries = [
                    sum((f_lin.entry(i0 * d12 + j, (t,)) * c[t]
                         for t in range(d3)), Fraction(0))
                    for i0 in range(d123) for j in range(d12)
                ]
                lin = MultiTensor(d123, (d12,), lin_entries)
                bil = compose_tensors(
                    lam_de, [slope_f, MultiTensor.identity(d2)],
                    [[0], [1]], (d1, d2))
                bil = bil.plus(compose_tensors(
                    lam_fd, [MultiTensor.identity(d1), slope_e],
                    [[0], [1]], (d1, d2)))
                free_entries = [
                    sum((f_bil.entry((i0 * d1 + j1) * d2 + j2, (t,)) * c[t]
                         for t in range(d3)), Fraction(0))
                    for i0 in range(d123) for j1 in range(d1) for j2 in range(d2)
                ]
                bil = bil.plus(MultiTensor(d123, (d1, d2), free_entries))
                return lin, bil
            return the_map

        tops[p] = make_map()
    return HorizontalLift(pres, tops)


def zero_free_part(presentation):
    dims = presentation.dims
    d3 = dims.dim(S3)
    d12, d123 = dims.dim(S12), dims.dim(S123)
    d1, d2 = dims.dim(S1), dims.dim(S2)
    free_lin = {p: MultiTensor.zeros(d123 * d12, (d3,)) for p in presentation.base}
    free_bil = {p: MultiTensor.zeros(d123 * d1 * d2, (d3,))
                for p in presentation.base}
    return free_lin, free_bil


def _face_presentation(presentation, axes):
    from .cores import partition_core
    return partition_core(presentation, IndexSet(axes),
                          Partition([[i] for i in IndexSet(axes)]), check=False)


def face_splitting(presentation, decomposition, axes):
    """Splitting of a coordinate face induced by a decomposition."""
    from .atlas import associated_decomposed
    axes = IndexSet(axes)
    face_pres = _face_presentation(presentation, axes)
    face_dec_data = {
        keyp: g.diagonal_restrict(Partition([[i] for i in axes]))
        for keyp, g in decomposition.data.items()
    }
    face_dec = Decomposition(
        associated_decomposed(face_pres), face_pres, face_dec_data,
        parent=face_pres)
    return extract_splitting(face_pres, face_dec), face_dec


def _double_decomposition_from_splitting(pres2, splitting):
    """The unique decomposition of a double presentation with the given
    splitting (its one iterated core is an ordinary bundle)."""
    from .split import DecompositionBuilder
    builder = DecompositionBuilder(pres2)
    key = builder.top_key()
    builder._splittings[key] = splitting
    return builder.decomposition(key)


def _hat_slope(top_tensor, c):
    """Partial application of a two-block top component in its last slot."""
    from .exactlin import contract_slot
    return contract_slot(top_tensor, 1, c)


def lift_to_decomposition(presentation, split_d, split_e, split_f,
                          split_lde, split_lfd, lift):
    """Assemble the decomposition determined by five double splittings
    and a compatible horizontal lift.

    The top splitting rides the lift along the hat sections of the side
    splittings; the third core splitting is the lift's value on hat
    pairs read off in the core slot; the staged chain then produces the
    unique decomposition with these restrictions.
    """
    pres = presentation
    _require_n(pres, 3)
    check_lift_compatibility(pres, lift, split_lde, split_lfd)
    dims = pres.dims
    d1, d2, d3 = dims.dim(S1), dims.dim(S2), dims.dim(S3)
    d12, d13, d23, d123 = (dims.dim(s) for s in (S12, S13, S23, S123))

    from .atlas import associated_vacant
    from .bundle import morphism_from_canonical
    vac = associated_vacant(pres)

    _, lef_pres = core(pres, S123, S12, check=False)
    _, lde_pres = core(pres, S123, S13, check=False)
    _, lfd_pres = core(pres, S123, S23, check=False)
    lef_vac = associated_vacant(lef_pres)

    sigma_family = {}
    lef_family = {}
    for p in pres.base:
        can = pres.canonical_chart(p)
        t_d = splitting_top(split_d, can, p)
        t_e = splitting_top(split_e, can, p)
        t_f = splitting_top(split_f, can, p)

        per_c = []
        for k3 in range(d3):
            c_vec = unit_vector(d3, k3)
            phi_f = _hat_slope(t_f, c_vec)
            phi_e = _hat_slope(t_e, c_vec)
            per_c.append(lift.output(p, c_vec, phi_f, phi_e))

        top_entries = [Fraction(0)] * (d123 * d1 * d2 * d3)
        for j1 in range(d1):
            a_vec = unit_vector(d1, j1)
            for j2 in range(d2):
                b_vec = unit_vector(d2, j2)
                for k3 in range(d3):
                    lin, bil = per_c[k3]
                    val = vec_add(lin.apply([t_d.apply([a_vec, b_vec])]),
                                  bil.apply([a_vec, b_vec]))
                    for i0 in range(d123):
                        flat = ((i0 * d1 + j1) * d2 + j2) * d3 + k3
                        top_entries[flat] = val[i0]
        m_top = MultiTensor(d123, (d1, d2, d3), top_entries)

        comps = {
            (S1, Partition([S1])): MultiTensor.identity(d1),
            (S2, Partition([S2])): MultiTensor.identity(d2),
            (S3, Partition([S3])): MultiTensor.identity(d3),
            (S12, Partition([S1, S2])): t_d,
            (S13, Partition([S1, S3])): t_f,
            (S23, Partition([S2, S3])): t_e,
            (S123, Partition([S1, S2, S3])): m_top,
        }
        sigma_family[p] = Gauge(vac.dims, pres.dims, comps)

        lef_entries = [Fraction(0)] * (d123 * d12 * d3)
        for j in range(d12):
            k_vec = unit_vector(d12, j)
            for k3 in range(d3):
                lin, _ = per_c[k3]
                val = lin.apply([k_vec])
                for i0 in range(d123):
                    lef_entries[(i0 * d12 + j) * d3 + k3] = val[i0]
        lef_family[p] = Gauge(lef_vac.dims, lef_pres.dims, {
            (S1, Partition([S1])): MultiTensor.identity(d12),
            (S2, Partition([S2])): MultiTensor.identity(d3),
            (S12, Partition([S1, S2])): MultiTensor(d123, (d12, d3), lef_entries),
        })

    sigma = Splitting(
        vac, pres, morphism_from_canonical(vac, pres, sigma_family).data,
        parent=pres)
    split_lef = Splitting(
        lef_vac, lef_pres,
        morphism_from_canonical(lef_vac, lef_pres, lef_family).data,
        parent=lef_pres)

    core_decs = {
        S12: _double_decomposition_from_splitting(lef_pres, split_lef),
        S13: _double_decomposition_from_splitting(lde_pres, split_lde),
        S23: _double_decomposition_from_splitting(lfd_pres, split_lfd),
    }
    return splitting_to_decomposition(pres, sigma, core_decs,
                                      check_bracketing=False)


def decomposition_to_lift(presentation, decomposition):
    """Extract the five double splittings and the horizontal lift that
    reproduce a decomposition of a triple bundle."""
    pres = presentation
    _require_n(pres, 3)
    dec = decomposition
    dims = pres.dims
    d1, d2, d3 = dims.dim(S1), dims.dim(S2), dims.dim(S3)
    d12, d13, d23, d123 = (dims.dim(s) for s in (S12, S13, S23, S123))

    split_d, _ = face_splitting(pres, dec, S12)
    split_e, _ = face_splitting(pres, dec, S23)
    split_f, _ = face_splitting(pres, dec, S13)

    cores = extract_core_decompositions(pres, dec)
    spec_lde, lde_pres = core(pres, S123, S13, check=False)
    spec_lfd, lfd_pres = core(pres, S123, S23, check=False)
    split_lde = extract_splitting(lde_pres, cores[S13])
    split_lfd = extract_splitting(lfd_pres, cores[S23])

    maps = {}
    for p in pres.base:
        can = pres.canonical_chart(p)
        g = dec.data[(can, p)]
        t_1_2_3 = g.components[(S123, Partition([S1, S2, S3]))]
        t_12_3 = g.components[(S123, Partition([S12, S3]))]
        t_13_2 = g.components[(S123, Partition([S13, S2]))]
        t_23_1 = g.components[(S123, Partition([S23, S1]))]
        t_d = g.components[(S12, Partition([S1, S2]))]
        t_f = g.components[(S13, Partition([S1, S3]))]
        t_e = g.components[(S23, Partition([S2, S3]))]

        def make_map(t_1_2_3=t_1_2_3, t_12_3=t_12_3, t_13_2=t_13_2,
                     t_23_1=t_23_1, t_d=t_d, t_f=t_f, t_e=t_e):
            from .exactlin import contract_slot

            def the_map(c, slope_f, slope_e):
                lin = contract_slot(t_12_3, 1, c)
                dev_f = slope_f.plus(contract_slot(t_f, 1, c).scaled(-1))
                dev_e = slope_e.plus(contract_slot(t_e, 1, c).scaled(-1))
                d1_, d2_ = t_d.in_dims
                bil = contract_slot(t_1_2_3, 2, c)
                bil = bil.plus(compose_tensors(
                    contract_slot(t_12_3, 1, c), [t_d], [[0, 1]],
                    (d1_, d2_)).scaled(-1))
                # component partitions are in canonical block order:
                # ({1,3},{2}) consumes (dev_f(a), b) and ({1},{2,3})
                # consumes (a, dev_e(b))
                bil = bil.plus(compose_tensors(
                    t_13_2, [dev_f, MultiTensor.identity(d2_)],
                    [[0], [1]], (d1_, d2_)))
                bil = bil.plus(compose_tensors(
                    t_23_1, [MultiTensor.identity(d1_), dev_e],
                    [[0], [1]], (d1_, d2_)))
                return lin, bil
            return the_map

        maps[p] = make_map()
    lift = HorizontalLift(pres, maps)
    return {
        "split_d": split_d,
        "split_e": split_e,
        "split_f": split_f,
        "split_lde": split_lde,
        "split_lfd": split_lfd,
        "lift": lift,
    }


def explicit_triple_formula(presentation, decomposition, point,
                            a, b, c, k_ab, k_bc, k_ca, s):
    """Evaluate the displayed seven-argument assembly of a decomposition
    from its splitting data, elementwise with genuine fiber operations."""
    from .bundle import add, element as build
    pres = presentation
    _require_n(pres, 3)
    dec = decomposition
    p = point
    can = pres.canonical_chart(p)
    g = dec.data[(can, p)]
    dims = pres.dims

    def comp(target, blocks):
        return g.components[(IndexSet(target), Partition(blocks))]

    t_d = comp(S12, [S1, S2])
    t_e = comp(S23, [S2, S3])
    t_f = comp(S13, [S1, S3])
    m_top = comp(S123, [S1, S2, S3])
    lam_de = comp(S123, [S13, S2])   # consumes ({1,3}-slot, {2}-slot)
    lam_ef = comp(S123, [S12, S3])   # consumes ({1,2}-slot, {3}-slot)
    lam_fd = comp(S123, [S1, S23])   # consumes ({1}-slot, {2,3}-slot)

    zeros = {sub: zero_vector(dims.dim(sub)) for sub in nonempty_subsets(S123)}

    def t_elem(assign):
        comps = dict(zeros)
        comps.update(assign)
        return build(pres, S123, can, p, comps)

    sigma_abc = t_elem({
        S1: a, S2: b, S3: c,
        S12: t_d.apply([a, b]), S13: t_f.apply([a, c]), S23: t_e.apply([b, c]),
        S123: m_top.apply([a, b, c]),
    })
    lift_sigma_d = t_elem({S1: a, S2: b, S12: t_d.apply([a, b])})
    split_lfd_val = t_elem({S1: a, S23: k_bc, S123: lam_fd.apply([a, k_bc])})
    inner1 = add(pres, lift_sigma_d, split_lfd_val, 2)
    term1 = add(pres, sigma_abc, inner1, 3)

    lift_sigma_f = t_elem({S1: a, S3: c, S13: t_f.apply([a, c])})
    split_lef_val = t_elem({S3: c, S12: k_ab, S123: lam_ef.apply([k_ab, c])})
    inner2 = add(pres, lift_sigma_f, split_lef_val, 1)
    term2 = add(pres, term1, inner2, 2)

    dec_e_val = t_elem({
        S2: b, S3: c, S23: vec_add(k_bc, t_e.apply([b, c])),
    })
    split_lde_val = t_elem({S2: b, S13: k_ca, S123: lam_de.apply([k_ca, b])})
    s_bar = t_elem({S123: s})
    zero_over_b = t_elem({S2: b})
    last_piece = add(pres, zero_over_b, s_bar, 2)
    inner3 = add(pres, add(pres, dec_e_val, split_lde_val, 3), last_piece, 3)
    return add(pres, term2, inner3, 1)

