"""Parabolic structures: flags at marked points, weights, degrees and Homs.

Flags live in the fiber of the bundle at each marked point (plain subspaces
of F_q^n in the t-chart frame), weighted by strictly increasing rationals in
(0, 1).  The parabolic degree of a subbundle is computed from its induced
flag intersections, so every slope comparison reduces to exact rational
arithmetic plus small echelon computations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BadWeights,
    EqualRanks,
    FullRank,
    IncompatibleShape,
    InvalidSubbundle,
    NotNested,
    ShapeMismatch,
)
from .linalg import intersect_dim, kernel_basis, matmul, matvec, rref, subspace_leq
from .poly import pnorm
from .sheaves import SplitBundle, Subbundle, quotient_bundle


@dataclass(frozen=True)
class Flag:
    """Fiber flag: jump sizes plus echelon bases of the proper chain members."""

    jumps: tuple
    subspaces: tuple  # one echelon row basis per proper member, m = 1..N-1

    @property
    def chain_length(self) -> int:
        return len(self.jumps)

    def subspace(self, m: int, n: int):
        """Echelon rows of the m-th member; m = 0 is zero, m = N is everything."""
        if m == 0:
            return ()
        if m == len(self.jumps):
            return tuple(
                tuple(1 if i == j else 0 for j in range(n)) for i in range(n)
            )
        return self.subspaces[m - 1]


def flag_make(field, n: int, jumps, raw_subspaces) -> Flag:
    """Validate and echelon-normalize a flag for a rank-n fiber."""
    jumps = tuple(int(a) for a in jumps)
    if any(a < 0 for a in jumps):
        raise ShapeMismatch("flag jumps must be nonnegative")
    if sum(jumps) != n:
        raise ShapeMismatch(f"flag jumps must sum to the rank {n}")
    if len(raw_subspaces) != len(jumps) - 1:
        raise ShapeMismatch(
            f"expected {len(jumps) - 1} proper chain members, got {len(raw_subspaces)}"
        )
    spaces = []
    expect = 0
    for m, rows in enumerate(raw_subspaces, start=1):
        expect += jumps[m - 1]
        rows = tuple(tuple(r) for r in rows)
        if any(len(r) != n for r in rows):
            raise ShapeMismatch(f"flag member {m}: vectors must have length {n}")
        red, rk, _ = rref(field, rows) if rows else ((), 0, ())
        if rk != expect:
            raise ShapeMismatch(
                f"flag member {m}: dimension {rk}, expected {expect}"
            )
        spaces.append(red[:rk])
    for prev, cur in zip(spaces, spaces[1:]):
        if not subspace_leq(field, prev, cur):
            raise ShapeMismatch("flag members are not nested")
    return Flag(jumps, tuple(spaces))


def _check_weights(weights):
    for i, lam in enumerate(weights):
        for w in lam:
            if not (Fraction(0) < w < Fraction(1)):
                raise BadWeights(f"weight {w} at point index {i} outside (0, 1)")
        if any(a >= b for a, b in zip(lam, lam[1:])):
            raise BadWeights(f"weights at point index {i} not strictly increasing")


@dataclass(frozen=True)
class ParabolicBundle:
    """Split bundle with a weighted flag in its fiber at each marked point."""

    bundle: SplitBundle
    points: tuple  # distinct field element codes, t-chart
    flags: tuple
    weights: tuple  # per point: strictly increasing Fractions in (0, 1)

    def __post_init__(self):
        n = self.bundle.rank
        if not (len(self.points) == len(self.flags) == len(self.weights)):
            raise ShapeMismatch("points, flags and weights must align")
        if len(set(self.points)) != len(self.points):
            raise ShapeMismatch("marked points must be distinct")
        for fl, lam in zip(self.flags, self.weights):
            if len(lam) != fl.chain_length:
                raise ShapeMismatch("weight chain length differs from flag's")
        _check_weights(self.weights)
        for fl in self.flags:
            if sum(fl.jumps) != n:
                raise ShapeMismatch("flag jumps must sum to the rank")

    @property
    def field(self):
        return self.bundle.field

    @property
    def rank(self) -> int:
        return self.bundle.rank

    def extend_scalars(self, m: int) -> "ParabolicBundle":
        big, embed = self.field.extension(m)
        new_bundle = SplitBundle(big, self.bundle.twists)
        new_points = tuple(embed(x) for x in self.points)
        new_flags = tuple(
            Flag(
                fl.jumps,
                tuple(
                    tuple(tuple(embed(c) for c in row) for row in rows)
                    for rows in fl.subspaces
                ),
            )
            for fl in self.flags
        )
        return ParabolicBundle(new_bundle, new_points, new_flags, self.weights)


@dataclass(frozen=True, order=True)
class QuotDatum:
    """Discrete invariant of a parabolic subbundle: rank, degree, flag jumps."""

    rank: int
    degree: int
    jumps: tuple  # per point: tuple of nonnegative ints summing to rank


def induced_quot_datum(V: ParabolicBundle, W: Subbundle) -> QuotDatum:
    """Invariant of W with its induced flag intersections at each point."""
    if W.bundle != V.bundle:
        raise InvalidSubbundle("subbundle lives in a different ambient bundle")
    F = V.field
    n = V.rank
    all_jumps = []
    for x, fl in zip(V.points, V.flags):
        fiber = W.fiber_matrix(x)
        w_rows = tuple(
            tuple(fiber[j][k] for j in range(n)) for k in range(W.rank)
        )
        dims = [0]
        for m in range(1, fl.chain_length + 1):
            dims.append(intersect_dim(F, w_rows, fl.subspace(m, n)))
        all_jumps.append(tuple(b - a for a, b in zip(dims, dims[1:])))
    return QuotDatum(W.rank, W.degree, tuple(all_jumps))


def degree_from_datum(V: ParabolicBundle, theta: QuotDatum) -> Fraction:
    deg = Fraction(theta.degree)
    for lam, jumps in zip(V.weights, theta.jumps):
        deg += theta.rank - sum(l * b for l, b in zip(lam, jumps))
    return deg


def parabolic_degree(V: ParabolicBundle, W: Subbundle | None = None) -> Fraction:
    """Parabolic degree of V, or of a subbundle with its induced structure."""
    if W is None:
        deg = Fraction(V.bundle.degree)
        n = V.rank
        for lam, fl in zip(V.weights, V.flags):
            deg += n - sum(l * a for l, a in zip(lam, fl.jumps))
        return deg
    if W.rank == 0:
        return Fraction(0)
    return degree_from_datum(V, induced_quot_datum(V, W))


def parabolic_slope(V: ParabolicBundle, W: Subbundle | None = None) -> Fraction:
    r = V.rank if W is None else W.rank
    if r == 0:
        raise EqualRanks("the zero subbundle has no slope")
    return parabolic_degree(V, W) / r


def relative_slope(V: ParabolicBundle, U: Subbundle, W: Subbundle) -> Fraction:
    """Slope of the parabolic quotient W/U, by degree additivity."""
    if not W.contains(U):
        raise NotNested("first subbundle is not contained in the second")
    if W.rank == U.rank:
        raise EqualRanks("relative slope needs strictly nested subbundles")
    return (parabolic_degree(V, W) - parabolic_degree(V, U)) / (W.rank - U.rank)


def _annihilator(F, rows, n):
    """Row basis of the functionals vanishing on the given row space."""
    if not rows:
        return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    return kernel_basis(F, rows, ncols=n)


def sub_parabolic(V: ParabolicBundle, W: Subbundle) -> ParabolicBundle:
    """W as a parabolic bundle in its own right, with the induced flags."""
    if W.rank == 0:
        raise EqualRanks("the zero subbundle carries no parabolic structure")
    F = V.field
    n = V.rank
    r = W.rank
    sub_bundle = SplitBundle(F, W.col_twists)
    flags = []
    for x, fl in zip(V.points, V.flags):
        fiber = W.fiber_matrix(x)  # n x r
        spaces = []
        dims = [0]
        for m in range(1, fl.chain_length):
            ann = _annihilator(F, fl.subspace(m, n), n)
            constraint = matmul(F, ann, fiber) if ann else ()
            pre = kernel_basis(F, constraint, ncols=r)
            red, rk, _ = rref(F, pre) if pre else ((), 0, ())
            spaces.append(red[:rk])
            dims.append(rk)
        dims.append(r)
        jumps = tuple(b - a for a, b in zip(dims, dims[1:]))
        flags.append(Flag(jumps, tuple(spaces)))
    return ParabolicBundle(sub_bundle, V.points, tuple(flags), V.weights)


def quotient_parabolic(V: ParabolicBundle, W: Subbundle) -> ParabolicBundle:
    """The quotient bundle with the image flags and unchanged weights."""
    if W.rank == V.rank:
        raise FullRank("quotient by a full-rank subbundle is zero")
    F = V.field
    n = V.rank
    Q, qmap = quotient_bundle(V.bundle, W)
    theta = induced_quot_datum(V, W)
    flags = []
    for idx, (x, fl) in enumerate(zip(V.points, V.flags)):
        proj = qmap.at(x)
        spaces = []
        for m in range(1, fl.chain_length):
            imgs = tuple(matvec(F, proj, v) for v in fl.subspace(m, n))
            red, rk, _ = rref(F, imgs) if imgs else ((), 0, ())
            spaces.append(red[:rk])
        jumps = tuple(
            a - b for a, b in zip(fl.jumps, theta.jumps[idx])
        )
        flags.append(flag_make(F, Q.rank, jumps, tuple(spaces)))
    return ParabolicBundle(Q, V.points, tuple(flags), V.weights)


def _compatible(A: ParabolicBundle, B: ParabolicBundle):
    if A.field != B.field:
        raise IncompatibleShape("bundles live over different fields")
    if A.points != B.points:
        raise IncompatibleShape("bundles have different marked points")
    for fa, fb in zip(A.flags, B.flags):
        if fa.chain_length != fb.chain_length:
            raise IncompatibleShape("flag chain lengths differ")


def hom_parabolic(A: ParabolicBundle, B: ParabolicBundle):
    """Flag-preserving sheaf maps A -> B: dimension plus an echelon basis.

    A map is a matrix with polynomial entries within the twist degree bounds
    whose fiber evaluation at each marked point carries A's flag members into
    B's.  Weights never enter.
    """
    _compatible(A, B)
    F = A.field
    nA, nB = A.rank, B.rank
    slots = []  # (row in B, col in A, exponent)
    for j in range(nB):
        for k in range(nA):
            bound = B.bundle.twists[j] - A.bundle.twists[k]
            for e in range(bound + 1):
                slots.append((j, k, e))
    nvars = len(slots)
    if nvars == 0:
        return 0, ()
    constraints = []
    for x, fa, fb in zip(A.points, A.flags, B.flags):
        powers = [F.pow(x, e) for e in range(max(s[2] for s in slots) + 1)]
        for m in range(1, fa.chain_length):
            za = fa.subspace(m, nA)
            ann = _annihilator(F, fb.subspace(m, nB), nB)
            for u in za:
                for z in ann:
                    row = []
                    for (j, k, e) in slots:
                        row.append(F.mul(F.mul(z[j], u[k]), powers[e]))
                    constraints.append(tuple(row))
    basis = kernel_basis(F, constraints, ncols=nvars)
    red, rk, _ = rref(F, basis) if basis else ((), 0, ())
    mats = []
    for vec in red[:rk]:
        mat = [[[] for _ in range(nA)] for _ in range(nB)]
        for val, (j, k, e) in zip(vec, slots):
            coeffs = mat[j][k]
            while len(coeffs) <= e:
                coeffs.append(0)
            coeffs[e] = val
        mats.append(tuple(tuple(pnorm(c) for c in row) for row in mat))
    return rk, tuple(mats)


def direct_sum(A: ParabolicBundle, B: ParabolicBundle | None) -> ParabolicBundle:
    """Blockwise direct sum; the second summand may be the zero sentinel."""
    if B is None:
        return A
    _compatible(A, B)
    if A.weights != B.weights:
        raise IncompatibleShape("weights differ between summands")
    F = A.field
    nA, nB = A.rank, B.rank
    concat = A.bundle.twists + B.bundle.twists
    order = sorted(range(nA + nB), key=lambda i: (-concat[i], i))
    twists = tuple(concat[i] for i in order)
    flags = []
    for fa, fb in zip(A.flags, B.flags):
        spaces = []
        for m in range(1, fa.chain_length):
            rows = []
            for v in fa.subspace(m, nA):
                full = tuple(v) + (0,) * nB
                rows.append(tuple(full[i] for i in order))
            for v in fb.subspace(m, nB):
                full = (0,) * nA + tuple(v)
                rows.append(tuple(full[i] for i in order))
            red, rk, _ = rref(F, tuple(rows)) if rows else ((), 0, ())
            spaces.append(red[:rk])
        jumps = tuple(a + b for a, b in zip(fa.jumps, fb.jumps))
        flags.append(Flag(jumps, tuple(spaces)))
    return ParabolicBundle(
        SplitBundle(F, twists), A.points, tuple(flags), A.weights
    )
