"""Weight calculus for integer-graded filtrations and admissible weights.

A graded filtration is a finite list of (weight, subbundle) jumps, implicitly
equal to the whole bundle below the first weight and zero strictly above the
last.  Its combined weight decides slope stability: positive means
destabilizing.  The admissibility region bounds weight gaps per marked point
so that the graded-weight criterion applies at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BadIndex, BadWeights, InvalidFiltration, MultiplePoints
from .parabolic import ParabolicBundle, induced_quot_datum, parabolic_degree
from .rat import rat_str
from .sheaves import Subbundle


@dataclass(frozen=True)
class ThetaFiltration:
    """Strictly decreasing subbundles at strictly increasing integer weights."""

    jumps: tuple  # ((weight, Subbundle), ...) possibly empty

    def __post_init__(self):
        ws = [w for w, _ in self.jumps]
        if any(a >= b for a, b in zip(ws, ws[1:])):
            raise InvalidFiltration("weights must strictly increase")


def theta_filtration(V: ParabolicBundle, jumps, allow_repeats: bool = False):
    """Validated filtration inside V; listed subbundles are proper & nonzero."""
    jumps = tuple((int(w), W) for w, W in jumps)
    filt = ThetaFiltration(jumps)
    n = V.rank
    prev = None
    for w, W in jumps:
        if W.bundle != V.bundle:
            raise InvalidFiltration("subbundle lives in a different bundle")
        if W.rank == 0 or W.rank == n:
            raise InvalidFiltration("listed members must be proper and nonzero")
        if prev is not None:
            if not prev.contains(W):
                raise InvalidFiltration("members are not nested")
            if not allow_repeats and prev.rank == W.rank:
                raise InvalidFiltration("members must strictly decrease")
        prev = W
    return filt


def _segments(V: ParabolicBundle, filt: ThetaFiltration):
    """(multiplicity, member) pairs covering the weights where the value is a
    proper subbundle; the V and 0 tails never contribute to any weight sum."""
    jumps = filt.jumps
    out = []
    for i, (w, W) in enumerate(jumps):
        if i + 1 < len(jumps):
            mult = jumps[i + 1][0] - w
        else:
            mult = 1
        out.append((mult, W))
    return out


def wt_combined(V: ParabolicBundle, filt: ThetaFiltration) -> Fraction:
    """Graded weight of the full stability line: positive = destabilizing."""
    n = V.rank
    deg_v = parabolic_degree(V)
    acc = Fraction(0)
    for mult, W in _segments(V, filt):
        acc += mult * (parabolic_degree(V, W) * n - deg_v * W.rank)
    return 2 * acc


def wt_chi(V: ParabolicBundle, filt: ThetaFiltration, point: int, i: int, j: int) -> int:
    """Character weight at one marked point for an ordered flag-block pair."""
    if not (0 <= point < len(V.points)):
        raise BadIndex(f"point index {point} out of range")
    fl = V.flags[point]
    N = fl.chain_length
    if not (1 <= i <= N and 1 <= j <= N and i != j):
        raise BadIndex(f"block pair ({i}, {j}) invalid for chain length {N}")
    a = fl.jumps
    acc = 0
    for mult, W in _segments(V, filt):
        bw = induced_quot_datum(V, W).jumps[point]
        acc += mult * (bw[i - 1] * a[j - 1] - bw[j - 1] * a[i - 1])
    return acc


def wt_det(V: ParabolicBundle, filt: ThetaFiltration) -> int:
    """Sheaf-level determinant weight; defined for a single marked point."""
    if len(V.points) != 1:
        raise MultiplePoints("determinant weight formula needs one marked point")
    n = V.rank
    deg_e = V.bundle.degree
    acc = 0
    for mult, W in _segments(V, filt):
        # twisting by the point adds the rank to a sheaf degree
        acc += mult * ((W.degree + W.rank) * n - (deg_e + n) * W.rank)
    return 2 * acc


def one_step(V: ParabolicBundle, W: Subbundle, weight: int = 1) -> ThetaFiltration:
    return theta_filtration(V, ((weight, W),))


def chi_pairing(n: int, jumps, weights, l: int, k: int) -> Fraction:
    """Coroot pairing of the weight character across blocks l and k."""
    N = len(jumps)
    if len(weights) != N:
        raise BadIndex("jumps and weights must have equal length")
    if not (1 <= l <= N and 1 <= k <= N and l != k):
        raise BadIndex(f"block pair ({l}, {k}) invalid for chain length {N}")
    lam = [Fraction(w) for w in weights]
    a = list(jumps)

    def half(idx):
        return 2 * n * lam[idx - 1] - 2 * sum(a[: idx - 1]) - a[idx - 1]

    return half(l) - half(k)


@dataclass(frozen=True)
class WeightRegion:
    """Affine inequalities on the weight vector, one pair per block pair."""

    n: int
    constraints: tuple  # (lhs coefficient tuple, relation, rhs) records

    def to_jsonable(self):
        return [
            {
                "lhs": [rat_str(c) for c in lhs],
                "rel": rel,
                "rhs": rat_str(rhs),
            }
            for lhs, rel, rhs in self.constraints
        ]


def is_admissible(n: int, jumps, weights):
    """Check the paired gap inequalities; the region is returned regardless."""
    N = len(jumps)
    if len(weights) != N:
        raise BadWeights("jumps and weights must have equal length")
    lam = [Fraction(w) for w in weights]
    for w in lam:
        if not (0 < w < 1):
            raise BadWeights(f"weight {w} outside (0, 1)")
    if any(a >= b for a, b in zip(lam, lam[1:])):
        raise BadWeights("weights must strictly increase")
    a = list(jumps)
    constraints = []
    ok = True
    for k in range(1, N + 1):
        for l in range(k + 1, N + 1):
            mid = Fraction(sum(a[k - 1 : l - 1]), n)
            skew = Fraction(a[l - 1] - a[k - 1], 2 * n)
            lo = -Fraction(1, 2 * n) + mid + skew
            hi = Fraction(1, 2 * n) + mid + skew
            lhs = tuple(
                Fraction(1) if m == l else Fraction(-1) if m == k else Fraction(0)
                for m in range(1, N + 1)
            )
            constraints.append((lhs, ">=", lo))
            constraints.append((lhs, "<=", hi))
            gap = lam[l - 1] - lam[k - 1]
            if not (lo <= gap <= hi):
                ok = False
    return ok, WeightRegion(n, tuple(constraints))
