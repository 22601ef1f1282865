"""Integral quadratic lattices over Z_p with exact rational Gram data.

The Gram record stores q(e_i) on the diagonal and the bilinear values
(e_i, e_j) = q(e_i + e_j) - q(e_i) - q(e_j) off the diagonal.  The derived
"moment matrix" in the bilinear sense has 2q(e_i) on the diagonal; its
determinant valuation is the `val` invariant used by the functional
equations and by interpolation-degree bounds.

Lattices built through the constructors carry a block structure (planes
q(x,y) = xy and rank-1 pieces <a>) that the counting engine consumes; a
lattice produced by an arbitrary change of basis loses it and is
re-diagonalized when needed (odd p only).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from swb.padic import (
    INFINITY,
    hilbert_symbol,
    is_prime,
    quad_residue_symbol,
    smallest_nonresidue,
    valuation,
)

PLANE = ("plane",)


def _frac_matrix(rows):
    return [[Fraction(x) for x in row] for row in rows]


class LatticeError(ValueError):
    pass


class QuadLattice:
    """Quadratic lattice over Z_p given by its exact Gram record."""

    __slots__ = ("p", "gram", "blocks")

    def __init__(self, p, gram, blocks=None):
        if not is_prime(p):
            raise LatticeError(f"not a prime: {p}")
        gram = _frac_matrix(gram)
        m = len(gram)
        for row in gram:
            if len(row) != m:
                raise LatticeError("gram must be square")
        for i in range(m):
            for j in range(i + 1, m):
                if gram[i][j] != gram[j][i]:
                    raise LatticeError("gram must be symmetric")
        self.p = p
        self.gram = gram
        self.blocks = tuple(blocks) if blocks is not None else None

    @property
    def rank(self):
        return len(self.gram)

    def q_value(self, i):
        return self.gram[i][i]

    def bilinear_matrix(self):
        """The matrix of (e_i, e_j), i.e. 2q on the diagonal."""
        m = self.rank
        return [
            [2 * self.gram[i][j] if i == j else self.gram[i][j] for j in range(m)]
            for i in range(m)
        ]

    def is_integral(self):
        return all(
            valuation(x, self.p) >= 0
            for row in self.gram
            for x in row
            if x != 0
        )

    def det_bilinear(self):
        return _det(self.bilinear_matrix())

    def det_moment(self):
        """Determinant of the half-integral moment matrix (q on the diagonal)."""
        m = self.rank
        half = [
            [self.gram[i][j] if i == j else self.gram[i][j] / 2 for j in range(m)]
            for i in range(m)
        ]
        return _det(half)

    def val(self):
        """p-adic valuation of the bilinear Gram determinant."""
        d = self.det_bilinear()
        if d == 0:
            raise LatticeError("degenerate lattice has no val")
        return valuation(d, self.p)

    def is_diagonal(self):
        m = self.rank
        return all(
            self.gram[i][j] == 0 for i in range(m) for j in range(m) if i != j
        )

    def diagonal_values(self):
        if not self.is_diagonal():
            raise LatticeError("lattice is not diagonal")
        return tuple(self.gram[i][i] for i in range(self.rank))

    def __eq__(self, other):
        if not isinstance(other, QuadLattice):
            return NotImplemented
        return self.p == other.p and self.gram == other.gram

    def __repr__(self):
        if self.blocks is not None:
            parts = []
            for b in self.blocks:
                parts.append("H2" if b == PLANE else f"<{b[1]}>")
            return f"QuadLattice(p={self.p}, {' + '.join(parts) or 'rank0'})"
        return f"QuadLattice(p={self.p}, rank={self.rank})"


def diagonal_lattice(values, p) -> QuadLattice:
    values = [Fraction(v) for v in values]
    m = len(values)
    gram = [[values[i] if i == j else Fraction(0) for j in range(m)] for i in range(m)]
    return QuadLattice(p, gram, blocks=[("diag", v) for v in values])


def plane_lattice(p) -> QuadLattice:
    """The rank-2 lattice with q(x, y) = xy."""
    return QuadLattice(p, [[0, 1], [1, 0]], blocks=[PLANE])


def zero_lattice(p) -> QuadLattice:
    return QuadLattice(p, [], blocks=[])


def direct_sum(L: QuadLattice, M: QuadLattice) -> QuadLattice:
    if L.p != M.p:
        raise LatticeError("direct_sum needs matching primes")
    a, b = L.rank, M.rank
    gram = [[Fraction(0)] * (a + b) for _ in range(a + b)]
    for i in range(a):
        for j in range(a):
            gram[i][j] = L.gram[i][j]
    for i in range(b):
        for j in range(b):
            gram[a + i][a + j] = M.gram[i][j]
    blocks = None
    if L.blocks is not None and M.blocks is not None:
        blocks = L.blocks + M.blocks
    return QuadLattice(L.p, gram, blocks=blocks)


_HYPERBOLIC_CACHE: dict = {}


def hyperbolic_lattice(k: int, eps: int, p) -> QuadLattice:
    """Self-dual lattice of rank k and discriminant eps.

    For odd p every (k, eps) is realized as planes plus a small unimodular
    tail.  At p = 2 only even rank with eps = +1 is supported, as k/2
    copies of the plane q(x, y) = xy.
    """
    if eps not in (1, -1):
        raise LatticeError("eps must be +-1")
    if k < 0:
        raise LatticeError("rank must be >= 0")
    cached = _HYPERBOLIC_CACHE.get((k, eps, p))
    if cached is not None:
        return cached
    if k == 0:
        if eps != 1:
            raise LatticeError("rank 0 has discriminant +1")
        out = zero_lattice(p)
    elif p == 2:
        if k % 2 or eps != 1:
            raise LatticeError("at p=2 only even rank with eps=+1 is supported")
        out = zero_lattice(p)
        for _ in range(k // 2):
            out = direct_sum(out, plane_lattice(p))
    elif k % 2 == 0:
        planes = k // 2 if eps == 1 else k // 2 - 1
        out = zero_lattice(p)
        for _ in range(planes):
            out = direct_sum(out, plane_lattice(p))
        if eps == -1:
            n0 = smallest_nonresidue(p)
            out = direct_sum(out, diagonal_lattice([1, -n0], p))
    else:
        planes = (k - 1) // 2
        out = zero_lattice(p)
        for _ in range(planes):
            out = direct_sum(out, plane_lattice(p))
        # moment determinant of a plane is -1/4, a square class of -1;
        # pick the unit tail to hit the requested discriminant
        tail = None
        for a in (1, smallest_nonresidue(p)):
            disc = (
                Fraction(-1) ** (k * (k - 1) // 2) * Fraction(-1) ** planes * a
            )
            if quad_residue_symbol(disc, p) == eps:
                tail = a
                break
        if tail is None:
            raise LatticeError("unreachable: no unit tail matches the discriminant")
        out = direct_sum(out, diagonal_lattice([tail], p))
    _HYPERBOLIC_CACHE[(k, eps, p)] = out
    return out


def delta_lattice(N, p) -> QuadLattice:
    """Rank-3 lattice of the level-N determinant form: q(a,b,c) = -N a^2 - bc.

    Stored in the equivalent split shape <-N> + plane (the change of basis
    c -> -c identifies q = -bc with q = bc).
    """
    N = Fraction(N)
    if N == 0:
        raise LatticeError("delta lattice needs N != 0")
    return direct_sum(diagonal_lattice([-N], p), plane_lattice(p))


def twisted_hyperbolic(k: int, eps: int, N, i: int, p) -> QuadLattice:
    """The twisted lattice <-N p^(-2i)> + H_{k-2}^eps."""
    N = Fraction(N)
    n = valuation(N, p)
    if n is INFINITY:
        raise LatticeError("twist needs N != 0")
    if i < 0 or 2 * i > n:
        raise LatticeError(f"twist index out of range: 2*{i} > v_p(N)={n}")
    if k < 2:
        raise LatticeError("rank must be >= 2")
    head = diagonal_lattice([-N / Fraction(p) ** (2 * i)], p)
    if k == 2:
        return head
    return direct_sum(head, hyperbolic_lattice(k - 2, eps, p))


@dataclass(frozen=True)
class LatticeInvariants:
    rank: int
    chi: int | None  # None at p=2 (not computed)
    hasse: int
    val: int


def _det(rows):
    m = len(rows)
    a = [[Fraction(x) for x in row] for row in rows]
    det = Fraction(1)
    for col in range(m):
        piv = next((r for r in range(col, m) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, m):
            f = a[r][col] * inv
            if f:
                for c in range(col, m):
                    a[r][c] -= f * a[col][c]
    return det


def field_diagonalize(L: QuadLattice) -> list[Fraction]:
    """Diagonalize the quadratic space over Q_p, returning the q-values.

    Works at every p (field operations only); used for the Hasse invariant.
    """
    m = L.rank
    g = [
        [L.gram[i][j] if i != j else 2 * L.gram[i][j] for j in range(m)]
        for i in range(m)
    ]  # bilinear matrix
    basis = [[Fraction(1 if i == j else 0) for j in range(m)] for i in range(m)]

    def bform(x, y):
        return sum(x[i] * g[i][j] * y[j] for i in range(m) for j in range(m))

    diag = []
    remaining = list(basis)
    while remaining:
        # find a vector with nonzero norm, combining two if necessary
        v = next((w for w in remaining if bform(w, w) != 0), None)
        if v is None:
            w0 = remaining[0]
            partner = next((w for w in remaining[1:] if bform(w0, w) != 0), None)
            if partner is None:
                raise LatticeError("degenerate quadratic space")
            v = [a + b for a, b in zip(w0, partner)]
        nv = bform(v, v)
        diag.append(nv / 2)  # q-value
        remaining = [
            [wi - bform(w, v) / nv * vi for wi, vi in zip(w, v)]
            for w in remaining
            if w is not v
        ]
        remaining = [w for w in remaining if any(w)]
    if len(diag) != m:
        raise LatticeError("degenerate quadratic space")
    return diag


def invariants(L: QuadLattice) -> LatticeInvariants:
    """Rank, discriminant character chi (odd p), Hasse invariant, and val.

    chi is the extended residue symbol of (-1)^(m(m-1)/2) times the moment
    determinant; the Hasse invariant is prod_{i<j} (a_i, a_j)_p over a
    field diagonalization q = sum a_i x_i^2.  At p = 2 chi is reported as
    None: the even-rank convention there is not pinned down by anything
    this package needs.
    """
    detb = L.det_bilinear()
    if detb == 0:
        raise LatticeError("degenerate lattice")
    m = L.rank
    p = L.p
    if m == 0:
        return LatticeInvariants(0, 1, 1, 0)
    diag = field_diagonalize(L)
    hasse = 1
    for i in range(m):
        for j in range(i + 1, m):
            hasse *= hilbert_symbol(diag[i], diag[j], p)
    if p == 2:
        chi = None
    else:
        disc = Fraction(-1) ** (m * (m - 1) // 2) * L.det_moment()
        chi = quad_residue_symbol(disc, p)
    return LatticeInvariants(m, chi, hasse, L.val())


def space_det(L: QuadLattice) -> Fraction:
    """Determinant of the quadratic space (moment determinant, up to squares)."""
    d = L.det_moment()
    if d == 0:
        raise LatticeError("degenerate lattice")
    return d


def jordan_form(L: QuadLattice) -> list[tuple[Fraction, int]]:
    """Diagonalization over Z_p for odd p, as (unit, exponent) pairs.

    Uses symmetric row/column operations with minimal-valuation pivoting
    (ties broken by preferring diagonal pivots, then lowest index).  The
    result lists q-values split as unit * p^exponent, in pivot order.
    """
    p = L.p
    if p == 2:
        raise LatticeError("jordan_form requires odd p")
    m = L.rank
    b = L.bilinear_matrix()
    if _det(b) == 0:
        raise LatticeError("degenerate lattice")

    def v(x):
        return valuation(x, p) if x != 0 else INFINITY

    out = []
    idx = list(range(m))
    while idx:
        # minimal valuation entry among the active block
        best = None
        for ii, i in enumerate(idx):
            for j in idx[ii:]:
                x = b[i][j]
                if x == 0:
                    continue
                key = (v(x), i != j, i, j)
                if best is None or key < best[0]:
                    best = (key, i, j)
        if best is None:
            raise LatticeError("degenerate lattice")
        _, i, j = best
        if i != j:
            # make the diagonal entry (i,i) minimal: e_i += e_j
            for k in range(m):
                b[i][k] += b[j][k]
            for k in range(m):
                b[k][i] += b[k][j]
        piv = b[i][i]
        for r in idx:
            if r == i:
                continue
            f = b[r][i] / piv
            if f:
                for k in range(m):
                    b[r][k] -= f * b[i][k]
                for k in range(m):
                    b[k][r] -= f * b[k][i]
        q = piv / 2
        e = valuation(q, p)
        out.append((q / Fraction(p) ** e, e))
        idx.remove(i)
    return out


@dataclass(frozen=True)
class GrossKeatingPair:
    a: int
    b: int


def gross_keating(L: QuadLattice) -> GrossKeatingPair:
    """Sorted Jordan exponents of a rank-2 lattice (odd p)."""
    if L.rank != 2:
        raise LatticeError("gross_keating needs rank 2")
    e = sorted(exp for _, exp in jordan_form(L))
    return GrossKeatingPair(e[0], e[1])


def change_of_basis(L: QuadLattice, U) -> QuadLattice:
    """Transform the Gram record by an integer basis change f_j = sum U[i][j] e_i."""
    m = L.rank
    U = [[Fraction(x) for x in row] for row in U]
    b = L.bilinear_matrix()
    nb = [
        [
            sum(U[r][i] * b[r][s] * U[s][j] for r in range(m) for s in range(m))
            for j in range(m)
        ]
        for i in range(m)
    ]
    gram = [
        [nb[i][j] / 2 if i == j else nb[i][j] for j in range(m)]
        for i in range(m)
    ]
    return QuadLattice(L.p, gram, blocks=None)


def parse_lattice(spec: str, p) -> QuadLattice:
    """Parse the textual lattice grammar.

    diag:a1,a2,...  |  hyp:k:+|-  |  delta:N  |  sum:<spec>+<spec>
    Exact integers or rationals (a/b), no whitespace.
    """
    spec = spec.strip()
    if spec.startswith("sum:"):
        parts = _split_sum(spec[4:])
        out = zero_lattice(p)
        for part in parts:
            out = direct_sum(out, parse_lattice(part, p))
        return out
    if spec.startswith("diag:"):
        vals = [Fraction(tok) for tok in spec[5:].split(",") if tok]
        if not vals:
            raise LatticeError(f"empty diagonal in {spec!r}")
        return diagonal_lattice(vals, p)
    if spec.startswith("hyp:"):
        body = spec[4:]
        try:
            k_str, sign = body.split(":")
        except ValueError:
            raise LatticeError(f"bad hyperbolic spec {spec!r}") from None
        if sign not in ("+", "-"):
            raise LatticeError(f"bad sign in {spec!r}")
        return hyperbolic_lattice(int(k_str), 1 if sign == "+" else -1, p)
    if spec.startswith("delta:"):
        return delta_lattice(Fraction(spec[6:]), p)
    raise LatticeError(f"cannot parse lattice spec {spec!r}")


def _split_sum(body: str) -> list[str]:
    """Split 'sum:' bodies on '+' separators that begin a new sub-spec."""
    prefixes = ("diag:", "hyp:", "delta:", "sum:")
    parts = []
    current = ""
    i = 0
    while i < len(body):
        if body[i] == "+" and any(body[i + 1 :].startswith(pre) for pre in prefixes):
            parts.append(current)
            current = ""
            i += 1
            continue
        current += body[i]
        i += 1
    parts.append(current)
    if not all(parts):
        raise LatticeError(f"cannot split sum spec {body!r}")
    return parts
