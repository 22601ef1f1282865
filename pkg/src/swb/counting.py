"""Exact counting of quadratic-congruence solutions over Z/p^d.

This is the brute-force side of the package: given an integral quadratic
lattice M (the target) and a diagonal source Gram, count tuples
(x_1, ..., x_n) in (M/p^d M)^n satisfying

    q(x_i) = q(l_i)   and   (x_i, x_j) = (l_i, l_j)   (i < j)

under one of two congruence conventions:

  * "A": all congruences mod p^d;
  * "B": variables mod 2p^d, q-values mod p^d, bilinear values mod 2p^d,
    with the raw count divided by p^(n*m) so the same normalization
    p^(d*dim) applies.  For odd p the two conventions coincide.

Everything is organized so that no enumeration ever touches more than a
few p^(2d)-sized boxes:

  * rank-1 blocks <a> are histogrammed by a single O(p^e) pass;
  * hyperbolic planes q(x,y) = xy have a closed-form histogram;
  * for odd p all histograms are compressed to functions of the square
    class of the residue (they are invariant under multiplication by
    unit squares, since q is homogeneous quadratic), so convolution of
    blocks costs O(d^2) instead of O(p^(2d));
  * tuple counts are reduced to vector counts by stratifying the first
    vector by content and q-value and replacing it with an orbit
    representative.  Over Z_p with p odd this is Witt's extension theorem
    for unimodular quadratic lattices; at p = 2 it is Eichler-transvection
    transitivity on unimodular vectors of hyperbolic sums, which the test
    suite checks against literal enumeration.

Counts are exact Python integers throughout.
"""

from __future__ import annotations

from fractions import Fraction

from swb.lattice import PLANE, QuadLattice, jordan_form
from swb.padic import legendre, rational_mod, smallest_nonresidue, valuation

DEFAULT_BUDGET = 2**32


class BudgetExceeded(Exception):
    def __init__(self, needed, limit, what=""):
        self.needed = needed
        self.limit = limit
        self.what = what
        super().__init__(
            f"enumeration budget exceeded: needs ~{needed} units, limit {limit}"
            + (f" ({what})" if what else "")
        )


class EngineUnsupported(Exception):
    """Shape outside the fast engine; callers may fall back or skip."""


class Budget:
    def __init__(self, limit=DEFAULT_BUDGET):
        self.limit = limit
        self.used = 0

    def charge(self, amount, what=""):
        self.used += amount
        if self.used > self.limit:
            raise BudgetExceeded(self.used, self.limit, what)


def _no_budget():
    b = Budget(limit=float("inf"))
    return b


# ---------------------------------------------------------------------------
# residue-class helpers


def res_valuation(c: int, p: int, e: int) -> int:
    """Valuation of the residue c mod p^e, capped at e (v(0) = e)."""
    if e == 0 or c % p**e == 0:
        return e
    v = 0
    while c % p == 0:
        c //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# histograms
#
# A histogram records, for each residue c mod p^e, the number of lattice
# vectors x in M/p^e M with q(x) = c.  Two representations are used:
# dense arrays (p = 2 and tiny cases) and square-class-compressed tables
# (odd p): the value at c depends only on (v(c), legendre(unit part)).


class DenseHist:
    __slots__ = ("p", "e", "a")

    def __init__(self, p, e, a):
        self.p = p
        self.e = e
        self.a = a  # list of length p^e

    @classmethod
    def unit(cls, p, e):
        a = [0] * p**e
        a[0] = 1
        return cls(p, e, a)

    def eval(self, c):
        return self.a[c % len(self.a)]

    def total(self):
        return sum(self.a)

    def conv(self, other):
        n = len(self.a)
        out = [0] * n
        for z, x in enumerate(self.a):
            if not x:
                continue
            for w, y in enumerate(other.a):
                if y:
                    out[(z + w) % n] += x * y
        return DenseHist(self.p, self.e, out)


class ClassHist:
    """Square-class-invariant histogram for odd p.

    vals[2v + s] is the value on residues with valuation v and unit part
    of Legendre class s (s = 0 for residues, 1 for non-residues);
    vals[2e] is the value at the zero residue.
    """

    __slots__ = ("p", "e", "vals")

    def __init__(self, p, e, vals):
        self.p = p
        self.e = e
        self.vals = vals

    @classmethod
    def unit(cls, p, e):
        vals = [0] * (2 * e + 1)
        vals[2 * e] = 1
        return cls(p, e, vals)

    def _class_index(self, c):
        m = self.p**self.e
        c %= m
        if c == 0:
            return 2 * self.e
        v = res_valuation(c, self.p, self.e)
        u = c // self.p**v
        s = 0 if legendre(u, self.p) == 1 else 1
        return 2 * v + s

    def eval(self, c):
        return self.vals[self._class_index(c)]

    def class_size(self, idx):
        if idx == 2 * self.e:
            return 1
        v = idx // 2
        return self.p ** (self.e - v - 1) * (self.p - 1) // 2

    def total(self):
        return sum(self.vals[i] * self.class_size(i) for i in range(2 * self.e + 1))

    def conv(self, other):
        p, e = self.p, self.e
        nres = smallest_nonresidue(p)
        base = _base_pair_table(p)
        out = [0] * (2 * e + 1)
        classes = list(range(2 * e + 1))
        for ic in classes:
            if ic == 2 * e:
                crep = 0
                vc = e
            else:
                vc = ic // 2
                crep = (1 if ic % 2 == 0 else nres) * p**vc
            acc = 0
            for ia in classes:
                fa = self.vals[ia]
                if not fa:
                    continue
                for ib in classes:
                    fb = other.vals[ib]
                    if not fb:
                        continue
                    acc += fa * fb * _pair_count_classes(p, e, ia, ib, crep, vc, base)
            out[ic] = acc
        return ClassHist(p, e, out)


def _base_pair_table(p):
    """N[s1][s2][c0] = #{u in F_p^*: class(u)=s1, c0-u a unit of class s2}."""
    tab = _BASE_TABLES.get(p)
    if tab is None:
        tab = [[[0] * p for _ in range(2)] for _ in range(2)]
        for u in range(1, p):
            s1 = 0 if legendre(u, p) == 1 else 1
            for c0 in range(p):
                w = (c0 - u) % p
                if w == 0:
                    continue
                s2 = 0 if legendre(w, p) == 1 else 1
                tab[s1][s2][c0] += 1
        _BASE_TABLES[p] = tab
    return tab


_BASE_TABLES: dict = {}


def _pair_count_classes(p, e, ia, ib, crep, vc, base):
    """#{(z, w): z in class ia, w in class ib, z + w = crep mod p^e}."""
    zero = 2 * e
    if ia == zero and ib == zero:
        return 1 if vc == e else 0
    if ia == zero:
        return 1 if _class_of(p, e, crep) == ib else 0
    if ib == zero:
        return 1 if _class_of(p, e, crep) == ia else 0
    va, sa = ia // 2, ia % 2
    vb, sb = ib // 2, ib % 2
    if va < vb:
        if vc != va or _class_of(p, e, crep) != ia:
            return 0
        return p ** (e - vb - 1) * (p - 1) // 2
    if vb < va:
        if vc != vb or _class_of(p, e, crep) != ib:
            return 0
        return p ** (e - va - 1) * (p - 1) // 2
    v = va
    if vc < v:
        return 0
    E = e - v
    c0 = (crep // p**v) % p if vc < e else 0
    return p ** (E - 1) * base[sa][sb][c0]


def _class_of(p, e, c):
    m = p**e
    c %= m
    if c == 0:
        return 2 * e
    v = res_valuation(c, p, e)
    u = c // p**v
    return 2 * v + (0 if legendre(u, p) == 1 else 1)


def _plane_hist(p, e):
    """Histogram of the plane q(x, y) = xy over Z/p^e."""
    if e == 0:
        return _unit_hist(p, 0)
    vals_by_v = [(v + 1) * p ** (e - 1) * (p - 1) for v in range(e)]
    zero = e * p ** (e - 1) * (p - 1) + p**e
    if p == 2:
        a = [0] * 2**e
        for c in range(2**e):
            v = res_valuation(c, 2, e)
            a[c] = zero if v == e else vals_by_v[v]
        return DenseHist(2, e, a)
    vals = [0] * (2 * e + 1)
    for v in range(e):
        vals[2 * v] = vals_by_v[v]
        vals[2 * v + 1] = vals_by_v[v]
    vals[2 * e] = zero
    return ClassHist(p, e, vals)


def _rank1_hist(p, e, a_res):
    """Histogram of q(x) = a x^2 over Z/p^e, a given as residue mod p^e."""
    m = p**e
    if e == 0:
        return _unit_hist(p, 0)
    dense = [0] * m
    for x in range(m):
        dense[a_res * x * x % m] += 1
    if p == 2:
        return DenseHist(2, e, dense)
    return _compress_to_class(p, e, dense)


def _block2_hist(p, e, q1, b, q2):
    """Histogram of q(x, y) = q1 x^2 + b x y + q2 y^2 (residues mod p^e)."""
    m = p**e
    if e == 0:
        return _unit_hist(p, 0)
    dense = [0] * m
    for x in range(m):
        r1 = q1 * x * x % m
        rb = b * x % m
        for y in range(m):
            dense[(r1 + rb * y + q2 * y * y) % m] += 1
    if p == 2:
        return DenseHist(2, e, dense)
    return _compress_to_class(p, e, dense)


def _compress_to_class(p, e, dense):
    ch = ClassHist(p, e, [0] * (2 * e + 1))
    seen = [None] * (2 * e + 1)
    for c, cnt in enumerate(dense):
        idx = ch._class_index(c)
        if seen[idx] is None:
            seen[idx] = cnt
        elif seen[idx] != cnt:
            raise AssertionError("histogram is not square-class invariant")
    ch.vals = [x or 0 for x in seen]
    return ch


def _unit_hist(p, e):
    return DenseHist(p, e, [1]) if e == 0 else (
        DenseHist(p, e, [1] + [0] * (p**e - 1)) if p == 2 else ClassHist.unit(p, e)
    )


# ---------------------------------------------------------------------------
# target specifications and cached histograms
#
# A target is (planes, diags): an orthogonal sum of `planes` hyperbolic
# planes and rank-1 pieces <a>.  diags entries are Fractions with
# non-negative valuation.

_HIST_CACHE: dict = {}


def clear_caches():
    _HIST_CACHE.clear()
    _ITAB_CACHE.clear()


def target_key(p, e, planes, diags):
    return (p, e, planes, tuple(sorted(rational_mod(a, p, e) for a in diags)))


def target_hist(p, e, planes, diags, budget=None):
    key = target_key(p, e, planes, diags)
    h = _HIST_CACHE.get(key)
    if h is not None:
        return h
    budget = budget or _no_budget()
    if p == 2 and e > 0:
        budget.charge(2**e, "dense histogram")
    if e == 0:
        h = _unit_hist(p, 0)
    elif planes == 0 and not diags:
        h = _unit_hist(p, e)
    elif planes > 0:
        sub = target_hist(p, e, planes - 1, diags, budget)
        budget.charge(4 * e * e if p != 2 else p ** (2 * e), "hist conv")
        h = sub.conv(_plane_hist(p, e))
    else:
        sub = target_hist(p, e, 0, diags[:-1], budget)
        budget.charge(p**e + (4 * e * e if p != 2 else p ** (2 * e)), "hist conv")
        h = sub.conv(_rank1_hist(p, e, rational_mod(diags[-1], p, e)))
    _HIST_CACHE[key] = h
    return h


def vector_count(p, planes, diags, e_var, e_q, c, budget=None):
    """#{x in M/p^e_var: q(x) = c mod p^e_q}, with e_var >= e_q."""
    if e_var < e_q:
        raise ValueError("variable precision below congruence precision")
    m = 2 * planes + len(diags)
    h = target_hist(p, e_q, planes, diags, budget)
    return p ** (m * (e_var - e_q)) * h.eval(c)


def primitive_vector_count(p, planes, diags, e_var, e_q, c, budget=None):
    """Count of x not in pM with q(x) = c mod p^e_q, x over M/p^e_var."""
    m = 2 * planes + len(diags)
    total = vector_count(p, planes, diags, e_var, e_q, c, budget)
    if e_var == 0:
        return 0
    # x = p x', x' over M/p^(e_var - 1); q(x) = p^2 q(x')
    if e_q <= 2:
        if c % p**e_q == 0:
            sub = p ** (m * (e_var - 1))
        else:
            sub = 0
    else:
        if c % p**2 == 0:
            sub = vector_count(p, planes, diags, e_var - 1, e_q - 2, c // p**2, budget)
        else:
            sub = 0
    return total - sub


# ---------------------------------------------------------------------------
# strata of the first vector
#
# Vectors x mod p^D split by content j (x = p^j x' with x' primitive mod
# p^(D-j)) and by gamma = q(x') mod p^(D-j).  The constraint
# q(x) = c mod p^dq pins gamma modulo p^(dq-2j).


def strata_list(c, p, D, dq):
    out = []
    for j in range(D):
        egam = D - j
        t = dq - 2 * j
        if t > 0:
            if c % p ** min(2 * j, dq) != 0:
                continue
            base = (c // p ** (2 * j)) % p**t
            step = p**t
        else:
            if c % p**dq != 0:
                continue
            base = 0
            step = 1
        for u in range(p**egam // step):
            out.append((j, base + step * u))
    return out


def _lift(res, p, e):
    """Integer lift of a residue mod p^e into [0, p^e)."""
    return res % p**e


# ---------------------------------------------------------------------------
# odd p: pair and triple counts via orbit reduction


def _jordan_values_2x2(p, q1, bil, q2):
    """Jordan-split the rank-2 quadratic block [q1, bil; q2] over Z_p (p odd)."""
    L = QuadLattice(p, [[Fraction(q1), Fraction(bil)], [Fraction(bil), Fraction(q2)]])
    return [u * Fraction(p) ** e for u, e in jordan_form(L)]


def _constrained_plane_host(p, planes, diags, j, gamma_lift, D):
    """Solution module of (p^j (e1 + gamma e2), y) = 0 on planes+diags.

    Returns (planes', diags', divisor_exponent): the lattice M'' whose
    precision-D histogram, divided by p^divisor, counts constrained
    vectors y mod p^D.
    """
    if planes < 1:
        raise EngineUnsupported("no hyperbolic plane to host the representative")
    if j == 0:
        return planes - 1, tuple(diags) + (Fraction(-gamma_lift),), 0
    vals = _jordan_values_2x2(p, -gamma_lift, Fraction(p) ** (D - j), 0)
    return planes - 1, tuple(diags) + tuple(vals), D - j


def _find_rep_dense(p, diags, gamma_lift, e, budget):
    """Primitive rep with q = gamma on a unit diagonal lattice (odd p).

    Searches solutions of sum a_i x_i^2 = gamma mod p with a unit
    coordinate and Hensel-lifts that coordinate to precision e.  Returns
    the integer coordinate vector, or None when no primitive solution
    exists mod p (in which case the stratum weight vanishes).
    """
    t = len(diags)
    a = [rational_mod(x, p, e) for x in diags]
    g = gamma_lift % p**e
    sol = None
    budget.charge(p**t, "dense representative search")
    for mask in range(1, p**t):
        coords = []
        mm = mask
        for _ in range(t):
            coords.append(mm % p)
            mm //= p
        if all(c == 0 for c in coords):
            continue
        if sum(ai * ci * ci for ai, ci in zip(a, coords)) % p == g % p:
            sol = coords
            break
    if sol is None:
        return None
    istar = next(i for i, c in enumerate(sol) if c % p != 0)
    # Newton iteration on coordinate istar
    m = p**e
    rest = sum(a[i] * sol[i] * sol[i] for i in range(t) if i != istar) % m
    w = sol[istar]
    f = (a[istar] * w * w + rest - g) % m
    while f != 0:
        fp = 2 * a[istar] * w % m
        w = (w - f * pow(fp, -1, m)) % m
        f = (a[istar] * w * w + rest - g) % m
    rep = list(sol)
    rep[istar] = w
    return rep


def _constrained_dense_host(p, planes, diags, rep, j, D):
    """Solution module of (p^j rep, y) = 0 with rep on the diag coords."""
    t = len(diags)
    lam = [2 * Fraction(diags[i]) * rep[i] for i in range(t)]
    istar = max(range(t), key=lambda i: (valuation(lam[i], p) == 0, -i))
    if lam[istar] == 0 or valuation(lam[istar], p) != 0:
        raise EngineUnsupported("representative has no unit gradient coordinate")
    mu = [lam[i] / lam[istar] for i in range(t)]
    astar = Fraction(diags[istar])
    gens = []
    for i in range(t):
        if i == istar:
            continue
        gens.append((i, -mu[i]))  # e_i - mu_i e_istar
    rank = len(gens) + 1
    gram = [[Fraction(0)] * rank for _ in range(rank)]
    for r, (i, ci) in enumerate(gens):
        gram[r][r] = Fraction(diags[i]) + ci * ci * astar
        for s in range(r + 1, len(gens)):
            k, ck = gens[s]
            gram[r][s] = gram[s][r] = 2 * ci * ck * astar
    # slack generator p^(D-j) e_istar
    slack = Fraction(p) ** (D - j)
    for r, (i, ci) in enumerate(gens):
        gram[r][-1] = gram[-1][r] = 2 * ci * slack * astar
    gram[-1][-1] = slack * slack * astar
    vals = [u * Fraction(p) ** e for u, e in jordan_form(QuadLattice(p, gram))]
    return planes, tuple(vals), D - j


def _pair_count_odd(p, planes, diags, c1, c2, b, D, budget):
    """#{(x,y) in (M/p^D)^2: q(x)=c1, q(y)=c2, (x,y)=b mod p^D}, odd p."""
    m = 2 * planes + len(diags)
    if m == 0:
        return 1 if (c1 == 0 and c2 == 0 and b == 0) else 0
    if m == 1:
        return _pair_count_rank1(p, diags[0], c1, c2, b, D, D, budget)
    self_dual = all(valuation(a, p) == 0 for a in diags)
    if b % p**D != 0:
        raise EngineUnsupported("nonzero bilinear source values")
    c1, c2 = c1 % p**D, c2 % p**D
    if not self_dual and c1 % p == 0:
        if c2 % p != 0:
            c1, c2 = c2, c1
        else:
            raise EngineUnsupported(
                "pair count on a non-self-dual target needs a unit q-value"
            )
    total = 0
    for j, gamma in strata_list(c1, p, D, D):
        if not self_dual and (j > 0 or gamma % p == 0):
            raise EngineUnsupported("non-unit stratum on non-self-dual target")
        W = primitive_vector_count(p, planes, diags, D - j, D - j, gamma, budget)
        if W == 0:
            continue
        budget.charge(p**D + 8 * D * D, "pair stratum")
        if planes >= 1:
            rp, rd, divisor = _constrained_plane_host(p, planes, diags, j, _lift(gamma, p, D - j), D)
        else:
            rep = _find_rep_dense(p, diags, _lift(gamma, p, D - j), D - j, budget)
            if rep is None:
                raise AssertionError("positive stratum weight with no representative")
            rp, rd, divisor = _constrained_dense_host(p, planes, diags, rep, j, D)
        inner = vector_count(p, rp, rd, D, D, c2, budget)
        q, r = divmod(inner, p**divisor)
        if r:
            raise AssertionError("constrained count not divisible by coset size")
        total += W * q
    if c1 % p**D == 0:
        total += vector_count(p, planes, diags, D, D, c2, budget)
    return total


def _pair_count_rank1(p, a, c1, c2, b, D, dq, budget):
    m = p**D
    mq = p**dq
    budget.charge(p ** (2 * D), "rank-1 pair enumeration")
    ar = rational_mod(a, p, D)
    xs = [x for x in range(m) if ar * x * x % mq == c1 % mq]
    ys = [y for y in range(m) if ar * y * y % mq == c2 % mq]
    bb = b % m
    return sum(1 for x in xs for y in ys if 2 * ar * x * y % m == bb)


def _triple_count_odd(p, planes, diags, cs, D, budget):
    c1, c2, c3 = cs
    if all(c % p == 0 for c in cs):
        raise EngineUnsupported("triple count needs a unit q-value in the source")
    order = max(range(3), key=lambda i: cs[i] % p != 0)
    c1, (c2, c3) = cs[order], tuple(cs[i] for i in range(3) if i != order)
    if planes < 1:
        raise EngineUnsupported("triple count needs a hyperbolic plane")
    if not all(valuation(a, p) == 0 for a in diags):
        raise EngineUnsupported("triple count needs a self-dual target")
    W = vector_count(p, planes, diags, D, D, c1, budget)
    if W == 0:
        return 0
    rp, rd, _ = _constrained_plane_host(p, planes, diags, 0, _lift(c1, p, D), D)
    return W * _pair_count_odd(p, rp, rd, c2, c3, 0, D, budget)


# ---------------------------------------------------------------------------
# p = 2: pair and triple counts
#
# Pure hyperbolic sums have rigorous orbit theory (Eichler transvections
# act transitively on primitive = unimodular vectors of given q-value), so
# a pair count against H^r is reduced to per-stratum tables
# I[delta][beta] = #{y: q(y)=beta, (rep, y)=delta}.  A target <w> + H^r is
# handled by summing the pure-H tables over the two <w>-coordinates.

_ITAB_CACHE: dict = {}


def _h_rest_coarse(r, D, dq, budget):
    """beta-array: #{y in H^(r-1)/2^D: q(y) = beta mod 2^dq}."""
    h = target_hist(2, dq, r - 1, (), budget)
    scale = 2 ** ((2 * r - 2) * (D - dq))
    return [scale * h.eval(c) for c in range(2**dq)]


def _pair_table_2(r, D, dq, j, gamma, budget):
    """I[delta][beta] over H^r for the representative 2^j (e1 + gamma e2)."""
    key = (r, D, dq, j, gamma)
    tab = _ITAB_CACHE.get(key)
    if tab is not None:
        return tab
    m = 2**D
    mq = 2**dq
    budget.charge(2 ** (2 * D) + 2 ** (D - j) * 2 ** (2 * dq), "p=2 pair table")
    P: dict[int, dict[int, int]] = {}
    pj = 2**j
    for y1 in range(m):
        gy1 = gamma * y1
        for y2 in range(m):
            delta = pj * (y2 + gy1) % m
            t = y1 * y2 % mq
            row = P.get(delta)
            if row is None:
                row = P[delta] = {}
            row[t] = row.get(t, 0) + 1
    HR = _h_rest_coarse(r, D, dq, budget)
    tab = {}
    for delta, row in P.items():
        arr = [0] * mq
        for t, cnt in row.items():
            for beta in range(mq):
                arr[beta] += cnt * HR[(beta - t) % mq]
        tab[delta] = arr
    _ITAB_CACHE[key] = tab
    return tab


def _pair_point_2(r, D, dq, j, gamma, beta, delta, budget):
    """Single-entry evaluation of I[delta][beta] over H^r: one pass over
    the host-plane solutions of the linear constraint."""
    m = 2**D
    mq = 2**dq
    if delta % 2 ** min(j, D) != 0:
        return 0
    budget.charge(2 ** (D + j) + 2**dq, "p=2 pair point")
    w0 = (delta // 2**j) % 2 ** (D - j)
    HR = _h_rest_coarse(r, D, dq, budget)
    total = 0
    step = 2 ** (D - j)
    for y1 in range(m):
        base = w0 - gamma * y1
        for s in range(2**j):
            y2 = (base + step * s) % m
            total += HR[(beta - y1 * y2) % mq]
    return total


def _hyperbolic_pair_count_2(r, alpha, beta, delta, D, dq, budget, bulk=False):
    """#{(x,y) in (H^r/2^D)^2: q(x)=alpha, q(y)=beta mod 2^dq, (x,y)=delta mod 2^D}.

    With bulk=True the per-stratum (beta, delta)-tables are built and
    cached (worth it when a dense coordinate box makes many queries);
    otherwise each stratum is answered by a single direct pass.
    """
    if r == 0:
        ok = alpha % 2**dq == 0 and beta % 2**dq == 0 and delta % 2**D == 0
        return 1 if ok else 0
    total = 0
    for j, gamma in strata_list(alpha, 2, D, dq):
        W = primitive_vector_count(2, r, (), D - j, D - j, gamma, budget)
        if W == 0:
            continue
        if bulk:
            tab = _pair_table_2(r, D, dq, j, gamma % 2 ** (D - j), budget)
            arr = tab.get(delta % 2**D)
            inner = arr[beta % 2**dq] if arr is not None else 0
        else:
            inner = _pair_point_2(r, D, dq, j, gamma % 2 ** (D - j), beta, delta, budget)
        total += W * inner
    if alpha % 2**dq == 0 and delta % 2**D == 0:
        total += vector_count(2, r, (), D, dq, beta, budget)
    return total


def _pair_count_2(planes, diags, c1, c2, b, D, dq, budget):
    if len(diags) == 0:
        return _hyperbolic_pair_count_2(planes, c1, c2, b, D, dq, budget)
    if len(diags) > 1:
        raise EngineUnsupported("p=2 pair counts support at most one rank-1 block")
    w = rational_mod(diags[0], 2, D)
    m = 2**D
    mq = 2**dq
    budget.charge(2 ** (2 * D), "p=2 dense fold")
    memo: dict[tuple[int, int, int], int] = {}
    total = 0
    for x0 in range(m):
        alpha = (c1 - w * x0 * x0) % mq
        coup = 2 * w * x0 % m
        for y0 in range(m):
            betab = (c2 - w * y0 * y0) % mq
            delta = (b - coup * y0) % m
            key2 = (alpha, betab, delta)
            val = memo.get(key2)
            if val is None:
                val = _hyperbolic_pair_count_2(
                    planes, alpha, betab, delta, D, dq, budget, bulk=True
                )
                memo[key2] = val
            total += val
    return total


def _triple_count_2(planes, diags, cs, D, dq, budget):
    if diags:
        raise EngineUnsupported("p=2 triple counts need a hyperbolic-sum target")
    if all(c % 2 == 0 for c in cs):
        raise EngineUnsupported("triple count needs a unit q-value in the source")
    order = max(range(3), key=lambda i: cs[i] % 2 != 0)
    c1, (c2, c3) = cs[order], tuple(cs[i] for i in range(3) if i != order)
    if planes < 1:
        raise EngineUnsupported("triple count needs a hyperbolic plane")
    total = 0
    for gamma_top in range(c1 % 2**dq, 2**D, 2**dq):
        W = vector_count(2, planes, (), D, D, gamma_top, budget)
        if W == 0:
            continue
        total += W * _pair_count_2(planes - 1, (Fraction(-gamma_top),), c2, c3, 0, D, dq, budget)
    return total


# ---------------------------------------------------------------------------
# public entry points


def _engine_target(M: QuadLattice):
    """(planes, diags) for the counting engine, re-diagonalizing if needed."""
    if M.blocks is not None:
        planes = sum(1 for blk in M.blocks if blk == PLANE)
        diags = tuple(blk[1] for blk in M.blocks if blk != PLANE)
        return planes, diags
    if M.p == 2:
        raise EngineUnsupported("unstructured target at p=2")
    vals = [u * Fraction(M.p) ** e for u, e in jordan_form(M)]
    return 0, tuple(vals)


def _engine_source(L: QuadLattice):
    if L.rank and L.det_bilinear() == 0:
        raise ValueError("degenerate source lattice")
    if L.is_diagonal():
        return L.diagonal_values()
    if L.p == 2:
        raise EngineUnsupported("non-diagonal source at p=2")
    return tuple(u * Fraction(L.p) ** e for u, e in jordan_form(L))


def _conv_params(p, d, convention):
    if convention == "B" and p == 2:
        return d + 1, d
    if convention in ("A", "B"):
        return d, d
    raise ValueError(f"unknown convention {convention!r}")


def count_reps(
    M: QuadLattice,
    L: QuadLattice,
    d: int,
    primitive: bool = False,
    convention: str = "A",
    budget: Budget | None = None,
) -> int:
    """Number of Gram-preserving n-tuples in (M/p^d M)^n for the source L.

    With `primitive`, additionally require the coordinate matrix to have
    full rank mod p (source rank 1 only on the fast path).  Convention
    "B" counts with variables mod 2p^d, q-values mod p^d and bilinear
    congruences mod 2p^d; the raw count is always divisible by
    p^(nm - n(n-1)/2) (translating solutions by p^d w changes each
    bilinear value by p^d * linear(w)), and dividing by that power makes
    the usual p^(d dim) normalization apply.  At odd p, "B" equals "A".
    """
    if M.p != L.p:
        raise ValueError("count_reps needs matching primes")
    if d < 0:
        raise ValueError("d must be >= 0")
    p = M.p
    budget = budget or Budget()
    D, dq = _conv_params(p, d, convention)
    planes, diags = _engine_target(M)
    qs = _engine_source(L)
    n = len(qs)
    m = 2 * planes + len(diags)
    norm = p ** ((D - d) * (n * m - n * (n - 1) // 2))
    if d == 0:
        return 1
    if n == 0:
        return 1
    cs = [rational_mod(q, p, dq) for q in qs]
    if n == 1:
        if primitive:
            raw = primitive_vector_count(p, planes, diags, D, dq, cs[0], budget)
        else:
            raw = vector_count(p, planes, diags, D, dq, cs[0], budget)
        return _exact_div(raw, norm)
    if primitive:
        raise EngineUnsupported("primitive counts only on rank-1 sources")
    if n == 2:
        if p == 2:
            raw = _pair_count_2(planes, diags, cs[0], cs[1], 0, D, dq, budget)
        else:
            raw = _pair_count_odd(p, planes, diags, cs[0], cs[1], 0, D, budget)
        return _exact_div(raw, norm)
    if n == 3:
        if p == 2:
            raw = _triple_count_2(planes, diags, cs, D, dq, budget)
        else:
            raw = _triple_count_odd(p, planes, diags, cs, D, budget)
        return _exact_div(raw, norm)
    raise EngineUnsupported("source rank > 3 is out of scope")


def _exact_div(a, b):
    q, r = divmod(a, b)
    if r:
        raise AssertionError("count not divisible by convention normalization")
    return q


# ---------------------------------------------------------------------------
# reference engine: literal enumeration (for tests and tiny cases)


def naive_count_reps(
    M: QuadLattice,
    L: QuadLattice,
    d: int,
    primitive: bool = False,
    convention: str = "A",
    limit: int = 4_000_000_000,
) -> int:
    """Literal enumeration of n-tuples; exponentially slow, for testing."""
    p = M.p
    D, dq = _conv_params(p, d, convention)
    if d == 0 or L.rank == 0:
        return 1
    m = M.rank
    n = L.rank
    mod = p**D
    modq = p**dq
    if mod**m > 20_000_000:
        raise BudgetExceeded(mod**m, 20_000_000, "naive enumeration")
    B = [[rational_mod(x, p, D) for x in row] for row in M.bilinear_matrix()]
    qdiag = [rational_mod(M.gram[i][i], p, D) for i in range(m)]
    souq = [rational_mod(L.gram[i][i], p, dq) for i in range(n)]
    soub = [[rational_mod(L.gram[i][j], p, D) for j in range(n)] for i in range(n)]

    vecs = []
    qs = []
    for idx in range(mod**m):
        x = []
        k = idx
        for _ in range(m):
            x.append(k % mod)
            k //= mod
        qv = sum(qdiag[i] * x[i] * x[i] for i in range(m))
        qv += sum(B[i][j] * x[i] * x[j] for i in range(m) for j in range(i + 1, m))
        vecs.append(tuple(x))
        qs.append(qv % mod)

    def bil(x, y):
        return sum(B[i][j] * x[i] * y[j] for i in range(m) for j in range(m)) % mod

    def prim_ok(rows):
        if not primitive:
            return True
        # rank of the coordinate matrix mod p
        a = [[v % p for v in row] for row in rows]
        rank = 0
        col = 0
        for row_i in range(len(a)):
            piv = None
            while col < m and piv is None:
                for rr in range(rank, len(a)):
                    if a[rr][col] % p:
                        piv = rr
                        break
                if piv is None:
                    col += 1
            if piv is None:
                break
            a[rank], a[piv] = a[piv], a[rank]
            inv = pow(a[rank][col], -1, p)
            for rr in range(len(a)):
                if rr != rank and a[rr][col] % p:
                    f = a[rr][col] * inv % p
                    for cc in range(m):
                        a[rr][cc] = (a[rr][cc] - f * a[rank][cc]) % p
            rank += 1
            col += 1
        return rank == n

    cand = [
        [i for i, qv in enumerate(qs) if qv % modq == souq[k] % modq]
        for k in range(n)
    ]
    work = 1
    for c in cand:
        work *= max(1, len(c))
    if work > limit:
        raise BudgetExceeded(work, limit, "naive enumeration")
    count = 0
    if n == 1:
        for i in cand[0]:
            if prim_ok([vecs[i]]):
                count += 1
    elif n == 2:
        for i in cand[0]:
            xi = vecs[i]
            for jj in cand[1]:
                if bil(xi, vecs[jj]) == soub[0][1]:
                    if prim_ok([xi, vecs[jj]]):
                        count += 1
    elif n == 3:
        for i in cand[0]:
            xi = vecs[i]
            for jj in cand[1]:
                yj = vecs[jj]
                if bil(xi, yj) != soub[0][1]:
                    continue
                for kk in cand[2]:
                    zk = vecs[kk]
                    if bil(xi, zk) == soub[0][2] and bil(yj, zk) == soub[1][2]:
                        if prim_ok([xi, yj, zk]):
                            count += 1
    else:
        raise EngineUnsupported("naive enumeration supports n <= 3")
    norm = p ** ((D - d) * (n * m - n * (n - 1) // 2))
    return _exact_div(count, norm)
