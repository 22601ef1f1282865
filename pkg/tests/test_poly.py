from fractions import Fraction

from swb.poly import Poly, RationalFunction, lagrange_interpolate


def test_poly_ops():
    p = Poly([1, -1])  # 1 - X
    q = Poly([0, 0, 2])  # 2X^2
    assert (p * q).c == (0, 0, 2, -2)
    assert (p + q)(Fraction(1, 2)) == Fraction(1) - Fraction(1, 2) + Fraction(1, 2)
    assert p.derivative() == Poly([-1])
    assert (p - p).is_zero()


def test_poly_divmod():
    a = Poly([-1, 0, 1])  # X^2 - 1
    b = Poly([1, 1])  # X + 1
    q, r = a.divmod(b)
    assert q == Poly([-1, 1]) and r.is_zero()


def test_rational_function_reduction():
    f = RationalFunction(Poly([-1, 0, 1]), Poly([1, 1]))  # (X^2-1)/(X+1) = X-1
    assert f == RationalFunction(Poly([-1, 1]))
    g = RationalFunction(Poly([0, 2]), Poly([0, 0, 4]))  # 2X / 4X^2 = 1/(2X)
    assert g.num == Poly([Fraction(1, 2)]) and g.den == Poly([0, 1])


def test_rational_function_algebra():
    X = RationalFunction.X()
    f = (1 - X) / (1 + X)
    g = (1 + X) / (1 - X)
    assert f * g == RationalFunction(1)
    assert f + g == ((1 - X) * (1 - X) + (1 + X) * (1 + X)) / ((1 + X) * (1 - X))
    assert f(Fraction(1, 3)) == Fraction(1, 2)


def test_substitute():
    X = RationalFunction.X()
    f = (1 - 2 * X) / (1 + X)
    # X -> 3X
    g = f.substitute(3, 1)
    assert g == (1 - 6 * X) / (1 + 3 * X)
    # X -> 1/(2X): f(1/(2X)) = (1 - 1/X)/(1 + 1/(2X)) = (2X-2)/(2X+1)
    h = f.substitute(Fraction(1, 2), -1)
    assert h == (2 * X - 2) / (2 * X + 1)


def test_lagrange():
    pts = [(Fraction(1, 3), Fraction(1, 9)), (Fraction(1, 9), Fraction(1, 81)), (2, 4)]
    p = lagrange_interpolate(pts)
    assert p == Poly([0, 0, 1])
    # an honest cubic through four points
    target = Poly([1, Fraction(-1, 2), 0, 3])
    xs = [Fraction(1, k) for k in (2, 3, 5, 7)]
    q = lagrange_interpolate([(x, target(x)) for x in xs])
    assert q == target
