#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "cobarlab/poly.hpp"

#include <doctest.h>

using namespace cobarlab;

TEST_CASE("polynomial arithmetic over Q") {
    Poly x = Poly::var(0), y = Poly::var(1);
    Poly p = (x + y) * (x - y);
    CHECK(p == x * x - y * y);
    CHECK(p.total_degree() == 2);
    CHECK_FALSE(p.is_affine());
    CHECK((x + Poly::constant(Rat(1))).is_affine());
    CHECK((p - p).is_zero());
    CHECK(p.eval({Rat(3), Rat(2)}) == Rat(5));

    Poly q = p.subst(0, y + Poly::constant(Rat(1)));  // (y+1)^2 - y^2 = 2y+1
    CHECK(q == Rat(2) * y + Poly::constant(Rat(1)));

    // renaming keeps parameters fixed
    Poly l = Poly::param(0);
    Poly r = (x * l).rename([](int i) { return i + 5; });
    CHECK(r == Poly::var(5) * l);
    CHECK(r.eval({Rat(0), Rat(0), Rat(0), Rat(0), Rat(0), Rat(7)}, {Rat(2)}) == Rat(14));

    CHECK(p.str() == "-x1^2 + x0^2");  // monomial order: exponent-vector lex
    CHECK((x * y - Poly::constant(Rat(1) / 2)).str() == "-1/2 + x0*x1");
}

TEST_CASE("exact affine feasibility") {
    Poly x = Poly::var(0), y = Poly::var(1);
    Poly one = Poly::constant(Rat(1));

    // unit square intersected with x + y <= 1/2: full-dimensional
    auto r = full_dimensional({x, y, one - x, one - y, Poly::constant(Rat(1) / 2) - x - y});
    REQUIRE(r.feasible);
    Rat wx = r.witness[0], wy = r.witness[1];
    CHECK(wx > 0);
    CHECK(wy > 0);
    CHECK(wx + wy < Rat(1) / 2);

    // slab x >= 0, -x >= 0 has no interior but is weakly feasible
    CHECK_FALSE(full_dimensional({x, -x, y, one - y}).feasible);
    AffineSystem weak;
    weak.add(x);
    weak.add(-x);
    weak.add(y);
    weak.add(one - y);
    auto w = affine_feasible(weak);
    REQUIRE(w.feasible);
    CHECK(w.witness[0] == 0);

    // infeasible strict chain
    AffineSystem bad;
    bad.add(x - one, true);
    bad.add(-x, true);
    CHECK_FALSE(affine_feasible(bad).feasible);

    // unbounded direction still yields a witness
    AffineSystem unb;
    unb.add(x - Poly::constant(Rat(3)), true);
    auto u = affine_feasible(unb);
    REQUIRE(u.feasible);
    CHECK(u.witness[0] > 3);

    CHECK_THROWS_AS(full_dimensional({x * y}), std::invalid_argument);
}

TEST_CASE("interval bounds on boxes") {
    Poly x = Poly::var(0), y = Poly::var(1);
    Poly p = x * x - y;  // over [0,1]x[0,1]: range [-1,1]
    std::map<int, std::pair<Rat, Rat>> box{{0, {Rat(0), Rat(1)}}, {1, {Rat(0), Rat(1)}}};
    auto [lo, hi] = range_bound(p, box);
    CHECK(lo <= Rat(-1));
    CHECK(hi >= Rat(1));

    // tight on constants and sharpening under subdivision
    std::map<int, std::pair<Rat, Rat>> half{{0, {Rat(0), Rat(1) / 2}}, {1, {Rat(3) / 4, Rat(1)}}};
    auto [lo2, hi2] = range_bound(p, half);
    CHECK(lo2 <= Rat(-3) / 4);
    CHECK(hi2 >= Rat(1) / 4 - Rat(3) / 4);
    CHECK(hi2 < Rat(0));  // certified negative on this box
}
