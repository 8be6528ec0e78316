#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "cobarlab/ppchain.hpp"

#include <doctest.h>

using namespace cobarlab;

namespace {

Poly C(long num, long den = 1) { return Poly::constant(Rat(num) / Rat(den)); }

// identity parametrization of a generator in order coordinates:
// b_0 = t_1, b_i = t_{i+1} - t_i, b_n = 1 - t_n
PPMap simplex_id(const SSet& X, const std::string& gen) {
    long n = X.gen_dim(gen);
    PPMap f;
    f.m = n;
    f.domain = DomainKind::Simplex;
    f.target = TargetKind::Realization;
    f.model = &X;
    PPPiece p;
    p.carrier = X.simp(gen);
    if (n == 0) {
        p.comp = {C(1)};
    } else {
        p.comp.push_back(Poly::var(0));
        for (long i = 1; i < n; ++i) p.comp.push_back(Poly::var((int)i) - Poly::var((int)(i - 1)));
        p.comp.push_back(C(1) - Poly::var((int)(n - 1)));
    }
    f.pieces = {p};
    return f;
}

PPMap cube_edge(const SSet& X, const std::string& edge) {
    PPMap f;
    f.m = 1;
    f.target = TargetKind::Realization;
    f.model = &X;
    PPPiece p;
    p.carrier = X.simp(edge);
    p.comp = {C(1) - Poly::var(0), Poly::var(0)};
    f.pieces = {p};
    return f;
}

} // namespace

TEST_CASE("boundaries of cube and simplex parametrizations") {
    SSet X = builtin_space("delta:2");

    // cube edge: boundary is start minus end
    PPChain e = pp_chain(cube_edge(X, "01"));
    PPChain de = pp_boundary(e);
    PPChain expect = pp_chain(const_real(X, "0", 0));
    expect += pp_chain(const_real(X, "1", 0)) * Rat(-1);
    CHECK(de == expect);

    // simplex edge: alternating face sum, opposite orientation
    PPChain s = pp_chain(simplex_id(X, "01"));
    PPChain ds = pp_boundary(s);
    PPChain sexpect = pp_chain(const_real(X, "1", 0, DomainKind::Simplex));
    sexpect += pp_chain(const_real(X, "0", 0, DomainKind::Simplex)) * Rat(-1);
    CHECK(ds == sexpect);

    // triangle: faces land on the generator's faces with their own
    // identity parametrizations
    PPChain t = pp_chain(simplex_id(X, "012"));
    PPChain dt = pp_boundary(t);
    PPChain texpect = pp_chain(simplex_id(X, "12"));
    texpect += pp_chain(simplex_id(X, "02")) * Rat(-1);
    texpect += pp_chain(simplex_id(X, "01"));
    CHECK(dt == texpect);
    CHECK(pp_boundary(dt).is_zero());

    // square of the cubical boundary on a triangulated-and-folded triangle
    PPChain folded = eta_simplex_to_cube(t);
    CHECK(pp_boundary(pp_boundary(folded)).is_zero());
}

TEST_CASE("triangulation maps") {
    SSet X2 = builtin_space("delta:2");
    PPChain t = pp_chain(simplex_id(X2, "012"));
    PPChain folded = eta_simplex_to_cube(t);
    REQUIRE(folded.terms.size() == 1);

    // folding sends (3/4, 1/4) to running maxima (3/4, 3/4), which lies on
    // the edge 02 of the realization
    const PPMap& g = folded.terms.begin()->second.first;
    auto pt = pp_eval_real(g, {Rat(3) / 4, Rat(1) / 4});
    CHECK(pt.first == "02");
    CHECK(pt.second == std::vector<Rat>{Rat(3) / 4, Rat(1) / 4});

    // round trip: triangulating the folded square recovers the triangle
    CHECK(pp_chain_equal(eta_cube_to_simplex(folded), t) == Tri::Yes);

    SSet X3 = builtin_space("delta:3");
    PPChain t3 = pp_chain(simplex_id(X3, "0123"));
    CHECK(pp_chain_equal(eta_cube_to_simplex(eta_simplex_to_cube(t3)), t3) == Tri::Yes);

    // the triangulation is a chain map
    CHECK(pp_chain_equal(pp_boundary(eta_cube_to_simplex(folded)),
                         eta_cube_to_simplex(pp_boundary(folded))) == Tri::Yes);

    // two summands with signature signs on a nondegenerate square
    PPMap lam;
    lam.m = 2;
    lam.target = TargetKind::Coords;
    lam.target_n = 1;
    PPPiece p;
    p.comp = {Poly::var(0) + Rat(2) * Poly::var(1)};
    lam.pieces = {p};
    PPChain tri = eta_cube_to_simplex(pp_chain(lam));
    REQUIRE(tri.terms.size() == 2);
    std::vector<Rat> coeffs;
    for (auto& [k, tc] : tri.terms) coeffs.push_back(tc.second);
    CHECK(((coeffs[0] == 1 && coeffs[1] == -1) || (coeffs[0] == -1 && coeffs[1] == 1)));
}

TEST_CASE("cross products and the shuffle comparison") {
    PPMap a = scalar_map(Poly::var(0), 1);
    PPMap b;
    b.m = 2;
    b.target = TargetKind::Coords;
    b.target_n = 1;
    PPPiece pb;
    pb.comp = {Poly::var(0) * Poly::var(1) + Rat(3) * Poly::var(0)};
    b.pieces = {pb};
    PPChain ca = pp_chain(a), cb = pp_chain(b);

    // Leibniz rule for the cross product
    PPChain lhs = pp_boundary(cross(ca, cb));
    PPChain rhs = cross(pp_boundary(ca), cb);
    rhs += cross(ca, pp_boundary(cb)) * Rat(-1);  // |a| = 1
    CHECK(pp_chain_equal(lhs, rhs) == Tri::Yes);

    // triangulation intertwines cross with the shuffle product
    PPMap a2 = scalar_map(C(1) - Poly::var(0), 1);
    CHECK(pp_chain_equal(eta_cube_to_simplex(cross(pp_chain(a), pp_chain(a2))),
                         shuffle_cross(eta_cube_to_simplex(pp_chain(a)),
                                       eta_cube_to_simplex(pp_chain(a2)))) == Tri::Yes);
}

TEST_CASE("equality oracle tiers") {
    // tier 2: a refinement along x = 1/2 is the same map
    PPMap f = scalar_map(Poly::var(0), 1);
    PPMap g;
    g.m = 1;
    g.target = TargetKind::Coords;
    g.target_n = 1;
    PPPiece left, right;
    left.ge = {C(1, 2) - Poly::var(0)};
    left.comp = {Poly::var(0)};
    right.ge = {Poly::var(0) - C(1, 2)};
    right.comp = {Poly::var(0)};
    g.pieces = {left, right};
    EqReport r = pp_equal(f, g);
    CHECK(r.eq == Tri::Yes);
    CHECK(r.tier == 2);

    // genuine difference, witnessed
    PPMap h = scalar_map(Poly::var(0) * Poly::var(0), 1);
    EqReport rn = pp_equal(f, h);
    CHECK(rn.eq == Tri::No);
    REQUIRE(rn.witness.count(0));
    Rat w = rn.witness.at(0);
    CHECK(w != w * w);

    // non-affine cells: depth 0 stays undecided, subdivision resolves
    PPMap nf;
    nf.m = 1;
    nf.target = TargetKind::Coords;
    nf.target_n = 1;
    PPPiece in, out;
    in.ge = {C(1, 4) - Poly::var(0) * Poly::var(0)};
    in.comp = {Poly::var(0)};
    out.ge = {Poly::var(0) * Poly::var(0) - C(1, 4)};
    out.comp = {Poly::var(0)};
    nf.pieces = {in, out};
    CHECK(pp_equal(nf, f, 0).eq == Tri::Undecided);
    EqReport ry = pp_equal(nf, f, 5);
    CHECK(ry.eq == Tri::Yes);
    CHECK(ry.tier == 3);

    PPMap nbad = nf;
    nbad.pieces[1].comp = {Poly::var(0) + Poly::var(0) * Poly::var(0) - C(1, 4)};
    CHECK(pp_equal(nbad, f, 5).eq == Tri::No);

    // formal parameters range over the nonnegative reals
    PPMap sf = scalar_map(Poly::param(0) * Poly::var(0), 1);
    sf.target = TargetKind::ScaledSimplex;
    sf.target_len = Poly::param(0);
    PPMap sg = sf;
    sg.pieces[0].comp = {Poly::param(0) * Poly::var(0) * Poly::var(0)};
    CHECK(pp_equal(sf, sf).eq == Tri::Yes);
    CHECK(pp_equal(sf, sg).eq == Tri::No);
}

TEST_CASE("degeneracy detection and normalization") {
    SSet X = builtin_space("delta:2");

    PPMap dg = scalar_map(Poly::var(1), 2);  // ignores x_0
    CHECK(pp_degenerate(dg) == Tri::Yes);
    CHECK(pp_degenerate(scalar_map(Poly::var(0), 1)) == Tri::No);
    CHECK(pp_degenerate(simplex_id(X, "012")) == Tri::No);

    // simplicial collapse: a triangle parametrized through one order
    // coordinate only
    PPMap col;
    col.m = 2;
    col.domain = DomainKind::Simplex;
    col.target = TargetKind::Realization;
    col.model = &X;
    PPPiece pc;
    pc.carrier = X.simp("01");
    pc.comp = {Poly::var(0), C(1) - Poly::var(0)};
    col.pieces = {pc};
    CHECK(pp_degenerate(col) == Tri::Yes);

    // vanishing barycentric component reduces the carrier
    PPMap red;
    red.m = 1;
    red.target = TargetKind::Realization;
    red.model = &X;
    PPPiece pr;
    pr.carrier = X.simp("012");
    pr.comp = {C(1) - Poly::var(0), Poly::zero(), Poly::var(0)};
    red.pieces = {pr};
    CHECK(pp_key(red) == pp_key(cube_edge(X, "02")));

    // degenerate carriers merge their repeated coordinates
    PPMap mg;
    mg.m = 1;
    mg.target = TargetKind::Realization;
    mg.model = &X;
    PPPiece pm;
    pm.carrier = Simp{{0}, "01"};
    pm.comp = {(C(1) - Poly::var(0)) * Rat(1, 2), (C(1) - Poly::var(0)) * Rat(1, 2),
               Poly::var(0)};
    mg.pieces = {pm};
    CHECK(pp_key(mg) == pp_key(cube_edge(X, "01")));

    // component sums are validated
    PPMap bad = cube_edge(X, "01");
    bad.pieces[0].comp[0] = C(1);
    CHECK_THROWS_AS(pp_normalize(bad), std::logic_error);

    // lower-dimensional pieces are dropped on full domains
    PPMap junk = scalar_map(Poly::var(0), 1);
    PPPiece slice;
    slice.ge = {Poly::var(0) - C(1, 2), C(1, 2) - Poly::var(0)};
    slice.comp = {Poly::var(0)};
    junk.pieces.push_back(slice);
    CHECK(pp_key(junk) == pp_key(scalar_map(Poly::var(0), 1)));
}

TEST_CASE("moore path families") {
    SSet X = builtin_space("delta:2");
    MooreFamily e01 = edge_moore(X, "01");
    MooreFamily e12 = edge_moore(X, "12");
    MooreFamily c0 = constant_moore(X, "0");
    MooreFamily c1 = constant_moore(X, "1");
    MooreFamily c2 = constant_moore(X, "2");
    CHECK(e01.src == "0");
    CHECK(e01.dst == "1");

    // constants are two-sided units up to the oracle
    CHECK(moore_equal(concat_moore(e01, c1), e01).eq == Tri::Yes);
    CHECK(moore_equal(concat_moore(c0, e01), e01).eq == Tri::Yes);

    // lengths add, concatenation is associative
    MooreFamily cc = concat_moore(e01, e12);
    CHECK(pp_equal(cc.len, scalar_map(C(2), 0)).eq == Tri::Yes);
    CHECK(moore_equal(concat_moore(cc, c2), concat_moore(e01, concat_moore(e12, c2))).eq ==
          Tri::Yes);

    CHECK_THROWS_AS(concat_moore(e01, e01), std::invalid_argument);

    // construction certifies endpoints and length positivity
    CHECK_THROWS_AS(make_moore(X, "1", "0", e01.len, e01.track), std::invalid_argument);
    CHECK_THROWS_AS(make_moore(X, "0", "1", scalar_map(C(-1), 0), e01.track),
                    std::invalid_argument);

    // a constant family over a 1-cube base has cancelling faces
    PPMap len1 = scalar_map(C(1), 1);
    PPMap track;
    track.m = 1;
    track.free_vars = 1;
    track.target = TargetKind::Realization;
    track.model = &X;
    PPPiece tp;
    tp.carrier = X.simp("01");
    tp.comp = {C(1) - Poly::var(1), Poly::var(1)};
    tp.ge = {Poly::var(1), C(1) - Poly::var(1)};
    track.pieces = {tp};
    MooreFamily fam = make_moore(X, "0", "1", len1, track);
    CHECK(moore_boundary(moore_chain(fam)).is_zero());

    // semantic chain equality sees through presentation differences
    CHECK(moore_chain_equal(moore_chain(concat_moore(e01, c1)), moore_chain(e01)) == Tri::Yes);
}

TEST_CASE("marked families") {
    SSet X = builtin_space("delta:2");
    MooreFamily e01 = edge_moore(X, "01");

    MarkedFamily f =
        make_marked(e01, {scalar_map(C(1, 3), 0), scalar_map(C(2, 3), 0)});
    CHECK_THROWS_AS(make_marked(e01, {scalar_map(C(2, 3), 0), scalar_map(C(1, 3), 0)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_marked(e01, {scalar_map(C(2), 0)}), std::invalid_argument);

    // evaluation at a mark
    auto pt = pp_eval_real(ev_component(f, 0), {});
    CHECK(pt.first == "01");
    CHECK(pt.second == std::vector<Rat>{Rat(2) / 3, Rat(1) / 3});

    // cosimplicial structure on the marks
    MarkedFamily one = make_marked(e01, {scalar_map(C(1, 2), 0)});
    for (long i = 0; i <= 2; ++i) {
        MarkedFamily up = marked_coface(one, i);
        CHECK(up.marks.size() == 2);
        long del = i == 2 ? 1 : i;
        CHECK(marked_equal(marked_codegeneracy(up, del), one).eq == Tri::Yes);
    }
    CHECK(marked_equal(marked_coface(marked_coface(one, 0), 2),
                       marked_coface(marked_coface(one, 1), 0)).eq == Tri::Yes);

    // concatenation shifts the second family's marks by the first length
    MooreFamily e12 = edge_moore(X, "12");
    MarkedFamily g = make_marked(e12, {scalar_map(C(1, 2), 0)});
    MarkedFamily h = make_marked(e01, {scalar_map(C(1, 2), 0)});
    MarkedFamily cat = concat_marked(h, g);
    REQUIRE(cat.marks.size() == 2);
    CHECK(pp_equal(cat.marks[1], scalar_map(C(3, 2), 0)).eq == Tri::Yes);
    auto mid = pp_eval_real(ev_component(cat, 1), {});
    CHECK(mid.first == "12");
    CHECK(mid.second == std::vector<Rat>{Rat(1) / 2, Rat(1) / 2});
}
