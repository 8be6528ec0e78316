#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "cobarlab/adams.hpp"

#include <doctest.h>

using namespace cobarlab;

namespace {

MooreChain word_chain(const SSet& X, const BoxChain& c) {
    MooreChain out;
    for (auto& [w, coeff] : c.terms) out += adams_on_word(X, w) * coeff;
    return out;
}

} // namespace

TEST_CASE("theta basics") {
    const SSet& D1 = delta_space(1);
    const MooreFamily& t1 = theta(1);
    CHECK(t1.src == "0");
    CHECK(t1.dst == "1");
    CHECK(t1.m == 0);
    // unit edge length
    REQUIRE(t1.len.pieces.size() == 1);
    CHECK(t1.len.pieces[0].comp[0].eval({}, {}) == Rat(1));
    EqReport r = moore_equal(t1, edge_moore(D1, "01"));
    CHECK(r.eq == Tri::Yes);

    const MooreFamily& t3 = theta(3);
    CHECK(t3.m == 2);
    CHECK(t3.src == "0");
    CHECK(t3.dst == "3");
    // length is 1 plus the sum of the cube coordinates
    REQUIRE(t3.len.pieces.size() == 1);
    CHECK(t3.len.pieces[0].comp[0].eval({Rat(1, 2), Rat(1, 3)}, {}) == Rat(11, 6));
}

TEST_CASE("theta recursion and squared boundary") {
    CHECK(theta_boundary_identity(2) == Tri::Yes);
    CHECK(theta_boundary_identity(3) == Tri::Yes);
    CHECK(theta_boundary_identity(4) == Tri::Yes);

    MooreChain dd = moore_boundary(moore_boundary(moore_chain(theta(3))));
    CHECK(moore_chain_equal(dd, MooreChain{}) == Tri::Yes);
}

TEST_CASE("curved structure identity") {
    CHECK(verify_mc(delta_space(2), 2).pass);
    CHECK(verify_mc(delta_space(3), 3).pass);

    SSet rp2 = builtin_space("rp2");
    McReport r = verify_mc(rp2, 2);
    CHECK(r.pass);
    CHECK(r.failures.empty());
    CHECK(r.undecided.empty());

    SSet torus = builtin_space("torus");
    CHECK(verify_mc(torus, 2).pass);
}

TEST_CASE("words compose and the extension is a chain map") {
    const SSet& D2 = delta_space(2);
    // two edges concatenate to total length 2
    BoxWord w{"0", "2", {"01", "12"}};
    MooreChain c = adams_on_word(D2, w);
    REQUIRE(c.terms.size() == 1);
    const MooreFamily& fam = c.terms.begin()->second.first;
    REQUIRE(fam.len.pieces.size() == 1);
    CHECK(fam.len.pieces[0].comp[0].eval({}, {}) == Rat(2));

    // the empty word is the zero-length constant path
    BoxWord unit{"1", "1", {}};
    MooreChain u = adams_on_word(D2, unit);
    REQUIRE(u.terms.size() == 1);
    CHECK(u.terms.begin()->second.first.len.pieces[0].comp[0].eval({}, {}) == Rat(0));

    // boundary of the word image equals the image of the word differential,
    // over every word of degree <= 2 between the extreme vertices
    const SSet& D3 = delta_space(3);
    for (long deg = 1; deg <= 2; ++deg) {
        for (auto& bw : enum_box_words(D3, "0", "3", deg, 3)) {
            MooreChain lhs = moore_boundary(adams_on_word(D3, bw));
            MooreChain rhs = word_chain(D3, d_box(box_word(D3, bw.letters)));
            CHECK(moore_chain_equal(lhs, rhs) == Tri::Yes);
        }
    }
}

TEST_CASE("pushforward naturality") {
    const SSet& D2 = delta_space(2);

    // face inclusions: pushing theta(1) along a face equals the edge family
    for (auto& [a, b, edge] : {std::tuple<long, long, const char*>{0, 1, "01"},
                               {0, 2, "02"},
                               {1, 2, "12"}}) {
        MooreFamily pushed = push_theta_affine(D2, "012", {a, b});
        EqReport r = moore_equal(pushed, edge_moore(D2, edge));
        CHECK(r.eq == Tri::Yes);
    }

    // the vertex collapse 0,1,2 -> 0,1,1 sends the top simplex to a degenerate
    // one; the pushed family is the constant edge path with a stationary tail
    // of varying length, not a strictly degenerate cube (the Moore length
    // still moves), so the degenerate image is detected via that decomposition
    const SSet& D1 = delta_space(1);
    MooreFamily collapsed = push_theta_affine(D1, "01", {0, 1, 1});
    CHECK(moore_degenerate(collapsed) == Tri::No);

    PPMap lifted_track = edge_moore(D1, "01").track;
    lifted_track.m = 1;  // constant in the cube direction; time moves to index 1
    for (auto& piece : lifted_track.pieces) {
        for (auto& g : piece.ge) g = g.rename([](int v) { return v + 1; });
        for (auto& cp : piece.comp) cp = cp.rename([](int v) { return v + 1; });
    }
    PPMap lifted_len = scalar_map(Poly::constant(Rat(1)), 1);
    MooreFamily edge_family = make_moore(D1, "0", "1", lifted_len, lifted_track);
    CHECK(moore_degenerate(edge_family) == Tri::Yes);

    PPMap pad_len = scalar_map(Poly::var(0), 1);
    PPMap pad_track;
    pad_track.m = 1;
    pad_track.free_vars = 1;
    pad_track.target = TargetKind::Realization;
    pad_track.model = &D1;
    PPPiece p;
    p.carrier = D1.simp("1");
    p.ge = {Poly::var(1), Poly::var(0) - Poly::var(1)};
    p.comp = {Poly::constant(Rat(1))};
    pad_track.pieces = {p};
    MooreFamily padding = make_moore(D1, "1", "1", pad_len, pad_track);

    EqReport r = moore_equal(collapsed, concat_fiber(edge_family, padding));
    CHECK(r.eq == Tri::Yes);
}
