#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cobarlab/sset.hpp"

using namespace cobarlab;

namespace {

std::vector<SSet> corpus() {
    std::vector<SSet> out;
    for (int n = 0; n <= 3; ++n) out.push_back(builtin_space("delta:" + std::to_string(n)));
    out.push_back(builtin_space("boundary:2"));
    out.push_back(builtin_space("s1-min"));
    out.push_back(builtin_space("s2-min"));
    out.push_back(builtin_space("rp2"));
    out.push_back(builtin_space("torus"));
    return out;
}

// (Delta ⊗ id)Delta and (id ⊗ Delta)Delta at simplex level, normalized
std::map<std::tuple<std::string, std::string, std::string>, Rat>
triple_left(const SSet& X, const std::string& g) {
    std::map<std::tuple<std::string, std::string, std::string>, Rat> out;
    for (auto& [f, b] : X.aw_pairs(X.simp(g))) {
        if (b.is_degenerate()) continue;
        for (auto& [f2, b2] : X.aw_pairs(f)) {
            if (f2.is_degenerate() || b2.is_degenerate()) continue;
            out[{f2.gen, b2.gen, b.gen}] += 1;
        }
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second == 0 ? out.erase(it) : std::next(it);
    return out;
}

std::map<std::tuple<std::string, std::string, std::string>, Rat>
triple_right(const SSet& X, const std::string& g) {
    std::map<std::tuple<std::string, std::string, std::string>, Rat> out;
    for (auto& [f, b] : X.aw_pairs(X.simp(g))) {
        if (f.is_degenerate()) continue;
        for (auto& [f2, b2] : X.aw_pairs(b)) {
            if (f2.is_degenerate() || b2.is_degenerate()) continue;
            out[{f.gen, f2.gen, b2.gen}] += 1;
        }
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second == 0 ? out.erase(it) : std::next(it);
    return out;
}

} // namespace

TEST_CASE("builtin shapes") {
    SSet d2 = builtin_space("delta:2");
    CHECK(d2.generators(0).size() == 3);
    CHECK(d2.generators(1).size() == 3);
    CHECK(d2.generators(2).size() == 1);

    SSet s1 = builtin_space("s1-min");
    CHECK(s1.generators(0).size() == 1);
    CHECK(s1.generators(1).size() == 1);

    SSet rp2 = builtin_space("rp2");
    CHECK(rp2.generators(0).size() == 6);
    CHECK(rp2.generators(1).size() == 15);
    CHECK(rp2.generators(2).size() == 10);
    // Euler characteristic
    CHECK(6 - 15 + 10 == 1);

    SSet t = builtin_space("torus");
    CHECK(t.generators(0).size() == 7);
    CHECK(t.generators(1).size() == 21);
    CHECK(t.generators(2).size() == 14);
}

TEST_CASE("loader accepts and rejects") {
    std::string good = R"({
        "dimensions": 1,
        "generators": [["a","b"], ["ab"]],
        "faces": {"ab": ["b", "a"]}
    })";
    SSet X = load_space_json(good, "seg");
    CHECK(X.gen_dim("ab") == 1);
    CHECK(X.first_vertex(X.simp("ab")) == "a");
    CHECK(X.last_vertex(X.simp("ab")) == "b");

    std::string dangling = R"({
        "dimensions": 1,
        "generators": [["a"], ["ab"]],
        "faces": {"ab": ["b", "a"]}
    })";
    CHECK_THROWS(load_space_json(dangling));

    // face lists violating d_i d_j = d_{j-1} d_i
    std::string broken = R"({
        "dimensions": 2,
        "generators": [["a","b","c","d"], ["ab","cd","ac"], ["T"]],
        "faces": {"ab": ["b","a"], "cd": ["d","c"], "ac": ["c","a"],
                  "T": ["cd","ac","ab"]}
    })";
    CHECK_THROWS(load_space_json(broken));

    std::string degen_face = R"({
        "dimensions": 2,
        "generators": [["b"], [], ["w"]],
        "faces": {"w": ["s_{0}b", "s_{0}b", "s_{0}b"]}
    })";
    SSet W = load_space_json(degen_face, "w2");
    CHECK(W.face(W.simp("w"), 0).is_degenerate());
}

TEST_CASE("degeneracy word algebra") {
    SSet X = builtin_space("delta:2");
    Simp e = X.simp("01");
    Simp s0e = X.degenerate(e, 0);
    CHECK(s0e.degen == std::vector<int>{0});
    Simp s1s0e = X.degenerate(s0e, 1);
    // canonical: strictly decreasing
    CHECK(s1s0e.degen.size() == 2);
    CHECK(s1s0e.degen[0] > s1s0e.degen[1]);
    // s_0 s_0 = s_1 s_0
    CHECK(X.degenerate(s0e, 0) == s1s0e);
    // d_i s_0 identities on an edge
    CHECK(X.face(s0e, 0) == e);
    CHECK(X.face(s0e, 1) == e);
    CHECK(X.face(s0e, 2) == X.degenerate(X.face(e, 1), 0));
}

TEST_CASE("boundary examples") {
    SSet d2 = builtin_space("delta:2");
    SimplicialChain b = boundary(chain_of(d2, "012"));
    CHECK(b.terms.size() == 3);
    CHECK(b.terms.at("12") == 1);
    CHECK(b.terms.at("02") == -1);
    CHECK(b.terms.at("01") == 1);

    SSet s1 = builtin_space("s1-min");
    CHECK(boundary(chain_of(s1, "e")).is_zero());

    // d∘d = 0 on every corpus generator
    for (const SSet& X : corpus())
        for (long d = 2; d <= X.top_dim(); ++d)
            for (auto& g : X.generators(d))
                CHECK(boundary(boundary(chain_of(X, g))).is_zero());
}

TEST_CASE("aw coproduct examples") {
    SSet d2 = builtin_space("delta:2");
    {
        TensorChain t = aw_coproduct(chain_of(d2, "0"));
        CHECK(t.terms.size() == 1);
        CHECK(t.terms.at({"0", "0"}) == 1);
    }
    {
        TensorChain t = aw_coproduct(chain_of(d2, "01"));
        CHECK(t.terms.size() == 2);
        CHECK(t.terms.at({"0", "01"}) == 1);
        CHECK(t.terms.at({"01", "1"}) == 1);
    }
    {
        TensorChain t = aw_coproduct(chain_of(d2, "012"));
        CHECK(t.terms.size() == 3);
        CHECK(t.terms.at({"0", "012"}) == 1);
        CHECK(t.terms.at({"01", "12"}) == 1);
        CHECK(t.terms.at({"012", "2"}) == 1);
    }
}

TEST_CASE("coassociativity on corpus") {
    for (const SSet& X : corpus())
        for (long d = 0; d <= X.top_dim(); ++d)
            for (auto& g : X.generators(d))
                CHECK(triple_left(X, g) == triple_right(X, g));
}

TEST_CASE("coproduct-boundary compatibility with Koszul signs") {
    // Delta∂ = (∂⊗id + id⊗∂)Delta on every generator; second summand picks
    // up (-1)^{deg of first factor}
    for (const SSet& X : corpus())
        for (long d = 1; d <= X.top_dim(); ++d)
            for (auto& g : X.generators(d)) {
                TensorChain lhs = aw_coproduct(boundary(chain_of(X, g)));
                TensorChain rhs;
                rhs.space = &X;
                for (auto& [f, b] : X.aw_pairs(X.simp(g))) {
                    long p = X.dim(f);
                    if (!f.is_degenerate() && !b.is_degenerate() && p >= 1) {
                        SimplicialChain df = boundary(chain_of(X, f.gen));
                        for (auto& [l, c] : df.terms) rhs.add(l, b.gen, c);
                    }
                    if (!f.is_degenerate() && !b.is_degenerate() && X.dim(b) >= 1) {
                        SimplicialChain db = boundary(chain_of(X, b.gen));
                        Rat sgn = (p % 2 == 0) ? Rat(1) : Rat(-1);
                        for (auto& [l, c] : db.terms) rhs.add(f.gen, l, sgn * c);
                    }
                }
                CHECK(lhs == rhs);
            }
}

TEST_CASE("necklace validation") {
    SSet d2 = builtin_space("delta:2");
    Necklace n;
    n.space = &d2;
    n.beads = {d2.simp("01"), d2.simp("12")};
    n.block_sizes = {1, 1};
    n.validate();

    Necklace bad = n;
    bad.beads = {d2.simp("01"), d2.simp("01")};
    CHECK_THROWS(bad.validate());

    Necklace badgroup = n;
    badgroup.block_sizes = {1};
    CHECK_THROWS(badgroup.validate());
}

TEST_CASE("simplicial homology of the corpus") {
    {
        ChainComplex c = simplicial_chain_complex(builtin_space("s1-min"));
        CHECK(homology(c, 0).betti == 1);
        CHECK(homology(c, 1).betti == 1);
    }
    {
        ChainComplex c = simplicial_chain_complex(builtin_space("rp2"));
        CHECK(homology(c, 0).betti == 1);
        auto h1 = homology(c, 1);
        CHECK(h1.betti == 0);
        CHECK(h1.torsion == std::vector<Int>{2});
        CHECK(homology(c, 2).betti == 0);
        CHECK(betti_rat(c, 1) == 0);
    }
    {
        ChainComplex c = simplicial_chain_complex(builtin_space("torus"));
        CHECK(homology(c, 0).betti == 1);
        CHECK(homology(c, 1).betti == 2);
        CHECK(homology(c, 1).torsion.empty());
        CHECK(homology(c, 2).betti == 1);
    }
    {
        ChainComplex c = simplicial_chain_complex(builtin_space("s2-min"));
        CHECK(homology(c, 0).betti == 1);
        CHECK(homology(c, 1).betti == 0);
        CHECK(homology(c, 2).betti == 1);
    }
    {
        ChainComplex c = simplicial_chain_complex(builtin_space("boundary:2"));
        CHECK(homology(c, 0).betti == 1);
        CHECK(homology(c, 1).betti == 1);
    }
}
