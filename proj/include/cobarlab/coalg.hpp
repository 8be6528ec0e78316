#pragma once

#include "cobarlab/sset.hpp"

namespace cobarlab {

// C(X) with the twisted differential and curvature. The Koszul convention
// throughout: (f⊗g)(x⊗y) = (-1)^{|g||x|} f(x)⊗g(y), and the twist uses
// tau(x⊗y) = (-1)^{|x||y|} y⊗x.
struct CatCoalg {
    const SSet* X = nullptr;
    // +1 is the convention under which all five axioms hold; -1 flips the
    // coproduct correction in the twisted differential (used by mutation
    // tests to show the axiom checker has teeth)
    int twist_sign = +1;
};

inline CatCoalg cat_coalg(const SSet& X, int twist_sign = +1) { return CatCoalg{&X, twist_sign}; }

// coefficient sum over nondegenerate degree-1 terms, zero elsewhere
Rat e_cochain(const SimplicialChain& c);

// ∂ + (id⊗e - e⊗id)∘Delta under the Koszul convention above
SimplicialChain tilde_boundary(const CatCoalg& cc, const SimplicialChain& c);

// (e⊗e)∘Delta + e∘∂ ; nonzero only in degree 2
Rat curvature(const CatCoalg& cc, const SimplicialChain& c);

struct CatAxiomReport {
    bool pass = true;
    std::map<std::string, bool> axiom_pass;  // keys "i".."v"
    std::vector<std::string> failures;
};

// the five axioms, exhaustively on generators
CatAxiomReport verify_cat_axioms(const CatCoalg& cc);

// sub-space of simplices with every vertex at b
SSet restrict_c0_space(const SSet& X, const std::string& b);
// sub-space of simplices with every edge degenerate (1-reduced at b)
SSet restrict_c1_space(const SSet& X, const std::string& b);

// ---- morphisms ----

struct CatCoalgMor {
    const SSet* src = nullptr;
    const SSet* dst = nullptr;
    // f0 on generators (extends multiplicatively over the coproduct /
    // linearly on chains); generators absent from the map go to zero
    std::map<std::string, SimplicialChain> f0;
    // f1 on degree-1 generators, valued in degree-0 chains of dst
    std::map<std::string, SimplicialChain> f1;
};

SimplicialChain apply_f0(const CatCoalgMor& m, const SimplicialChain& c);
SimplicialChain apply_f1(const CatCoalgMor& m, const SimplicialChain& c);
Rat f1_bar(const CatCoalgMor& m, const SimplicialChain& c);

CatCoalgMor identity_mor(const SSet& X);
CatCoalgMor compose_mor(const CatCoalgMor& g, const CatCoalgMor& f);
CatCoalgMor inclusion_mor(const SSet& sub, const SSet& amb);

// residuals of the structure equations at a single generator; a morphism is
// valid iff every residual vanishes on every generator
struct MorResidual {
    Rat counit = 0;           // counit preservation (vertices only)
    TensorChain comap;        // Delta' f0 - (f0⊗f0) Delta
    SimplicialChain twisted;  // f0∂̃ - ∂̃'f0 - (f1bar⊗f0)(Delta - Delta^op)
    Rat curv = 0;             // h'f0 - h - f1bar∂̃ - (f1bar⊗f1bar)Delta
};

MorResidual mor_residual(const CatCoalg& src, const CatCoalg& dst, const CatCoalgMor& m,
                         const std::string& g);

// checks: coalgebra-map property of f0, the two twisted-compatibility
// equations; returns human-readable failures (empty = valid)
std::vector<std::string> verify_mor(const CatCoalg& src, const CatCoalg& dst, const CatCoalgMor& m);

// ---- chosen edge paths between vertices ----

struct EdgeStep {
    std::string edge;
    bool reversed = false;
    bool operator==(const EdgeStep&) const = default;
};

struct PathSystem {
    const SSet* X = nullptr;
    std::string root;
    std::map<std::string, std::vector<EdgeStep>> to_root;

    // reduced tree path a -> b; gamma_bb is empty, gamma_ba reverses gamma_ab
    std::vector<EdgeStep> path(const std::string& a, const std::string& b) const;
};

// breadth-first spanning tree from root, lexicographic tie-breaking;
// throws naming unreachable vertices if X is disconnected
PathSystem path_system(const SSet& X, const std::string& root);

} // namespace cobarlab
