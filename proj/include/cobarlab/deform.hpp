#pragma once

#include "cobarlab/cobar_box.hpp"

#include <memory>

namespace cobarlab {

// Retraction of C(X) onto the subcoalgebra generated at a basepoint, with
// the homotopy data that exhibits the cobar-level inclusion as a
// deformation retract on (b,b) morphisms.
struct Deformation {
    const SSet* X = nullptr;
    std::string basepoint;

    // the all-vertices-at-b subspace, owned here so `f` stays valid
    std::shared_ptr<SSet> c0;
    CatCoalgMor f;        // C(X) -> C0(X,b)
    CatCoalgMor retract;  // inclusion∘f as an endomorphism of C(X)

    // letterwise homotopy values: eta[x] lives in the (b, last(x)) morphism
    // complex in degree dim(x); absent entries are zero
    std::map<std::string, BoxChain> eta;

    // watermarks the homotopy was solved/holds within
    long eta_letters = 0;
    long fit_maxdeg = 0;
    long fit_letters = 0;
};

// cobar image of the retraction (inclusion∘f) on words
BoxChain deform_push(const Deformation& d, const BoxChain& c);

// derivation extension of the homotopy: on a word x_1⊠...⊠x_n it replaces
// each letter x_j by eta(x_j), pushing the letters before j through the
// retraction, with the Koszul prefix sign
BoxChain h_hat(const Deformation& d, const BoxChain& c);

// residuals of  D∘Ĥ + Ĥ∘D - id + deform_push  on all (b,b)-words up to the
// given degree/letter bounds; empty = the homotopy identity holds there
std::vector<std::string> verify_deformation(const Deformation& d, long maxdeg, long max_letters);

// Deform every simplex to the basepoint by induction on dimension: vertices
// map to b, edges acquire weight -1, and higher fill-ins are found by exact
// linear solves against the morphism equations; the homotopy values are then
// solved from the cobar-level identity. Throws "model not fillable" when the
// finite model lacks the cells a solution would need.
Deformation deform_to_basepoint(const SSet& X, const PathSystem& ps, const std::string& b,
                                long eta_letters = 3, long fit_maxdeg = 3, long fit_letters = 3);

} // namespace cobarlab
