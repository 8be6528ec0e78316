#pragma once

#include "cobarlab/cobar_box.hpp"

namespace cobarlab {

// a level-n monomial 1_a ⊗ c_1 ⊗ ... ⊗ c_n ⊗ 1_b; letters are arbitrary
// nondegenerate simplices (vertices allowed — there is no endpoint matching
// at this stage, unlike box words)
struct ProdWord {
    std::vector<std::string> letters;
    auto operator<=>(const ProdWord&) const = default;

    long level() const { return (long)letters.size(); }
};

std::string to_string(const ProdWord& w);
// total degree: chain degree minus level
long prod_degree(const SSet& X, const ProdWord& w);

// element of the level-truncated totalization at (a,b); components at levels
// above `levels` are untracked (a watermark, not a claim that they vanish)
struct TotElement {
    const SSet* X = nullptr;
    std::string src, dst;
    long levels = 0;
    std::map<ProdWord, Rat> terms;

    void add(const ProdWord& w, const Rat& c);
    bool is_zero() const { return terms.empty(); }
    bool operator==(const TotElement& o) const {
        if (terms.empty() && o.terms.empty()) return true;
        return src == o.src && dst == o.dst && terms == o.terms;
    }
};

TotElement tot_unit(const SSet& X, const std::string& a, long levels);
TotElement tot_word(const SSet& X, const std::string& a, const std::string& b,
                    const std::vector<std::string>& letters, long levels);

// single structure maps on one monomial, without totalization signs:
// coface i: level n -> n+1 (0 and n+1 insert the endpoint vertices, interior
// indices split letter i by the coproduct); codegeneracy i: level n -> n-1
// (counit on letter i+1)
std::map<ProdWord, Rat> coface(const SSet& X, const std::string& a, const std::string& b, long i,
                               const ProdWord& w);
std::map<ProdWord, Rat> codegeneracy(const SSet& X, long i, const ProdWord& w);

// totalization differential in the standard cobar form on shifted letters:
// letterwise s^{-1}x ↦ -s^{-1}∂x + Σ (-1)^{|x'|} s^{-1}x'⊗s^{-1}x'' (full
// coproduct) with Koszul prefix over earlier shifted letters, plus endpoint
// insertions -(a in front) + (-1)^{deg}(b at the back); output beyond the
// level cap is truncated (watermarked)
TotElement d_prod(const TotElement& x);

// concatenation of monomials
TotElement compose_prod(const TotElement& x, const TotElement& y);

// projection onto the joint kernel of the codegeneracies, levelwise
TotElement conormalize(const TotElement& x);
bool is_conormalized(const TotElement& x);

// letterwise σ ↦ s^{-1}σ + e(σ), expanded multiplicatively; all words in the
// input must share their endpoints
TotElement g_map(const BoxChain& w, long levels);

Rat pr0(const TotElement& x);

// solve d_prod(ψ) = target exactly inside the finite submodule spanned by
// words over the boundary/coproduct closure of the target's letters; throws
// if the target is not a cycle, or "no contraction" if no primitive exists
// within the watermark
TotElement bounding_chain(const TotElement& target);

// all monomials of the exact total degree with level <= levels
std::vector<ProdWord> enum_prod_words(const SSet& X, long degree, long levels);

// level-truncated totalization as a chain complex over degrees
// [min_degree, max_degree]; index k corresponds to degree min_degree + k
struct ProdComplex {
    const SSet* X = nullptr;
    std::string src, dst;
    long levels = 0;
    long min_degree = 0;
    std::vector<std::vector<ProdWord>> words;  // by degree index
    ChainComplex chain;
};

ProdComplex prod_complex(const SSet& X, const std::string& a, const std::string& b, long levels,
                         long min_degree, long max_degree);

// rational Betti number of the truncated totalization in the given degree
// (degree must leave room for the two neighboring differentials)
long prod_betti(const ProdComplex& pc, long degree);

// rational Betti number of the conormalization subcomplex in the given
// degree, computed on exact kernel bases of the stacked codegeneracies
long conorm_betti(const SSet& X, const std::string& a, const std::string& b, long levels,
                  long degree);

} // namespace cobarlab
