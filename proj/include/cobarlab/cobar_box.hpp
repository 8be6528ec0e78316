#pragma once

#include "cobarlab/coalg.hpp"

#include <optional>

namespace cobarlab {

// a monomial a | s^{-1}x_1 ⊠ ... ⊠ s^{-1}x_n | b with nondegenerate letters
// of dimension >= 1 and matching endpoints; the empty word is the unit at a=b
struct BoxWord {
    std::string src, dst;
    std::vector<std::string> letters;
    auto operator<=>(const BoxWord&) const = default;
};

std::string to_string(const BoxWord& w);
long box_degree(const SSet& X, const BoxWord& w);  // sum of (dim - 1)
void validate_box_word(const SSet& X, const BoxWord& w);

struct BoxChain {
    const SSet* X = nullptr;
    std::map<BoxWord, Rat> terms;

    void add(const BoxWord& w, const Rat& c) {
        if (c == 0) return;
        auto it = terms.find(w);
        if (it == terms.end())
            terms[w] = c;
        else {
            it->second += c;
            if (it->second == 0) terms.erase(it);
        }
    }
    bool is_zero() const { return terms.empty(); }
    bool operator==(const BoxChain& o) const { return terms == o.terms; }
};

BoxChain box_unit(const SSet& X, const std::string& a);
BoxChain box_word(const SSet& X, const std::vector<std::string>& letters);

// differential induced by ∂̃ + Delta + h; letterwise with Koszul prefix
// (-1)^{sum of earlier letter degrees}:
//   s^{-1}x ↦ -s^{-1}∂̃x + Σ (-1)^{|x'|} s^{-1}x' ⊠ s^{-1}x''  (reduced AW)
//           + h(x)·(letter removed)
BoxChain d_box(const BoxChain& c);

// classical cobar differential (plain ∂, no curvature term); only valid on
// words whose letters have all vertices at one basepoint
BoxChain d_box_classical(const BoxChain& c);

BoxChain compose_box(const BoxChain& a, const BoxChain& b);

// induced dg functor of a categorical-coalgebra morphism:
// s^{-1}x ↦ s^{-1}f0(x) - f1bar(x)
BoxChain cobar_functor(const CatCoalgMor& m, const BoxChain& c);

// E-: s^{-1}σ ↦ s^{-1}σ - e(σ), E+: s^{-1}σ ↦ s^{-1}σ + e(σ) (dir = -1/+1)
BoxChain e_shift(const BoxChain& c, int dir);

// prepend a path of model edges: Cobar(b,c) -> Cobar(a,c)
BoxChain l_box(const SSet& X, const std::vector<std::string>& path_edges, const BoxChain& w);

// 2-simplex with d0 = edge_ab, d1 degenerate, d2 = edge_ba (the filler
// making l_box(ba)∘l_box(ab) homotopic to the identity)
std::optional<std::string> find_filler(const SSet& X, const std::string& edge_ab,
                                       const std::string& edge_ba);

// all words a->b of the exact degree with at most max_letters letters
std::vector<BoxWord> enum_box_words(const SSet& X, const std::string& a, const std::string& b,
                                    long degree, long max_letters);

// degree-truncated (and letter-truncated) morphism complex at (a,b)
ChainComplex box_complex(const SSet& X, const std::string& a, const std::string& b,
                         long max_degree, long max_letters);

struct H0Presentation {
    std::vector<BoxWord> generators;       // degree-0 words, <= word_len letters
    std::vector<BoxChain> relations;       // d_box of degree-1 words, < word_len letters
    std::vector<long> gens_per_length;     // counts by letter count 0..word_len
    long h0_dim = 0;
};

H0Presentation h0_presentation(const SSet& X, const std::string& b, long word_len);

} // namespace cobarlab
