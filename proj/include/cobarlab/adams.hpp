#pragma once

#include "cobarlab/cobar_box.hpp"
#include "cobarlab/ppchain.hpp"

namespace cobarlab {

// memoized standard simplices (stable addresses, append-only)
const SSet& delta_space(long n);

// the cube-of-paths family I^{n-1} -> P(|standard n-simplex|)(v_0, v_n),
// built recursively: the last coordinate interpolates between the face
// skipping vertex n-1 and the first (n-1)-face followed by an affine tail
// segment onto v_n; memoized
const MooreFamily& theta(long n);

// the recursive boundary identity for theta(n): the cubical boundary equals
// the alternating sum of first*last concatenations minus the inner-face
// pushforwards
Tri theta_boundary_identity(long n, int depth = 0);

// carrier-wise pushforward of theta(dim sigma) along the characteristic map
// of a nondegenerate model simplex
MooreFamily push_theta(const SSet& X, const std::string& sigma);

// pushforward of theta(img.size()-1) along the affine map sending vertex j of
// the standard simplex to vertex img[j] of the generator top; img need not be
// injective, so this also realizes degenerate simplex images
MooreFamily push_theta_affine(const SSet& X, const std::string& top, const std::vector<long>& img);

// zero on vertices and degenerate simplices, otherwise the pushed cube family
MooreChain adams_on_simplex(const SSet& X, const std::string& sigma);
MooreChain adams_on_chain(const SSet& X, const SimplicialChain& c);

// letterwise concatenation over the word; the empty word is the constant
// path at the source
MooreChain adams_on_word(const SSet& X, const BoxWord& w);

struct McReport {
    bool pass = true;
    std::vector<std::string> failures;   // simplices where the identity is violated
    std::vector<std::string> undecided;  // simplices where the oracle gave up at this depth
};

// the curved structure identity for the path-family map, checked exactly on
// every nondegenerate simplex of dimension <= max_dim
McReport verify_mc(const SSet& X, long max_dim, int depth = 0);

} // namespace cobarlab
