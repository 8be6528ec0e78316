#pragma once

#include "cobarlab/adams.hpp"
#include "cobarlab/cobar_prod.hpp"

namespace cobarlab {

// default desk-scale bounds: arity of the multilinear components and the
// level cap of the truncated totalizations
inline constexpr long kChenArityBound = 3;
inline constexpr long kChenLevelBound = 6;

// ---- identity families on the standard simplices ----

// boundary condition for the simplicial identity family up to level N:
// the boundary of the top generator of the standard n-simplex equals the
// alternating sum of its face pushforwards
bool verify_u_family(long N);

// canonical order-coordinate parametrization of a (possibly degenerate)
// model simplex as a realization-valued map
PPMap order_param(const SSet& X, const Simp& s);

// the folded identity n-cube into the scaled order simplex of the given
// length polynomial (single term; n! fold pieces)
PPChain fold_identity(long n, const Poly& len);

// cubical boundary condition for the folded family up to level N
Tri verify_v_family(long N, int depth = 0);

// ---- the scaled-simplex totalization and the xi ladder ----

// level component: cube-domain maps into the scaled order simplex
struct ScaledTot {
    long levels = 0;
    std::vector<PPChain> level;  // size levels + 1
};

ScaledTot scaled_tot(long levels);

// cosimplicial coface on a scaled-simplex map: 0 inserts the time 0 in
// front, target_n + 1 appends the full scale, interior indices duplicate
PPMap scaled_coface(const PPMap& f, long i);

// totalization differential: level n carries (-1)^n times the cubical
// boundary plus the alternating coface sum from level n - 1
ScaledTot d_scaled(const ScaledTot& x);

// gluing composition (cube bases juxtapose, the second time block is
// shifted by the first scale), with the totalization sign
ScaledTot compose_scaled(const ScaledTot& x, const ScaledTot& y);

Tri scaled_tot_equal(const ScaledTot& a, const ScaledTot& b, int depth = 0);

// the xi ladder: xi_level(k, n) is the level-n component of the arity-k
// interpolation chain, polynomial in the formal length parameters 0..k;
// built by the cone recursion over xi_rhs_level and memoized
const PPChain& xi_level(long k, long n);
// the recursion right-hand side: merged-parameter terms plus glued
// compositions of lower entries
PPChain xi_rhs_level(long k, long n);
// the defining relation at all levels <= nmax, symbolically in the
// parameters
Tri xi_relation(long k, long nmax, int depth = 0);
// substitute a numeric value for one formal parameter and renormalize
PPChain xi_subst(const PPChain& c, long param_index, const Rat& value);

// ---- the marked-family totalization ----

struct MarkedTot {
    const SSet* X = nullptr;
    std::string src, dst;
    long levels = 0;
    std::vector<MarkedChain> level;  // size levels + 1
};

MarkedTot marked_tot(const SSet& X, const std::string& a, const std::string& b, long levels);
void tot_add(MarkedTot& x, const MarkedTot& y, const Rat& c = Rat(1));

// totalization differential: same sign scheme as d_scaled, with the
// simplicial boundary and the marked cofaces
MarkedTot d_marked_tot(const MarkedTot& x);

// levelwise concatenation over the shuffle triangulation, with the
// totalization sign
MarkedTot compose_marked_tot(const MarkedTot& x, const MarkedTot& y);

Tri marked_tot_equal(const MarkedTot& a, const MarkedTot& b, int depth = 0);

// ---- the marked evaluation families ----

// arity-k component on composable cube families of paths: the concatenated
// family over the juxtaposed base, marked by the xi chains instantiated at
// the input lengths, then triangulated levelwise; multilinear in the inputs
MarkedTot j_map(const SSet& X, const std::vector<MooreChain>& inputs, long levels);
// the same before base triangulation (cube bases)
MarkedTot j_map_cubical(const SSet& X, const std::vector<MooreChain>& inputs, long levels);

// arity-1 alias
MarkedTot ev_family(const SSet& X, const MooreChain& c, long levels);
// the other order of operations: triangulate the base first, then shuffle
// the identity-simplex coordinates into each level; agreement with
// ev_family is the route-equivalence check
MarkedTot ev_family_triangulate_first(const SSet& X, const MooreChain& c, long levels);

// ---- iterated splitting into words ----

struct AwReport {
    TotElement out;
    std::vector<std::string> errors;  // inexpressible evaluation factors

    bool ok() const { return errors.empty(); }
};

// evaluate each mark on the track and split the base simplex across the
// marks by iterated front/back restriction; every factor must be
// expressible as a model simplex (certified by the equality oracle)
AwReport aw_iter(const MarkedTot& x, int depth = 0);

// word-valued assemblies
AwReport i_map(const SSet& X, const std::vector<MooreChain>& inputs, long levels, int depth = 0);
AwReport it_map(const SSet& X, const MooreChain& c, long levels, int depth = 0);
AwReport f_map(const SSet& X, const std::vector<BoxChain>& inputs, long levels, int depth = 0);

// ---- relation checking ----

struct AinfReport {
    bool pass = true;
    std::vector<std::string> failures;   // relation instances with nonzero residual
    std::vector<std::string> undecided;  // oracle gave up at this depth
};

// the arity-k functor relation on homogeneous inputs, at the marked level
AinfReport ainf_check_j(const SSet& X, const std::vector<MooreChain>& inputs, long levels,
                        int depth = 0);
// the same relation pushed through evaluation and word splitting
AinfReport ainf_check_i(const SSet& X, const std::vector<MooreChain>& inputs, long levels,
                        int depth = 0);

// vanishing of the arity-k component (k >= 2) when one input is a
// zero-length identity path
AinfReport j_unitality(const SSet& X, const std::vector<MooreChain>& inputs, long levels,
                       int depth = 0);

} // namespace cobarlab
