#pragma once

#include "cobarlab/poly.hpp"
#include "cobarlab/sset.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cobarlab {

// Cube: [0,1]^m; Simplex: the order complex {0 <= x_0 <= ... <= x_{m-1} <= 1}
enum class DomainKind { Cube, Simplex };

// Coords: a tuple of polynomial components in R^target_n
// Realization: per-piece carrier simplex with barycentric components
// ScaledSimplex: order coordinates 0 <= t_1 <= ... <= t_n <= T (T = target_len,
//   a polynomial in the formal parameters)
enum class TargetKind { Coords, Realization, ScaledSimplex };

enum class Tri { Yes, No, Undecided };

struct PPPiece {
    std::vector<Poly> ge;   // cell constraints, each >= 0, on top of the domain
    Simp carrier;           // Realization only
    std::vector<Poly> comp; // components
};

// a piecewise-polynomial map; domain variables are 0..m-1 (constrained by the
// domain kind) plus free_vars trailing coordinates m..m+free_vars-1 bounded
// only by the cells (used for Moore time); parameters >= kParamBase pass
// through untouched
struct PPMap {
    long m = 0;
    long free_vars = 0;
    DomainKind domain = DomainKind::Cube;
    TargetKind target = TargetKind::Coords;
    const SSet* model = nullptr;
    long target_n = 0;
    Poly target_len;
    std::vector<PPPiece> pieces;
};

std::vector<Poly> domain_constraints(const PPMap& f);
PPMap pp_normalize(const PPMap& f);
std::string pp_key(const PPMap& f);  // canonical serialization, the hash-consing key
std::string pp_dump(const PPMap& f); // structured debug text

// three-tier equality oracle: 1 canonical form, 2 exact common refinement of
// affine cells (polynomial identity on every full-dimensional overlap, with
// formal parameters ranging over [0,infty)), 3 sign determination by exact
// interval-coefficient subdivision to the given depth; never guesses
struct EqReport {
    Tri eq = Tri::Undecided;
    int tier = 0;
    std::map<int, Rat> witness;  // a point where the maps differ, when eq == No
    std::string note;
};
EqReport pp_equal(const PPMap& f, const PPMap& g, int depth = 0);

// independence of some domain direction (cubical or simplicial degeneracy)
Tri pp_degenerate(const PPMap& f, int depth = 0);

// substitute x_i := eps and renumber; cube domains
PPMap pp_face_cube(const PPMap& f, long i, int eps);
// simplicial face d_i, 0 <= i <= m; order-coordinate domains
PPMap pp_face_simplex(const PPMap& f, long i);
// the collapse map whose fixed points are the dir-degenerate maps (no renumbering)
PPMap pp_collapse(const PPMap& f, long dir);

// canonical point of the realization: drops zero barycentric coordinates and
// degenerate carriers
std::pair<std::string, std::vector<Rat>> real_point(const SSet& X, const Simp& carrier,
                                                    std::vector<Rat> bary);
std::pair<std::string, std::vector<Rat>> pp_eval_real(const PPMap& f, const std::vector<Rat>& x,
                                                      const std::vector<Rat>& params = {});

// constant map at a vertex / single-piece scalar function
PPMap const_real(const SSet& X, const std::string& vertex, long m,
                 DomainKind kind = DomainKind::Cube);
PPMap scalar_map(const Poly& value, long m, DomainKind kind = DomainKind::Cube);

// pointwise sum of two scalar maps over the same domain (common refinement)
PPMap scalar_add(const PPMap& a, const PPMap& b);

// ---- chains of maps (degenerate maps are zero; hash-consed keys) ----

struct PPChain {
    std::map<std::string, std::pair<PPMap, Rat>> terms;

    void add(const PPMap& f, const Rat& c);
    bool is_zero() const { return terms.empty(); }
    PPChain& operator+=(const PPChain& o);
    PPChain operator*(const Rat& c) const;
    bool operator==(const PPChain& o) const;
};

PPChain pp_chain(const PPMap& f, const Rat& c = Rat(1));

// cubical boundary sum_{i=1..m} (-1)^i (x_i=1 face - x_i=0 face), or the
// alternating simplicial face sum, by domain kind; the cubical sign is the
// one making the triangulation sum a chain map for the order-coordinate faces
PPChain pp_boundary(const PPChain& c);

// semantic chain equality: terms matched up by the equality oracle, so two
// presentations with different canonical keys still compare
Tri pp_chain_equal(const PPChain& a, const PPChain& b, int depth = 0);

// triangulation sum over permutations with signature coefficients
PPChain eta_cube_to_simplex(const PPChain& c);
// precomposition with the running-maximum folding map
PPChain eta_simplex_to_cube(const PPChain& c);

// cross product of Coords-valued cube maps (components concatenate)
PPMap pp_cross(const PPMap& a, const PPMap& b);
PPChain cross(const PPChain& a, const PPChain& b);
// shuffle product of Coords-valued simplex maps
PPChain shuffle_cross(const PPChain& a, const PPChain& b);

// ---- Moore families ----

// a family of Moore paths over a base cube/simplex: a piecewise-linear length
// and a piecewise-polynomial track on {(x,s) : 0 <= s <= len(x)} into the
// realization, with constant endpoints
struct MooreFamily {
    long m = 0;
    DomainKind base = DomainKind::Cube;
    std::string src, dst;
    PPMap len;    // scalar on the base
    PPMap track;  // base vars + time at index m; Realization target
};

// validates: piecewise-affine nonnegative length, track endpoints src/dst
MooreFamily make_moore(const SSet& X, const std::string& src, const std::string& dst, PPMap len,
                       PPMap track);
MooreFamily constant_moore(const SSet& X, const std::string& b, long m = 0);
// the unit-length affine track along an edge generator
MooreFamily edge_moore(const SSet& X, const std::string& edge);

std::string moore_key(const MooreFamily& f);
EqReport moore_equal(const MooreFamily& a, const MooreFamily& b, int depth = 0);
Tri moore_degenerate(const MooreFamily& f, int depth = 0);
MooreFamily moore_face_cube(const MooreFamily& f, long i, int eps);
MooreFamily moore_face_simplex(const MooreFamily& f, long i);

// path concatenation: lengths add, tracks split along s = len_f(x); cube bases
MooreFamily concat_moore(const MooreFamily& f, const MooreFamily& g);
// fiberwise concatenation of two families over the same base
MooreFamily concat_fiber(const MooreFamily& f, const MooreFamily& g);
// the same family over a base with `extra` fresh trailing directions
MooreFamily moore_extend_base(const MooreFamily& f, long extra);

struct MooreChain {
    std::map<std::string, std::pair<MooreFamily, Rat>> terms;

    void add(const MooreFamily& f, const Rat& c);
    bool is_zero() const { return terms.empty(); }
    MooreChain& operator+=(const MooreChain& o);
    MooreChain operator*(const Rat& c) const;
    bool operator==(const MooreChain& o) const;
};

MooreChain moore_chain(const MooreFamily& f, const Rat& c = Rat(1));
MooreChain moore_boundary(const MooreChain& c);
Tri moore_chain_equal(const MooreChain& a, const MooreChain& b, int depth = 0);
MooreChain concat_moore(const MooreChain& a, const MooreChain& b);  // bilinear

// ---- marked families ----

// a Moore family with marked times 0 <= t_1 <= ... <= t_n <= len, each a
// scalar function on the base; the ordering is certified on construction
struct MarkedFamily {
    MooreFamily fam;
    std::vector<PPMap> marks;
};

MarkedFamily make_marked(MooreFamily fam, std::vector<PPMap> marks);
// marks u_i * len with affine 0 <= u_1 <= ... <= u_n <= 1 certified exactly;
// the products themselves need no further certificate
MarkedFamily make_marked_product(MooreFamily fam, std::vector<PPMap> unit_marks);
// no ordering certificate: for marks produced by operations that preserve a
// certified ordering (concatenation shifts, scaling substitutions)
MarkedFamily make_marked_unchecked(MooreFamily fam, std::vector<PPMap> marks);
std::string marked_key(const MarkedFamily& f);
EqReport marked_equal(const MarkedFamily& a, const MarkedFamily& b, int depth = 0);
Tri marked_degenerate(const MarkedFamily& f, int depth = 0);
MarkedFamily marked_face_cube(const MarkedFamily& f, long i, int eps);
MarkedFamily marked_face_simplex(const MarkedFamily& f, long i);

// cosimplicial structure on the number of marks: coface 0 inserts time 0 in
// front, coface n+1 inserts the full length at the back, interior cofaces
// duplicate; codegeneracy i deletes mark i
MarkedFamily marked_coface(const MarkedFamily& f, long i);
MarkedFamily marked_codegeneracy(const MarkedFamily& f, long i);

// concatenation: marks of f, then len_f + marks of g
MarkedFamily concat_marked(const MarkedFamily& f, const MarkedFamily& g);

// evaluation of the track at mark i: a realization-valued map on the base
PPMap ev_component(const MarkedFamily& f, long i);

struct MarkedChain {
    std::map<std::string, std::pair<MarkedFamily, Rat>> terms;

    void add(const MarkedFamily& f, const Rat& c);
    bool is_zero() const { return terms.empty(); }
    MarkedChain& operator+=(const MarkedChain& o);
    MarkedChain operator*(const Rat& c) const;
    bool operator==(const MarkedChain& o) const;
};

MarkedChain marked_chain(const MarkedFamily& f, const Rat& c = Rat(1));
MarkedChain marked_boundary(const MarkedChain& c);
Tri marked_chain_equal(const MarkedChain& a, const MarkedChain& b, int depth = 0);

// triangulation of the base cube, permutation sum with signature coefficients
MarkedChain eta_marked(const MarkedChain& c);
// concatenation over the shuffle triangulation of the product of the two
// simplex bases, with shuffle signature coefficients (no degree Koszul)
MarkedChain concat_marked_shuffle(const MarkedFamily& f, const MarkedFamily& g);

} // namespace cobarlab
