#pragma once

#include "cobarlab/rat.hpp"
#include "cobarlab/snf.hpp"

#include <compare>
#include <map>
#include <string>
#include <vector>

namespace cobarlab {

// A (possibly degenerate) simplex: a degeneracy word in canonical strictly
// decreasing form applied to a nondegenerate generator.
struct Simp {
    std::vector<int> degen;  // s_{degen[0]} s_{degen[1]} ... , strictly decreasing
    std::string gen;

    bool is_degenerate() const { return !degen.empty(); }
    auto operator<=>(const Simp&) const = default;
};

std::string to_string(const Simp& s);

class SSet {
  public:
    // generators[d] = ordered labels in dimension d; faces maps each
    // generator of dimension >= 1 to its n+1 faces.
    SSet(std::string name, std::vector<std::vector<std::string>> generators,
         std::map<std::string, std::vector<Simp>> faces);

    const std::string& name() const { return name_; }
    long top_dim() const { return (long)generators_.size() - 1; }
    const std::vector<std::string>& generators(long d) const;
    const std::vector<std::string>& vertex_set() const { return generators(0); }
    bool has_generator(const std::string& label) const { return gen_dim_.count(label) > 0; }
    long gen_dim(const std::string& label) const;
    long gen_index(const std::string& label) const;  // position within its dimension

    long dim(const Simp& s) const { return gen_dim(s.gen) + (long)s.degen.size(); }

    // d_i, 0 <= i <= dim; result canonical (possibly degenerate)
    Simp face(const Simp& s, int i) const;
    // s_j, 0 <= j <= dim
    Simp degenerate(const Simp& s, int j) const;

    std::string vertex(const Simp& s, long j) const;
    std::string first_vertex(const Simp& s) const { return vertex(s, 0); }
    std::string last_vertex(const Simp& s) const { return vertex(s, dim(s)); }

    // front p-face / back q-face
    Simp front_face(const Simp& s, long p) const;
    Simp back_face(const Simp& s, long q) const;

    // Alexander-Whitney pairs (front_p, back_{n-p}) for p = 0..n
    std::vector<std::pair<Simp, Simp>> aw_pairs(const Simp& s) const;

    Simp simp(const std::string& gen_label) const;

  private:
    void validate() const;

    std::string name_;
    std::vector<std::vector<std::string>> generators_;
    std::map<std::string, std::vector<Simp>> faces_;
    std::map<std::string, long> gen_dim_;
    std::map<std::string, long> gen_index_;
};

// Space document loader: fields `dimensions`, `generators`, `faces` with
// face expressions "label" or "s_{i,j,..}label".
SSet load_space_json(const std::string& text, const std::string& name = "loaded");
Simp parse_face_expr(const std::string& expr);

// Built-in corpus: delta:n, boundary:n, s1-min, s2-min, rp2, torus.
SSet builtin_space(const std::string& which);
bool is_builtin_space(const std::string& which);
std::vector<std::string> builtin_space_names();

// ---- normalized chains ----

struct SimplicialChain {
    const SSet* space = nullptr;
    long degree = 0;
    std::map<std::string, Rat> terms;  // nondegenerate labels only

    void add(const std::string& label, const Rat& c) {
        if (c == 0) return;
        auto it = terms.find(label);
        if (it == terms.end())
            terms[label] = c;
        else {
            it->second += c;
            if (it->second == 0) terms.erase(it);
        }
    }
    bool is_zero() const { return terms.empty(); }
    bool operator==(const SimplicialChain& o) const {
        return degree == o.degree && terms == o.terms;
    }
};

SimplicialChain chain_of(const SSet& X, const std::string& gen_label, const Rat& c = Rat(1));
SimplicialChain boundary(const SimplicialChain& c);

// chain-level AW coproduct: normalized, both factors nondegenerate
struct TensorChain {
    const SSet* space = nullptr;
    std::map<std::pair<std::string, std::string>, Rat> terms;

    void add(const std::string& a, const std::string& b, const Rat& c) {
        if (c == 0) return;
        auto key = std::make_pair(a, b);
        auto it = terms.find(key);
        if (it == terms.end())
            terms[key] = c;
        else {
            it->second += c;
            if (it->second == 0) terms.erase(it);
        }
    }
    bool is_zero() const { return terms.empty(); }
    bool operator==(const TensorChain& o) const { return terms == o.terms; }
};

TensorChain aw_coproduct(const SimplicialChain& c);

// normalized chain complex of the space, over Z
ChainComplex simplicial_chain_complex(const SSet& X);

// ---- necklaces ----

struct Necklace {
    const SSet* space = nullptr;
    std::vector<Simp> beads;          // nondegenerate, joints matching
    std::vector<long> block_sizes;    // consecutive grouping into k blocks

    long total_beads() const { return (long)beads.size(); }
    long blocks() const { return (long)block_sizes.size(); }
    void validate() const;  // throws on joint/degeneracy/grouping violation
};

} // namespace cobarlab
