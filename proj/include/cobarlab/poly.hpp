#pragma once

#include "cobarlab/rat.hpp"

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace cobarlab {

// exponent vector, trailing zeros trimmed
using Mono = std::vector<int>;

// variables below kParamBase are geometric coordinates (subject to
// renumbering by face/projection operations); variables at kParamBase+i are
// formal parameters carried symbolically and never renumbered
inline constexpr int kParamBase = 100;

// sparse multivariate polynomial over Q
struct Poly {
    std::map<Mono, Rat> t;

    static Poly zero() { return {}; }
    static Poly constant(const Rat& c);
    static Poly var(int i);
    static Poly param(int i) { return var(kParamBase + i); }

    bool is_zero() const { return t.empty(); }
    bool is_constant() const;
    Rat constant_value() const;  // 0 for the zero polynomial; requires is_constant
    bool is_affine() const;      // total degree <= 1
    long total_degree() const;   // -1 for zero
    bool uses_var(int i) const;
    std::vector<int> vars() const;  // sorted list of variables that occur

    Poly operator-() const;
    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(const Rat& c) const;
    Poly& operator+=(const Poly& o);
    bool operator==(const Poly& o) const = default;

    Poly pow(int e) const;
    Poly subst(int var, const Poly& q) const;
    // renumber coordinate variables (indices < kParamBase) through f
    Poly rename(const std::function<int(int)>& f) const;
    // coordinate var i -> coord[i] (missing -> 0), param i -> params[i]
    Rat eval(const std::vector<Rat>& coord, const std::vector<Rat>& params = {}) const;

    std::string str(const std::function<std::string(int)>& name) const;
    std::string str() const;  // x0,x1,... and l0,l1,... for parameters
};

Poly operator*(const Rat& c, const Poly& p);

// ---- exact feasibility of affine inequality systems ----

struct AffineSystem {
    std::vector<std::pair<Poly, bool>> cons;  // (p, strict): p >= 0, or p > 0
    void add(const Poly& p, bool strict = false) { cons.push_back({p, strict}); }
};

struct FeasResult {
    bool feasible = false;
    std::map<int, Rat> witness;  // variables not listed sit at 0
};

// Fourier-Motzkin over Q; throws std::invalid_argument on non-affine input
FeasResult affine_feasible(const AffineSystem& sys);

// nonempty interior of {p >= 0 for all p}: all-strict feasibility with
// identically-zero constraints dropped
FeasResult full_dimensional(const std::vector<Poly>& ge);

// ---- interval bound over a coordinate box ----

// encloses p over the product of [box[v].first, box[v].second]; every
// variable of p must appear in box
std::pair<Rat, Rat> range_bound(const Poly& p, const std::map<int, std::pair<Rat, Rat>>& box);

} // namespace cobarlab
