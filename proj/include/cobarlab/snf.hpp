#pragma once

#include "cobarlab/sparse.hpp"

namespace cobarlab {

struct SnfResult {
    std::vector<Int> d;  // diagonal, each d[i] divides d[i+1], nonnegative
    IntMat u, v;         // unimodular, u*m*v diagonal with diagonal d
};

// Smith normal form with minimal-absolute-value pivoting. Total on integer
// matrices; u and v are accumulated row/column transforms.
SnfResult snf(const IntMat& m);

// Check u*m*v is diagonal with diagonal d, divisibility chain holds, and
// u, v are unimodular (|det| = 1 over Q via rank+SNF of the transforms
// would be circular, so det is computed by fraction-free elimination).
bool snf_verify(const IntMat& m, const SnfResult& r);

struct ChainComplex {
    // basis[k] = ordered labels in degree k; diff[k] : C_k -> C_{k-1},
    // rows indexed by basis[k-1], cols by basis[k]. Degrees are 0..top.
    std::vector<std::vector<std::string>> basis;
    std::vector<IntMat> diff;  // diff[0] is the (empty) map to degree -1

    long dim(long k) const {
        return (k < 0 || k >= (long)basis.size()) ? 0 : (long)basis[k].size();
    }
    // throws if d∘d != 0 anywhere
    void validate() const;
};

struct HomologyResult {
    long betti = 0;
    std::vector<Int> torsion;  // invariant factors > 1
};

HomologyResult homology(const ChainComplex& c, long deg);

// Independent oracle: betti over Q from ranks by Gaussian elimination.
long betti_rat(const ChainComplex& c, long deg);

} // namespace cobarlab
