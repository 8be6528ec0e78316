#pragma once

#include "cobarlab/rat.hpp"

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cobarlab {

// Sparse matrix over an exact scalar type (Int or Rat). Zero entries are
// never stored; set(r,c,0) erases.
template <class T>
class SparseMat {
  public:
    SparseMat() = default;
    SparseMat(long rows, long cols) : rows_(rows), cols_(cols) {}

    long rows() const { return rows_; }
    long cols() const { return cols_; }

    T get(long r, long c) const {
        auto it = entries_.find({r, c});
        return it == entries_.end() ? T(0) : it->second;
    }

    void set(long r, long c, const T& v) {
        check(r, c);
        if (v == 0)
            entries_.erase({r, c});
        else
            entries_[{r, c}] = v;
    }

    void add(long r, long c, const T& v) {
        check(r, c);
        auto it = entries_.find({r, c});
        if (it == entries_.end()) {
            if (v != 0) entries_[{r, c}] = v;
        } else {
            it->second += v;
            if (it->second == 0) entries_.erase(it);
        }
    }

    const std::map<std::pair<long, long>, T>& entries() const { return entries_; }
    size_t nnz() const { return entries_.size(); }

    static SparseMat identity(long n) {
        SparseMat m(n, n);
        for (long i = 0; i < n; ++i) m.set(i, i, T(1));
        return m;
    }

    SparseMat transpose() const {
        SparseMat m(cols_, rows_);
        for (auto& [rc, v] : entries_) m.set(rc.second, rc.first, v);
        return m;
    }

    friend SparseMat operator*(const SparseMat& a, const SparseMat& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("SparseMat: shape mismatch in product");
        // row-major pass over a, with b's rows indexed
        std::vector<std::vector<std::pair<long, T>>> brow(b.rows_);
        for (auto& [rc, v] : b.entries_) brow[rc.first].push_back({rc.second, v});
        SparseMat c(a.rows_, b.cols_);
        for (auto& [rc, v] : a.entries_)
            for (auto& [j, w] : brow[rc.second]) c.add(rc.first, j, v * w);
        return c;
    }

    friend SparseMat operator-(const SparseMat& a, const SparseMat& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw std::invalid_argument("SparseMat: shape mismatch in difference");
        SparseMat c = a;
        for (auto& [rc, v] : b.entries_) c.add(rc.first, rc.second, -v);
        return c;
    }

    bool is_zero() const { return entries_.empty(); }

    bool operator==(const SparseMat& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && entries_ == o.entries_;
    }

  private:
    void check(long r, long c) const {
        if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
            throw std::out_of_range("SparseMat: index out of range");
    }

    long rows_ = 0, cols_ = 0;
    std::map<std::pair<long, long>, T> entries_;
};

using IntMat = SparseMat<Int>;
using RatMat = SparseMat<Rat>;

inline RatMat to_rat(const IntMat& m) {
    RatMat r(m.rows(), m.cols());
    for (auto& [rc, v] : m.entries()) r.set(rc.first, rc.second, Rat(v));
    return r;
}

// Rank over Q by fraction-free-ish Gaussian elimination (dense rows of a
// sparse matrix; desk scale).
long rank_rat(const RatMat& m);

// Solve A x = b over Q; returns false if inconsistent. x has size A.cols().
bool solve_rat(const RatMat& a, const std::vector<Rat>& b, std::vector<Rat>& x);

// Basis of the right nullspace {x : A x = 0}; each vector has size A.cols().
std::vector<std::vector<Rat>> null_rat(const RatMat& a);

} // namespace cobarlab
