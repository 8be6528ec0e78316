#include "cobarlab/snf.hpp"

#include <stdexcept>

namespace cobarlab {

namespace {

struct DenseInt {
    long nr, nc;
    std::vector<std::vector<Int>> a;
    DenseInt(const IntMat& m) : nr(m.rows()), nc(m.cols()), a(nr, std::vector<Int>(nc, Int(0))) {
        for (auto& [rc, v] : m.entries()) a[rc.first][rc.second] = v;
    }
    DenseInt(long r, long c, bool id) : nr(r), nc(c), a(r, std::vector<Int>(c, Int(0))) {
        if (id)
            for (long i = 0; i < r && i < c; ++i) a[i][i] = 1;
    }
    IntMat to_sparse() const {
        IntMat m(nr, nc);
        for (long r = 0; r < nr; ++r)
            for (long c = 0; c < nc; ++c)
                if (a[r][c] != 0) m.set(r, c, a[r][c]);
        return m;
    }
};

void row_swap(DenseInt& m, long i, long j) { std::swap(m.a[i], m.a[j]); }
void col_swap(DenseInt& m, long i, long j) {
    for (long r = 0; r < m.nr; ++r) std::swap(m.a[r][i], m.a[r][j]);
}
void row_addmul(DenseInt& m, long dst, long src, const Int& f) {
    for (long c = 0; c < m.nc; ++c) m.a[dst][c] += f * m.a[src][c];
}
void col_addmul(DenseInt& m, long dst, long src, const Int& f) {
    for (long r = 0; r < m.nr; ++r) m.a[r][dst] += f * m.a[r][src];
}
void row_neg(DenseInt& m, long i) {
    for (long c = 0; c < m.nc; ++c) m.a[i][c] = -m.a[i][c];
}

Int det_unimodular_check(const DenseInt& m) {
    // fraction-free Bareiss determinant; m must be square
    long n = m.nr;
    std::vector<std::vector<Int>> a = m.a;
    Int prev = 1;
    int sign = 1;
    for (long k = 0; k < n - 1; ++k) {
        if (a[k][k] == 0) {
            long piv = -1;
            for (long r = k + 1; r < n; ++r)
                if (a[r][k] != 0) { piv = r; break; }
            if (piv < 0) return 0;
            std::swap(a[k], a[piv]);
            sign = -sign;
        }
        for (long i = k + 1; i < n; ++i)
            for (long j = k + 1; j < n; ++j)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return sign > 0 ? a[n - 1][n - 1] : Int(-a[n - 1][n - 1]);
}

} // namespace

SnfResult snf(const IntMat& m) {
    DenseInt a(m);
    DenseInt u(m.rows(), m.rows(), true);
    DenseInt v(m.cols(), m.cols(), true);
    long nr = a.nr, nc = a.nc;
    long k = 0;
    long nmin = std::min(nr, nc);

    while (k < nmin) {
        // find pivot with minimal |value| in the remaining block
        long pr = -1, pc = -1;
        Int best = 0;
        for (long r = k; r < nr; ++r)
            for (long c = k; c < nc; ++c) {
                if (a.a[r][c] == 0) continue;
                Int av = int_abs(a.a[r][c]);
                if (pr < 0 || av < best) { pr = r; pc = c; best = av; }
            }
        if (pr < 0) break;  // remaining block zero
        if (pr != k) { row_swap(a, k, pr); row_swap(u, k, pr); }
        if (pc != k) { col_swap(a, k, pc); col_swap(v, pc, k); }
        if (a.a[k][k] < 0) { row_neg(a, k); row_neg(u, k); }

        bool clean = true;
        for (long r = k + 1; r < nr; ++r) {
            if (a.a[r][k] == 0) continue;
            Int q = a.a[r][k] / a.a[k][k];
            if (q != 0) { row_addmul(a, r, k, -q); row_addmul(u, r, k, -q); }
            if (a.a[r][k] != 0) clean = false;
        }
        for (long c = k + 1; c < nc; ++c) {
            if (a.a[k][c] == 0) continue;
            Int q = a.a[k][c] / a.a[k][k];
            if (q != 0) { col_addmul(a, c, k, -q); col_addmul(v, c, k, -q); }
            if (a.a[k][c] != 0) clean = false;
        }
        if (!clean) continue;  // pivot shrank; redo this k

        // divisibility: fold any non-multiple into the pivot block
        bool redo = false;
        for (long r = k + 1; r < nr && !redo; ++r)
            for (long c = k + 1; c < nc && !redo; ++c)
                if (a.a[r][c] % a.a[k][k] != 0) {
                    row_addmul(a, k, r, Int(1));
                    row_addmul(u, k, r, Int(1));
                    redo = true;
                }
        if (redo) continue;
        ++k;
    }

    SnfResult res;
    res.d.resize(nmin);
    for (long i = 0; i < nmin; ++i) res.d[i] = a.a[i][i];
    res.u = u.to_sparse();
    res.v = v.to_sparse();
    return res;
}

bool snf_verify(const IntMat& m, const SnfResult& r) {
    IntMat prod = r.u * m * r.v;
    long nmin = std::min(m.rows(), m.cols());
    for (auto& [rc, v] : prod.entries()) {
        if (rc.first != rc.second) return false;
        if (rc.first >= nmin) return false;
        if (v != r.d[rc.first]) return false;
    }
    for (long i = 0; i < nmin; ++i) {
        if (r.d[i] < 0) return false;
        if (prod.get(i, i) != r.d[i]) return false;
        if (i + 1 < nmin && r.d[i] != 0 && r.d[i + 1] % r.d[i] != 0) return false;
        if (i + 1 < nmin && r.d[i] == 0 && r.d[i + 1] != 0) return false;
    }
    Int du = det_unimodular_check(DenseInt(r.u));
    Int dv = det_unimodular_check(DenseInt(r.v));
    return int_abs(du) == 1 && int_abs(dv) == 1;
}

void ChainComplex::validate() const {
    for (size_t k = 0; k + 1 < diff.size(); ++k) {
        if ((long)k + 1 >= (long)diff.size()) break;
        const IntMat& lo = diff[k];
        const IntMat& hi = diff[k + 1];
        if (lo.cols() != hi.rows())
            throw std::runtime_error("ChainComplex: differential shapes inconsistent in degree " + std::to_string(k + 1));
        if (k == 0) continue;  // diff[0] maps to degree -1 (zero module)
        IntMat comp = lo * hi;
        if (!comp.is_zero())
            throw std::runtime_error("ChainComplex: d∘d != 0 between degrees " + std::to_string(k + 1) + " and " + std::to_string(k - 1));
    }
}

HomologyResult homology(const ChainComplex& c, long deg) {
    HomologyResult h;
    if (deg < 0 || deg >= (long)c.basis.size()) return h;
    long n = c.dim(deg);
    // rank of d_deg : C_deg -> C_{deg-1}
    long rank_out = 0;
    if (deg >= 1 && deg < (long)c.diff.size()) rank_out = rank_rat(to_rat(c.diff[deg]));
    // d_{deg+1} : C_{deg+1} -> C_deg
    long rank_in = 0;
    std::vector<Int> inv;
    if (deg + 1 < (long)c.diff.size()) {
        SnfResult s = snf(c.diff[deg + 1]);
        for (auto& d : s.d) {
            if (d == 0) continue;
            ++rank_in;
            if (d > 1) inv.push_back(d);
        }
    }
    h.betti = n - rank_out - rank_in;
    h.torsion = inv;
    return h;
}

long betti_rat(const ChainComplex& c, long deg) {
    if (deg < 0 || deg >= (long)c.basis.size()) return 0;
    long n = c.dim(deg);
    long rank_out = 0;
    if (deg >= 1 && deg < (long)c.diff.size()) rank_out = rank_rat(to_rat(c.diff[deg]));
    long rank_in = 0;
    if (deg + 1 < (long)c.diff.size()) rank_in = rank_rat(to_rat(c.diff[deg + 1]));
    return n - rank_out - rank_in;
}

} // namespace cobarlab
