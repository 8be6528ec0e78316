#include "cobarlab/sparse.hpp"

#include <set>

namespace cobarlab {

namespace {

// dense row representation for elimination
std::vector<std::vector<Rat>> densify(const RatMat& m) {
    std::vector<std::vector<Rat>> rows(m.rows(), std::vector<Rat>(m.cols(), Rat(0)));
    for (auto& [rc, v] : m.entries()) rows[rc.first][rc.second] = v;
    return rows;
}

// reduce to row echelon form in place, returns rank
long echelon(std::vector<std::vector<Rat>>& rows, long ncols) {
    long rank = 0;
    long nrows = (long)rows.size();
    for (long col = 0; col < ncols && rank < nrows; ++col) {
        long piv = -1;
        for (long r = rank; r < nrows; ++r)
            if (rows[r][col] != 0) { piv = r; break; }
        if (piv < 0) continue;
        std::swap(rows[rank], rows[piv]);
        Rat p = rows[rank][col];
        for (long c = col; c < ncols; ++c) rows[rank][c] /= p;
        for (long r = 0; r < nrows; ++r) {
            if (r == rank || rows[r][col] == 0) continue;
            Rat f = rows[r][col];
            for (long c = col; c < ncols; ++c) rows[r][c] -= f * rows[rank][c];
        }
        ++rank;
    }
    return rank;
}

} // namespace

// sparse elimination: repeatedly pivot on the shortest remaining row, so the
// AW-style incidence matrices from the cobar modules stay tractable
long rank_rat(const RatMat& m) {
    if (m.nnz() == 0) return 0;
    std::map<long, std::map<long, Rat>> rows;
    for (auto& [rc, v] : m.entries()) rows[rc.first][rc.second] = v;
    std::map<long, std::set<long>> colrows;
    for (auto& [r, row] : rows)
        for (auto& [c, v] : row) colrows[c].insert(r);
    std::set<std::pair<size_t, long>> by_size;
    for (auto& [r, row] : rows) by_size.insert({row.size(), r});

    long rank = 0;
    while (!by_size.empty()) {
        auto [sz, r] = *by_size.begin();
        by_size.erase(by_size.begin());
        auto& row = rows[r];
        if (row.empty()) continue;
        ++rank;
        long c = row.begin()->first;
        Rat pv = row.begin()->second;
        std::set<long> targets = colrows[c];
        for (long r2 : targets) {
            if (r2 == r) continue;
            auto& row2 = rows[r2];
            by_size.erase({row2.size(), r2});
            Rat f = row2.at(c) / pv;
            for (auto& [cc, vv] : row) {
                auto it = row2.find(cc);
                if (it == row2.end()) {
                    row2[cc] = -f * vv;
                    colrows[cc].insert(r2);
                } else {
                    it->second -= f * vv;
                    if (it->second == 0) {
                        row2.erase(it);
                        colrows[cc].erase(r2);
                    }
                }
            }
            if (!row2.empty()) by_size.insert({row2.size(), r2});
        }
        for (auto& [cc, vv] : row) colrows[cc].erase(r);
        row.clear();
    }
    return rank;
}

bool solve_rat(const RatMat& a, const std::vector<Rat>& b, std::vector<Rat>& x) {
    long nr = a.rows(), nc = a.cols();
    std::vector<std::vector<Rat>> rows(nr, std::vector<Rat>(nc + 1, Rat(0)));
    for (auto& [rc, v] : a.entries()) rows[rc.first][rc.second] = v;
    for (long r = 0; r < nr; ++r) rows[r][nc] = b[r];

    std::vector<long> pivot_col;
    long rank = 0;
    for (long col = 0; col < nc && rank < nr; ++col) {
        long piv = -1;
        for (long r = rank; r < nr; ++r)
            if (rows[r][col] != 0) { piv = r; break; }
        if (piv < 0) continue;
        std::swap(rows[rank], rows[piv]);
        Rat p = rows[rank][col];
        for (long c = col; c <= nc; ++c) rows[rank][c] /= p;
        for (long r = 0; r < nr; ++r) {
            if (r == rank || rows[r][col] == 0) continue;
            Rat f = rows[r][col];
            for (long c = col; c <= nc; ++c) rows[r][c] -= f * rows[rank][c];
        }
        pivot_col.push_back(col);
        ++rank;
    }
    for (long r = rank; r < nr; ++r)
        if (rows[r][nc] != 0) return false;
    x.assign(nc, Rat(0));
    for (long r = 0; r < rank; ++r) x[pivot_col[r]] = rows[r][nc];
    return true;
}

std::vector<std::vector<Rat>> null_rat(const RatMat& a) {
    long nc = a.cols();
    auto rows = densify(a);
    long rank = echelon(rows, nc);

    // pivot column of echelon row r = first nonzero entry
    std::vector<long> pivot_of_col(nc, -1);
    for (long r = 0; r < rank; ++r)
        for (long c = 0; c < nc; ++c)
            if (rows[r][c] != 0) { pivot_of_col[c] = r; break; }

    std::vector<std::vector<Rat>> basis;
    for (long free_col = 0; free_col < nc; ++free_col) {
        if (pivot_of_col[free_col] >= 0) continue;
        std::vector<Rat> v(nc, Rat(0));
        v[free_col] = 1;
        for (long c = 0; c < nc; ++c)
            if (pivot_of_col[c] >= 0) v[c] = -rows[pivot_of_col[c]][free_col];
        basis.push_back(std::move(v));
    }
    return basis;
}

} // namespace cobarlab
