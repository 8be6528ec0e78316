#include "cobarlab/cobar_prod.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cobarlab {

std::string to_string(const ProdWord& w) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < w.letters.size(); ++i) {
        if (i) os << ",";
        os << w.letters[i];
    }
    os << ")";
    return os.str();
}

long prod_degree(const SSet& X, const ProdWord& w) {
    long d = 0;
    for (auto& l : w.letters) d += X.gen_dim(l) - 1;
    return d;
}

void TotElement::add(const ProdWord& w, const Rat& c) {
    if (c == 0) return;
    // levels above the cap are untracked: adding there is a no-op (the
    // truncation is the quotient by the high-level subcomplex)
    if (w.level() > levels) return;
    auto it = terms.find(w);
    if (it == terms.end())
        terms[w] = c;
    else {
        it->second += c;
        if (it->second == 0) terms.erase(it);
    }
}

namespace {

void check_vertex(const SSet& X, const std::string& v) {
    if (!X.has_generator(v) || X.gen_dim(v) != 0)
        throw std::invalid_argument("cobar_prod: '" + v + "' is not a vertex of " + X.name());
}

} // namespace

TotElement tot_unit(const SSet& X, const std::string& a, long levels) {
    check_vertex(X, a);
    TotElement x;
    x.X = &X;
    x.src = a;
    x.dst = a;
    x.levels = levels;
    x.add(ProdWord{}, 1);
    return x;
}

TotElement tot_word(const SSet& X, const std::string& a, const std::string& b,
                    const std::vector<std::string>& letters, long levels) {
    check_vertex(X, a);
    check_vertex(X, b);
    for (auto& l : letters)
        if (!X.has_generator(l))
            throw std::invalid_argument("cobar_prod: unknown letter '" + l + "'");
    if ((long)letters.size() > levels)
        throw std::invalid_argument("cobar_prod: word is longer than the level cap");
    TotElement x;
    x.X = &X;
    x.src = a;
    x.dst = b;
    x.levels = levels;
    x.add(ProdWord{letters}, 1);
    return x;
}

std::map<ProdWord, Rat> coface(const SSet& X, const std::string& a, const std::string& b, long i,
                               const ProdWord& w) {
    long m = w.level();
    if (i < 0 || i > m + 1) throw std::out_of_range("coface: index out of range");
    std::map<ProdWord, Rat> out;
    if (i == 0) {
        check_vertex(X, a);
        ProdWord w2 = w;
        w2.letters.insert(w2.letters.begin(), a);
        out[w2] = 1;
        return out;
    }
    if (i == m + 1) {
        check_vertex(X, b);
        ProdWord w2 = w;
        w2.letters.push_back(b);
        out[w2] = 1;
        return out;
    }
    // interior: full coproduct on letter i-1, normalized (degenerate factors
    // vanish in normalized chains)
    for (auto& [f, bk] : X.aw_pairs(X.simp(w.letters[i - 1]))) {
        if (f.is_degenerate() || bk.is_degenerate()) continue;
        ProdWord w2 = w;
        w2.letters[i - 1] = f.gen;
        w2.letters.insert(w2.letters.begin() + i, bk.gen);
        auto it = out.find(w2);
        if (it == out.end())
            out[w2] = 1;
        else
            it->second += 1;
    }
    return out;
}

std::map<ProdWord, Rat> codegeneracy(const SSet& X, long i, const ProdWord& w) {
    long m = w.level();
    if (i < 0 || i > m - 1) throw std::out_of_range("codegeneracy: index out of range");
    std::map<ProdWord, Rat> out;
    if (X.gen_dim(w.letters[i]) != 0) return out;  // counit vanishes above degree 0
    ProdWord w2 = w;
    w2.letters.erase(w2.letters.begin() + i);
    out[w2] = 1;
    return out;
}

// The totalization differential is realized letterwise in the standard cobar
// form on shifted letters: with prefix P_j = (-1)^{sum of earlier (dim - 1)},
//   s^{-1}x ↦ -s^{-1}∂x + Σ_{full AW} (-1)^{dim x'} s^{-1}x' ⊗ s^{-1}x''
// plus the bicomodule coface terms inserting the endpoint vertices,
//   -(a at the front) + (-1)^{deg w}(b at the back).
// This is the unique sign placement (given the +1 letter coefficients of the
// comparison map g_map) for which D² = 0, concatenation satisfies the Leibniz
// rule, and g_map is a chain map — all three are enforced mechanically.
TotElement d_prod(const TotElement& x) {
    if (!x.X) throw std::invalid_argument("d_prod: empty element");
    const SSet& X = *x.X;
    TotElement out;
    out.X = x.X;
    out.src = x.src;
    out.dst = x.dst;
    out.levels = x.levels;
    for (auto& [w, c] : x.terms) {
        long m = w.level();
        Rat pre = 1;
        for (long j = 0; j < m; ++j) {
            const std::string& l = w.letters[j];
            long dim = X.gen_dim(l);
            if (dim >= 1) {
                SimplicialChain bd = boundary(chain_of(X, l));
                for (auto& [l2, c2] : bd.terms) {
                    ProdWord w2 = w;
                    w2.letters[j] = l2;
                    out.add(w2, -pre * c * c2);
                }
            }
            for (auto& [f, bk] : X.aw_pairs(X.simp(l))) {
                if (f.is_degenerate() || bk.is_degenerate()) continue;
                Rat inner = (X.dim(f) % 2 == 0) ? 1 : -1;
                ProdWord w2 = w;
                w2.letters[j] = f.gen;
                w2.letters.insert(w2.letters.begin() + j + 1, bk.gen);
                out.add(w2, pre * c * inner);
            }
            if ((dim - 1) % 2 != 0) pre = -pre;
        }
        ProdWord front = w;
        front.letters.insert(front.letters.begin(), x.src);
        out.add(front, -c);
        ProdWord back = w;
        back.letters.push_back(x.dst);
        out.add(back, prod_degree(X, w) % 2 == 0 ? c : -c);
    }
    return out;
}

TotElement compose_prod(const TotElement& x, const TotElement& y) {
    if (!x.X || !y.X || x.X != y.X)
        throw std::invalid_argument("compose_prod: elements over different spaces");
    if (x.dst != y.src) throw std::invalid_argument("compose_prod: endpoint mismatch");
    TotElement out;
    out.X = x.X;
    out.src = x.src;
    out.dst = y.dst;
    out.levels = std::min(x.levels, y.levels);
    for (auto& [wx, cx] : x.terms)
        for (auto& [wy, cy] : y.terms) {
            ProdWord w = wx;
            w.letters.insert(w.letters.end(), wy.letters.begin(), wy.letters.end());
            out.add(w, cx * cy);
        }
    return out;
}

TotElement conormalize(const TotElement& x) {
    if (!x.X) return x;
    const SSet& X = *x.X;
    TotElement cur = x;
    for (long i = 0; i < x.levels; ++i) {
        // one factor (1 - δ_{i+1}σ_i), applied levelwise where defined
        TotElement next = cur;
        for (auto& [w, c] : cur.terms) {
            if (w.level() < i + 1) continue;
            for (auto& [w2, c2] : codegeneracy(X, i, w))
                for (auto& [w3, c3] : coface(X, x.src, x.dst, i + 1, w2))
                    next.add(w3, -c * c2 * c3);
        }
        cur = next;
    }
    return cur;
}

bool is_conormalized(const TotElement& x) {
    if (!x.X) return true;
    const SSet& X = *x.X;
    // per level and per index, the image under σ_i must cancel
    for (long lev = 1; lev <= x.levels; ++lev) {
        for (long i = 0; i < lev; ++i) {
            std::map<ProdWord, Rat> img;
            for (auto& [w, c] : x.terms) {
                if (w.level() != lev) continue;
                for (auto& [w2, c2] : codegeneracy(X, i, w)) {
                    img[w2] += c * c2;
                    if (img[w2] == 0) img.erase(w2);
                }
            }
            if (!img.empty()) return false;
        }
    }
    return true;
}

TotElement g_map(const BoxChain& w, long levels) {
    TotElement out;
    out.levels = levels;
    if (!w.X || w.terms.empty()) {
        out.X = w.X;
        return out;
    }
    const SSet& X = *w.X;
    out.X = w.X;
    out.src = w.terms.begin()->first.src;
    out.dst = w.terms.begin()->first.dst;
    for (auto& [bw, c] : w.terms) {
        if (bw.src != out.src || bw.dst != out.dst)
            throw std::invalid_argument("g_map: mixed endpoints in the input chain");
        // letterwise s^{-1}σ + e(σ): every subset of edge letters may drop
        std::vector<ProdWord> acc{ProdWord{}};
        for (auto& l : bw.letters) {
            std::vector<ProdWord> nxt;
            for (auto& p : acc) {
                ProdWord keep = p;
                keep.letters.push_back(l);
                nxt.push_back(keep);
                if (X.gen_dim(l) == 1) nxt.push_back(p);  // e(edge) = 1
            }
            acc = std::move(nxt);
        }
        for (auto& p : acc) out.add(p, c);
    }
    return out;
}

Rat pr0(const TotElement& x) {
    auto it = x.terms.find(ProdWord{});
    return it == x.terms.end() ? Rat(0) : it->second;
}

std::vector<ProdWord> enum_prod_words(const SSet& X, long degree, long levels) {
    std::vector<std::string> alphabet;
    for (long d = 0; d <= X.top_dim(); ++d)
        for (auto& g : X.generators(d)) alphabet.push_back(g);
    long max_delta = X.top_dim() - 1;  // a letter shifts the degree by dim - 1
    std::vector<ProdWord> out;
    ProdWord cur;
    long cur_deg = 0;
    std::function<void()> rec = [&]() {
        if (cur_deg == degree) out.push_back(cur);
        long slots = levels - cur.level();
        if (slots == 0) return;
        // prune: remaining letters move the degree by at most slots in either
        // direction (vertices give -1, top simplices give max_delta)
        long lo = cur_deg - slots;
        long hi = cur_deg + std::max<long>(0, slots * max_delta);
        if (degree < lo || degree > hi) return;
        for (auto& l : alphabet) {
            cur.letters.push_back(l);
            cur_deg += X.gen_dim(l) - 1;
            rec();
            cur_deg -= X.gen_dim(l) - 1;
            cur.letters.pop_back();
        }
    };
    rec();
    std::sort(out.begin(), out.end());
    return out;
}

ProdComplex prod_complex(const SSet& X, const std::string& a, const std::string& b, long levels,
                         long min_degree, long max_degree) {
    check_vertex(X, a);
    check_vertex(X, b);
    if (max_degree < min_degree) throw std::invalid_argument("prod_complex: empty degree window");
    ProdComplex pc;
    pc.X = &X;
    pc.src = a;
    pc.dst = b;
    pc.levels = levels;
    pc.min_degree = min_degree;
    long n = max_degree - min_degree + 1;
    pc.words.resize(n);
    pc.chain.basis.resize(n);
    pc.chain.diff.resize(n);
    std::vector<std::map<ProdWord, long>> index(n);
    for (long k = 0; k < n; ++k) {
        pc.words[k] = enum_prod_words(X, min_degree + k, levels);
        for (long j = 0; j < (long)pc.words[k].size(); ++j) {
            pc.chain.basis[k].push_back(to_string(pc.words[k][j]));
            index[k][pc.words[k][j]] = j;
        }
    }
    for (long k = 0; k < n; ++k) {
        long rows = k == 0 ? 0 : (long)pc.words[k - 1].size();
        IntMat m(rows, (long)pc.words[k].size());
        if (k > 0) {
            for (long j = 0; j < (long)pc.words[k].size(); ++j) {
                TotElement d = d_prod(tot_word(X, a, b, pc.words[k][j].letters, levels));
                for (auto& [w, c] : d.terms) {
                    if (rat_den(c) != 1)
                        throw std::logic_error("prod_complex: non-integral differential entry");
                    m.add(index[k - 1].at(w), j, rat_num(c));
                }
            }
        }
        pc.chain.diff[k] = std::move(m);
    }
    pc.chain.validate();
    return pc;
}

long prod_betti(const ProdComplex& pc, long degree) {
    long k = degree - pc.min_degree;
    if (k < 0 || k >= (long)pc.words.size())
        throw std::out_of_range("prod_betti: degree outside the computed window");
    return betti_rat(pc.chain, k);
}

namespace {

// kernel of the stacked codegeneracies on the span of the given words,
// returned as column vectors
std::vector<std::vector<Rat>> sigma_kernel(const SSet& X, const std::vector<ProdWord>& words) {
    std::map<std::pair<long, ProdWord>, long> rowid;
    std::vector<std::tuple<long, long, Rat>> entries;  // (row, col, val)
    for (long j = 0; j < (long)words.size(); ++j) {
        const ProdWord& w = words[j];
        for (long i = 0; i < w.level(); ++i)
            for (auto& [w2, c2] : codegeneracy(X, i, w)) {
                auto key = std::make_pair(i, w2);
                auto [it, fresh] = rowid.try_emplace(key, (long)rowid.size());
                entries.emplace_back(it->second, j, c2);
            }
    }
    RatMat s((long)rowid.size(), (long)words.size());
    for (auto& [r, c, v] : entries) s.add(r, c, v);
    return null_rat(s);
}

} // namespace

long conorm_betti(const SSet& X, const std::string& a, const std::string& b, long levels,
                  long degree) {
    check_vertex(X, a);
    check_vertex(X, b);
    std::vector<std::vector<ProdWord>> words(3);
    std::vector<std::map<ProdWord, long>> index(3);
    std::vector<std::vector<std::vector<Rat>>> ker(3);
    for (long t = 0; t < 3; ++t) {  // degrees degree+1, degree, degree-1
        words[t] = enum_prod_words(X, degree + 1 - t, levels);
        for (long j = 0; j < (long)words[t].size(); ++j) index[t][words[t][j]] = j;
        ker[t] = sigma_kernel(X, words[t]);
    }
    // induced differential between kernel bases, in kernel coordinates
    auto induced = [&](long t) -> RatMat {  // degree+1-t -> degree-t
        RatMat basis((long)words[t + 1].size(), (long)ker[t + 1].size());
        for (long j = 0; j < (long)ker[t + 1].size(); ++j)
            for (long r = 0; r < (long)words[t + 1].size(); ++r) basis.set(r, j, ker[t + 1][j][r]);
        RatMat out((long)ker[t + 1].size(), (long)ker[t].size());
        for (long j = 0; j < (long)ker[t].size(); ++j) {
            TotElement v;
            v.X = &X;
            v.src = a;
            v.dst = b;
            v.levels = levels;
            for (long r = 0; r < (long)words[t].size(); ++r)
                v.add(words[t][r], ker[t][j][r]);
            TotElement dv = d_prod(v);
            std::vector<Rat> rhs(words[t + 1].size(), Rat(0));
            for (auto& [w, c] : dv.terms) {
                auto it = index[t + 1].find(w);
                if (it == index[t + 1].end())
                    throw std::logic_error("conorm_betti: differential left the degree window");
                rhs[it->second] = c;
            }
            std::vector<Rat> y;
            if (!solve_rat(basis, rhs, y))
                throw std::logic_error("conorm_betti: differential does not preserve the kernel");
            for (long r = 0; r < (long)y.size(); ++r) out.set(r, j, y[r]);
        }
        return out;
    };
    RatMat d_in = induced(0);   // degree+1 -> degree
    RatMat d_out = induced(1);  // degree -> degree-1
    return (long)ker[1].size() - rank_rat(d_out) - rank_rat(d_in);
}

TotElement bounding_chain(const TotElement& target) {
    if (!target.X) throw std::invalid_argument("bounding_chain: empty target");
    const SSet& X = *target.X;
    TotElement out;
    out.X = target.X;
    out.src = target.src;
    out.dst = target.dst;
    out.levels = target.levels;
    if (target.is_zero()) return out;
    TotElement bd = d_prod(target);
    if (!bd.is_zero()) {
        std::string msg = "bounding_chain: target is not a cycle; boundary =";
        for (auto& [w, c] : bd.terms) msg += " " + to_string(c) + "*" + to_string(w);
        throw std::invalid_argument(msg);
    }
    // letter closure of the target under boundary and coproduct, plus the
    // endpoint vertices inserted by the cofaces
    std::set<std::string> closure{target.src, target.dst};
    for (auto& [w, c] : target.terms)
        for (auto& l : w.letters) closure.insert(l);
    std::vector<std::string> queue(closure.begin(), closure.end());
    while (!queue.empty()) {
        std::string l = queue.back();
        queue.pop_back();
        std::vector<std::string> next;
        if (X.gen_dim(l) >= 1)
            for (auto& [l2, c2] : boundary(chain_of(X, l)).terms) next.push_back(l2);
        for (auto& [f, bk] : X.aw_pairs(X.simp(l))) {
            if (!f.is_degenerate()) next.push_back(f.gen);
            if (!bk.is_degenerate()) next.push_back(bk.gen);
        }
        for (auto& l2 : next)
            if (closure.insert(l2).second) queue.push_back(l2);
    }
    // close upward as well: a primitive may use filler simplices whose
    // boundaries lie in the span (e.g. the top cell bounding its own boundary)
    for (bool grew = true; grew;) {
        grew = false;
        for (long d = 1; d <= X.top_dim(); ++d)
            for (auto& g : X.generators(d)) {
                if (closure.count(g)) continue;
                bool all_in = true;
                for (auto& [l2, c2] : boundary(chain_of(X, g)).terms)
                    if (!closure.count(l2)) all_in = false;
                if (all_in) {
                    closure.insert(g);
                    grew = true;
                }
            }
    }
    std::set<long> degs;
    for (auto& [w, c] : target.terms) degs.insert(prod_degree(X, w) + 1);
    // candidate words over the closure alphabet, one degree higher
    std::vector<std::string> alphabet(closure.begin(), closure.end());
    long max_delta = 0, min_delta = 0;
    for (auto& l : alphabet) {
        max_delta = std::max(max_delta, X.gen_dim(l) - 1);
        min_delta = std::min(min_delta, X.gen_dim(l) - 1);
    }
    std::vector<ProdWord> cand;
    ProdWord cur;
    long cur_deg = 0;
    std::function<void()> rec = [&]() {
        if (degs.count(cur_deg)) cand.push_back(cur);
        long slots = target.levels - cur.level();
        if (slots == 0) return;
        long lo = cur_deg + slots * min_delta, hi = cur_deg + slots * max_delta;
        bool reachable = false;
        for (long d : degs)
            if (d >= lo && d <= hi) reachable = true;
        if (!reachable) return;
        for (auto& l : alphabet) {
            cur.letters.push_back(l);
            cur_deg += X.gen_dim(l) - 1;
            rec();
            cur_deg -= X.gen_dim(l) - 1;
            cur.letters.pop_back();
        }
    };
    rec();
    if (cand.size() > 200000)
        throw std::runtime_error(
            "bounding_chain: no contraction data (search space too large at this watermark)");
    std::map<ProdWord, long> rowid;
    std::vector<std::tuple<long, long, Rat>> entries;
    for (long j = 0; j < (long)cand.size(); ++j) {
        TotElement d = d_prod(tot_word(X, target.src, target.dst, cand[j].letters, target.levels));
        for (auto& [w, c] : d.terms) {
            auto [it, fresh] = rowid.try_emplace(w, (long)rowid.size());
            entries.emplace_back(it->second, j, c);
        }
    }
    for (auto& [w, c] : target.terms) rowid.try_emplace(w, (long)rowid.size());
    RatMat A((long)rowid.size(), (long)cand.size());
    for (auto& [r, c, v] : entries) A.add(r, c, v);
    std::vector<Rat> rhs(rowid.size(), Rat(0));
    for (auto& [w, c] : target.terms) rhs[rowid.at(w)] = c;
    std::vector<Rat> sol;
    if (!solve_rat(A, rhs, sol))
        throw std::runtime_error(
            "bounding_chain: no contraction data (the cycle has no primitive over the letter "
            "closure within the level watermark)");
    for (long j = 0; j < (long)cand.size(); ++j) out.add(cand[j], sol[j]);
    return out;
}

} // namespace cobarlab
