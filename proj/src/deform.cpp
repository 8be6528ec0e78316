#include "cobarlab/deform.hpp"

#include "cobarlab/sparse.hpp"

#include <sstream>
#include <stdexcept>

namespace cobarlab {

namespace {

bool all_at(const SSet& X, const std::string& g, const std::string& b) {
    Simp s = X.simp(g);
    long n = X.gen_dim(g);
    for (long j = 0; j <= n; ++j)
        if (X.vertex(s, j) != b) return false;
    return true;
}

BoxChain single_word(const SSet& X, const BoxWord& w) {
    BoxChain c;
    c.X = &X;
    c.add(w, 1);
    return c;
}

// derivation extension with explicit letterwise values: replaces each letter
// x_j by eta(x_j) (a chain of words from the basepoint to last(x_j)), with
// the letters before j pushed through the retraction and the Koszul prefix
// (-1)^{sum of earlier letter degrees}
BoxChain h_hat_with(const Deformation& D, const std::map<std::string, BoxChain>& eta,
                    const BoxChain& c) {
    const SSet& X = *D.X;
    BoxChain out;
    out.X = &X;
    for (auto& [w, coef] : c.terms) {
        Rat prefix = coef;
        for (size_t j = 0; j < w.letters.size(); ++j) {
            const std::string& lj = w.letters[j];
            auto it = eta.find(lj);
            if (it != eta.end() && !it->second.is_zero()) {
                BoxChain pre;
                if (j == 0)
                    pre = box_unit(X, D.basepoint);
                else {
                    BoxWord pw{w.src, X.first_vertex(X.simp(lj)),
                               {w.letters.begin(), w.letters.begin() + (long)j}};
                    pre = cobar_functor(D.retract, single_word(X, pw));
                }
                for (auto& [pw2, pc2] : pre.terms)
                    for (auto& [ew, ec] : it->second.terms) {
                        BoxWord nw;
                        nw.src = pw2.src;
                        nw.dst = w.dst;
                        nw.letters = pw2.letters;
                        nw.letters.insert(nw.letters.end(), ew.letters.begin(), ew.letters.end());
                        nw.letters.insert(nw.letters.end(), w.letters.begin() + (long)j + 1,
                                          w.letters.end());
                        validate_box_word(X, nw);
                        out.add(nw, prefix * pc2 * ec);
                    }
            }
            if ((X.gen_dim(lj) - 1) % 2 == 1) prefix = -prefix;
        }
    }
    return out;
}

// residual of the homotopy identity on a single word
BoxChain homotopy_residual(const Deformation& D, const std::map<std::string, BoxChain>& eta,
                           const BoxWord& w) {
    const SSet& X = *D.X;
    BoxChain cw = single_word(X, w);
    BoxChain r = d_box(h_hat_with(D, eta, cw));
    for (auto& [w2, c2] : h_hat_with(D, eta, d_box(cw)).terms) r.add(w2, c2);
    r.add(w, -1);
    for (auto& [w2, c2] : cobar_functor(D.retract, cw).terms) r.add(w2, c2);
    return r;
}

} // namespace

BoxChain deform_push(const Deformation& d, const BoxChain& c) {
    return cobar_functor(d.retract, c);
}

BoxChain h_hat(const Deformation& d, const BoxChain& c) { return h_hat_with(d, d.eta, c); }

std::vector<std::string> verify_deformation(const Deformation& d, long maxdeg, long max_letters) {
    std::vector<std::string> bad;
    for (long deg = 0; deg <= maxdeg; ++deg)
        for (auto& w : enum_box_words(*d.X, d.basepoint, d.basepoint, deg, max_letters)) {
            BoxChain r = homotopy_residual(d, d.eta, w);
            if (!r.is_zero()) {
                std::ostringstream os;
                os << "homotopy identity fails on " << to_string(w) << ":";
                for (auto& [w2, c2] : r.terms) os << " " << to_string(c2) << "·" << to_string(w2);
                bad.push_back(os.str());
            }
        }
    return bad;
}

namespace {

// flatten a morphism residual into keyed rational coordinates
std::map<std::string, Rat> flatten_residual(const std::string& g, const MorResidual& r) {
    std::map<std::string, Rat> out;
    if (r.counit != 0) out[g + "\x1f" "counit"] = r.counit;
    for (auto& [lk, c] : r.comap.terms) out[g + "\x1f" "comap\x1f" + lk.first + "," + lk.second] = c;
    for (auto& [l, c] : r.twisted.terms) out[g + "\x1f" "twisted\x1f" + l] = c;
    if (r.curv != 0) out[g + "\x1f" "curv"] = r.curv;
    return out;
}

} // namespace

Deformation deform_to_basepoint(const SSet& X, const PathSystem& ps, const std::string& b,
                                long eta_letters, long fit_maxdeg, long fit_letters) {
    if (ps.X != &X) throw std::invalid_argument("deform_to_basepoint: path system is for a different space");
    if (ps.root != b) throw std::invalid_argument("deform_to_basepoint: path system is not rooted at '" + b + "'");
    {
        std::vector<std::string> missing;
        for (auto& v : X.vertex_set())
            if (!ps.to_root.count(v)) missing.push_back(v);
        if (!missing.empty()) {
            std::ostringstream os;
            os << X.name() << ": not path-connected; no path to '" << b << "' from:";
            for (auto& v : missing) os << " " << v;
            throw std::runtime_error(os.str());
        }
    }

    Deformation D;
    D.X = &X;
    D.basepoint = b;
    D.eta_letters = eta_letters;
    D.fit_maxdeg = fit_maxdeg;
    D.fit_letters = fit_letters;

    CatCoalg cc = cat_coalg(X);
    CatCoalgMor m;
    m.src = m.dst = &X;
    for (auto& v : X.vertex_set()) m.f0[v] = chain_of(X, all_at(X, v, b) ? v : b);
    for (auto& e : X.generators(1))
        if (!all_at(X, e, b)) m.f1[e] = chain_of(X, b, Rat(-1));
    for (long d = 1; d <= X.top_dim(); ++d)
        for (auto& g : X.generators(d))
            if (all_at(X, g, b)) m.f0[g] = chain_of(X, g);

    // fill-ins for the remaining generators: f0(g) is an unknown chain over
    // the same-dimension generators at b, solved jointly against the
    // morphism equations (which are affine in these unknowns whenever no
    // simplex has two complementary fill-in faces)
    std::vector<std::pair<std::string, std::string>> unknowns;  // (gen, basis cell)
    std::vector<std::string> open;                              // gens with unsolved f0
    for (long d = 1; d <= X.top_dim(); ++d) {
        std::vector<std::string> zbasis;
        for (auto& z : X.generators(d))
            if (all_at(X, z, b)) zbasis.push_back(z);
        for (auto& g : X.generators(d))
            if (!all_at(X, g, b)) {
                open.push_back(g);
                for (auto& z : zbasis) unknowns.push_back({g, z});
            }
    }

    auto residuals_at = [&](const CatCoalgMor& cand) {
        std::map<std::string, Rat> out;
        for (auto& g : open)
            for (auto& [k, v] : flatten_residual(g, mor_residual(cc, cc, cand, g))) out[k] = v;
        return out;
    };

    std::map<std::string, Rat> r0 = residuals_at(m);
    std::vector<std::map<std::string, Rat>> cols(unknowns.size());
    for (size_t i = 0; i < unknowns.size(); ++i) {
        CatCoalgMor probe = m;
        probe.f0[unknowns[i].first] = chain_of(X, unknowns[i].second);
        cols[i] = residuals_at(probe);
        for (auto& [k, v] : r0) {
            auto it = cols[i].find(k);
            if (it == cols[i].end())
                cols[i][k] = -v;
            else {
                it->second -= v;
                if (it->second == 0) cols[i].erase(it);
            }
        }
    }

    std::map<std::string, long> rowindex;
    auto rowof = [&](const std::string& k) {
        return rowindex.try_emplace(k, (long)rowindex.size()).first->second;
    };
    for (auto& [k, v] : r0) rowof(k);
    for (auto& c : cols)
        for (auto& [k, v] : c) rowof(k);

    RatMat A((long)rowindex.size(), (long)unknowns.size());
    std::vector<Rat> rhs(rowindex.size(), Rat(0));
    for (auto& [k, v] : r0) rhs[rowof(k)] = -v;
    for (size_t i = 0; i < unknowns.size(); ++i)
        for (auto& [k, v] : cols[i]) A.set(rowof(k), (long)i, v);

    std::vector<Rat> sol;
    if (!solve_rat(A, rhs, sol))
        throw std::runtime_error("model not fillable: no chain at '" + b +
                                 "' satisfies the morphism equations for " + X.name());
    for (size_t i = 0; i < unknowns.size(); ++i) {
        if (sol[i] == 0) continue;
        auto& [g, z] = unknowns[i];
        auto it = m.f0.find(g);
        if (it == m.f0.end()) {
            SimplicialChain ch;
            ch.space = &X;
            ch.degree = X.gen_dim(g);
            m.f0[g] = ch;
        }
        m.f0[g].add(z, sol[i]);
    }
    for (auto it = m.f0.begin(); it != m.f0.end();)
        it = it->second.is_zero() ? m.f0.erase(it) : std::next(it);
    // the probe columns only capture the affine part; re-verify in full
    if (!verify_mor(cc, cc, m).empty())
        throw std::runtime_error("model not fillable: fill-in interactions for " + X.name() +
                                 " are nonlinear beyond this solver");

    D.retract = m;
    D.c0 = std::make_shared<SSet>(restrict_c0_space(X, b));
    D.f.src = &X;
    D.f.dst = D.c0.get();
    for (auto& [g, ch] : m.f0) {
        SimplicialChain r;
        r.space = D.c0.get();
        r.degree = ch.degree;
        for (auto& [l, c] : ch.terms) r.add(l, c);
        D.f.f0[g] = r;
    }
    for (auto& [g, ch] : m.f1) {
        SimplicialChain r;
        r.space = D.c0.get();
        r.degree = 0;
        for (auto& [l, c] : ch.terms) r.add(l, c);
        D.f.f1[g] = r;
    }

    // homotopy letters, solved from the cobar-level identity over all
    // basepoint words within the fit watermark
    std::vector<std::pair<std::string, BoxWord>> coords;
    for (long d = 1; d <= X.top_dim(); ++d)
        for (auto& g : X.generators(d))
            for (auto& u : enum_box_words(X, b, X.last_vertex(X.simp(g)), d, eta_letters))
                coords.push_back({g, u});

    std::vector<BoxWord> eqs;
    for (long deg = 0; deg <= fit_maxdeg; ++deg)
        for (auto& w : enum_box_words(X, b, b, deg, fit_letters)) eqs.push_back(w);

    std::map<std::pair<long, BoxWord>, long> hrows;
    auto hrowof = [&](long e, const BoxWord& t) {
        return hrows.try_emplace({e, t}, (long)hrows.size()).first->second;
    };

    std::map<std::string, BoxChain> zero_eta;
    std::vector<std::map<long, Rat>> hcols(coords.size());
    std::map<long, Rat> hrhs;
    std::vector<BoxChain> dws(eqs.size());
    for (size_t e = 0; e < eqs.size(); ++e) {
        dws[e] = d_box(single_word(X, eqs[e]));
        BoxChain r = homotopy_residual(D, zero_eta, eqs[e]);
        for (auto& [t, c] : r.terms) hrhs[hrowof((long)e, t)] = -c;
    }
    for (size_t i = 0; i < coords.size(); ++i) {
        std::map<std::string, BoxChain> ec;
        ec[coords[i].first] = single_word(X, coords[i].second);
        for (size_t e = 0; e < eqs.size(); ++e) {
            bool touches = false;
            auto mentions = [&](const BoxWord& w) {
                for (auto& l : w.letters)
                    if (l == coords[i].first) return true;
                return false;
            };
            if (mentions(eqs[e]))
                touches = true;
            else
                for (auto& [w2, c2] : dws[e].terms)
                    if (mentions(w2)) {
                        touches = true;
                        break;
                    }
            if (!touches) continue;
            BoxChain col = d_box(h_hat_with(D, ec, single_word(X, eqs[e])));
            for (auto& [w2, c2] : h_hat_with(D, ec, dws[e]).terms) col.add(w2, c2);
            for (auto& [t, c] : col.terms) hcols[i][hrowof((long)e, t)] += c;
        }
        for (auto it = hcols[i].begin(); it != hcols[i].end();)
            it = it->second == 0 ? hcols[i].erase(it) : std::next(it);
    }

    RatMat HA((long)hrows.size(), (long)coords.size());
    std::vector<Rat> hb(hrows.size(), Rat(0));
    for (auto& [r, v] : hrhs) hb[r] = v;
    for (size_t i = 0; i < coords.size(); ++i)
        for (auto& [r, v] : hcols[i]) HA.set(r, (long)i, v);
    std::vector<Rat> hsol;
    if (!solve_rat(HA, hb, hsol))
        throw std::runtime_error("model not fillable: no homotopy for " + X.name() +
                                 " within the (deg " + std::to_string(fit_maxdeg) + ", letters " +
                                 std::to_string(eta_letters) + ") watermark");
    for (size_t i = 0; i < coords.size(); ++i) {
        if (hsol[i] == 0) continue;
        auto& [g, u] = coords[i];
        auto it = D.eta.find(g);
        if (it == D.eta.end()) {
            BoxChain ch;
            ch.X = &X;
            D.eta[g] = ch;
        }
        D.eta[g].add(u, hsol[i]);
    }
    return D;
}

} // namespace cobarlab
