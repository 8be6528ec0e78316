#include "cobarlab/coalg.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace cobarlab {

Rat e_cochain(const SimplicialChain& c) {
    if (c.degree != 1) return 0;
    Rat s = 0;
    for (auto& [label, coef] : c.terms) s += coef;
    return s;
}

SimplicialChain tilde_boundary(const CatCoalg& cc, const SimplicialChain& c) {
    const SSet& X = *cc.X;
    SimplicialChain out = boundary(c);
    if (c.degree < 1) return out;
    Rat sgn(cc.twist_sign);
    for (auto& [label, coef] : c.terms) {
        Simp s = X.simp(label);
        long n = c.degree;
        // (id⊗e)(x'⊗x'') needs |x''| = 1: pair (front_{n-1}, back_1)
        {
            Simp f = X.front_face(s, n - 1), b = X.back_face(s, 1);
            if (!f.is_degenerate() && !b.is_degenerate())
                out.add(f.gen, (n % 2 == 1 ? coef : Rat(-coef)) * sgn);  // (-1)^{n-1}
        }
        // -(e⊗id): pair (front_1, back_{n-1})
        {
            Simp f = X.front_face(s, 1), b = X.back_face(s, n - 1);
            if (!f.is_degenerate() && !b.is_degenerate())
                out.add(b.gen, Rat(-coef) * sgn);
        }
    }
    return out;
}

Rat curvature(const CatCoalg& cc, const SimplicialChain& c) {
    if (c.degree != 2) return 0;
    const SSet& X = *cc.X;
    Rat total = 0;
    for (auto& [label, coef] : c.terms) {
        Simp s = X.simp(label);
        Rat v = 0;
        // (e⊗e)Delta: only the (front_1, back_1) pair, Koszul sign (-1)^1
        Simp f = X.front_face(s, 1), b = X.back_face(s, 1);
        if (!f.is_degenerate() && !b.is_degenerate()) v -= 1;
        // e∘∂
        for (int i = 0; i <= 2; ++i)
            if (!X.face(s, i).is_degenerate()) v += (i % 2 == 0) ? 1 : -1;
        total += coef * v;
    }
    return total;
}

namespace {

// normalized Delta on a single generator: nondegenerate AW pairs
std::vector<std::pair<Simp, Simp>> nondeg_pairs(const SSet& X, const std::string& g) {
    std::vector<std::pair<Simp, Simp>> out;
    for (auto& pr : X.aw_pairs(X.simp(g)))
        if (!pr.first.is_degenerate() && !pr.second.is_degenerate()) out.push_back(pr);
    return out;
}

void tensor_accum(TensorChain& t, const SimplicialChain& a, const std::string& bfixed, bool bfirst, const Rat& sgn) {
    for (auto& [l, c] : a.terms) {
        if (bfirst)
            t.add(bfixed, l, sgn * c);
        else
            t.add(l, bfixed, sgn * c);
    }
}

} // namespace

CatAxiomReport verify_cat_axioms(const CatCoalg& cc) {
    const SSet& X = *cc.X;
    CatAxiomReport rep;
    for (const char* a : {"i", "ii", "iii", "iv", "v"}) rep.axiom_pass[a] = true;
    auto fail = [&](const std::string& axiom, const std::string& g, const std::string& what) {
        rep.pass = false;
        rep.axiom_pass[axiom] = false;
        rep.failures.push_back("axiom (" + axiom + ") fails on '" + g + "': " + what);
    };

    for (long d = 0; d <= X.top_dim(); ++d)
        for (auto& g : X.generators(d)) {
            SimplicialChain xg = chain_of(X, g);
            SimplicialChain dx = tilde_boundary(cc, xg);

            // (i) coderivation: Delta ∂̃ = (∂̃⊗id + id⊗∂̃) Delta
            {
                TensorChain lhs = aw_coproduct(dx);
                TensorChain rhs;
                rhs.space = &X;
                for (auto& [f, b] : nondeg_pairs(X, g)) {
                    SimplicialChain cf = chain_of(X, f.gen);
                    SimplicialChain cb = chain_of(X, b.gen);
                    tensor_accum(rhs, tilde_boundary(cc, cf), b.gen, false, Rat(1));
                    Rat sgn = (X.dim(f) % 2 == 0) ? Rat(1) : Rat(-1);
                    tensor_accum(rhs, tilde_boundary(cc, cb), f.gen, true, sgn);
                }
                if (!(lhs == rhs)) fail("i", g, "Delta∂̃ != (∂̃⊗id + id⊗∂̃)Delta");
            }

            // (ii) h∘∂̃ = 0 (content in degree 3)
            if (curvature(cc, dx) != 0) fail("ii", g, "h(∂̃x) != 0");

            // (iii) ∂̃² = (h⊗id - id⊗h) Delta
            {
                SimplicialChain lhs = tilde_boundary(cc, dx);
                SimplicialChain rhs;
                rhs.space = &X;
                rhs.degree = d - 2;
                for (auto& [f, b] : nondeg_pairs(X, g)) {
                    Rat hf = curvature(cc, chain_of(X, f.gen));
                    Rat hb = curvature(cc, chain_of(X, b.gen));
                    if (hf != 0) rhs.add(b.gen, hf);
                    if (hb != 0) rhs.add(f.gen, -hb);
                }
                if (d < 2) {
                    if (!rhs.is_zero()) fail("iii", g, "curvature term in degree < 2");
                } else if (!(lhs == rhs))
                    fail("iii", g, "∂̃² != (h⊗id - id⊗h)Delta");
            }

            // (iv) vertices are group-like cycles spanning C0
            if (d == 0) {
                TensorChain t = aw_coproduct(xg);
                bool ok = t.terms.size() == 1 && t.terms.count({g, g}) == 1 && t.terms.at({g, g}) == 1;
                if (!ok) fail("iv", g, "vertex not group-like");
                if (!dx.is_zero()) fail("iv", g, "vertex not a ∂̃-cycle");
            }

            // (v) ε∘∂̃ = 0: the C0 component of ∂̃ vanishes
            if (d == 1 && !dx.is_zero()) fail("v", g, "∂̃ of an edge has a C0 component");
        }
    if (X.vertex_set().empty()) {
        rep.pass = false;
        rep.axiom_pass["iv"] = false;
        rep.failures.push_back("axiom (iv) fails: empty object set");
    }
    return rep;
}

namespace {

Simp edge_subsimplex(const SSet& X, const Simp& s, long i, long j) {
    Simp x = X.front_face(s, j);
    for (long k = j - 1; k > i; --k) x = X.face(x, (int)k);
    for (long t = 0; t < i; ++t) x = X.face(x, 0);
    return x;
}

SSet restrict_space(const SSet& X, const std::string& b, bool edges_only) {
    if (X.gen_dim(b) != 0) throw std::runtime_error(X.name() + ": '" + b + "' is not a vertex");
    auto keep = [&](const std::string& g) {
        Simp s = X.simp(g);
        long n = X.gen_dim(g);
        for (long j = 0; j <= n; ++j)
            if (X.vertex(s, j) != b) return false;
        if (edges_only)
            for (long i = 0; i < n; ++i)
                for (long j = i + 1; j <= n; ++j)
                    if (!edge_subsimplex(X, s, i, j).is_degenerate()) return false;
        return true;
    };
    std::vector<std::vector<std::string>> gens(X.top_dim() + 1);
    std::map<std::string, std::vector<Simp>> faces;
    for (long d = 0; d <= X.top_dim(); ++d)
        for (auto& g : X.generators(d))
            if (keep(g)) {
                gens[d].push_back(g);
                if (d >= 1) {
                    std::vector<Simp> fs;
                    for (int i = 0; i <= d; ++i) fs.push_back(X.face(X.simp(g), i));
                    faces[g] = std::move(fs);
                }
            }
    while (gens.size() > 1 && gens.back().empty()) gens.pop_back();
    std::string nm = X.name() + (edges_only ? "|c1@" : "|c0@") + b;
    return SSet(nm, std::move(gens), std::move(faces));
}

} // namespace

SSet restrict_c0_space(const SSet& X, const std::string& b) { return restrict_space(X, b, false); }
SSet restrict_c1_space(const SSet& X, const std::string& b) { return restrict_space(X, b, true); }

SimplicialChain apply_f0(const CatCoalgMor& m, const SimplicialChain& c) {
    SimplicialChain out;
    out.space = m.dst;
    out.degree = c.degree;
    for (auto& [label, coef] : c.terms) {
        auto it = m.f0.find(label);
        if (it == m.f0.end()) continue;
        for (auto& [l2, c2] : it->second.terms) out.add(l2, coef * c2);
    }
    return out;
}

SimplicialChain apply_f1(const CatCoalgMor& m, const SimplicialChain& c) {
    SimplicialChain out;
    out.space = m.dst;
    out.degree = 0;
    if (c.degree != 1) return out;
    for (auto& [label, coef] : c.terms) {
        auto it = m.f1.find(label);
        if (it == m.f1.end()) continue;
        for (auto& [l2, c2] : it->second.terms) out.add(l2, coef * c2);
    }
    return out;
}

Rat f1_bar(const CatCoalgMor& m, const SimplicialChain& c) {
    Rat s = 0;
    for (auto& [label, coef] : apply_f1(m, c).terms) s += coef;
    return s;
}

CatCoalgMor identity_mor(const SSet& X) {
    CatCoalgMor m;
    m.src = m.dst = &X;
    for (long d = 0; d <= X.top_dim(); ++d)
        for (auto& g : X.generators(d)) m.f0[g] = chain_of(X, g);
    return m;
}

CatCoalgMor inclusion_mor(const SSet& sub, const SSet& amb) {
    CatCoalgMor m;
    m.src = &sub;
    m.dst = &amb;
    for (long d = 0; d <= sub.top_dim(); ++d)
        for (auto& g : sub.generators(d)) m.f0[g] = chain_of(amb, g);
    return m;
}

CatCoalgMor compose_mor(const CatCoalgMor& g, const CatCoalgMor& f) {
    if (f.dst != g.src) throw std::invalid_argument("compose_mor: middle spaces differ");
    CatCoalgMor m;
    m.src = f.src;
    m.dst = g.dst;
    for (auto& [label, ch] : f.f0) m.f0[label] = apply_f0(g, ch);
    // g1∘f0 + g0∘f1 on degree-1 generators
    const SSet& S = *f.src;
    for (auto& gl : S.generators(1)) {
        SimplicialChain part;
        part.space = g.dst;
        part.degree = 0;
        auto it0 = f.f0.find(gl);
        if (it0 != f.f0.end())
            for (auto& [l, c] : apply_f1(g, it0->second).terms) part.add(l, c);
        auto it1 = f.f1.find(gl);
        if (it1 != f.f1.end())
            for (auto& [l, c] : apply_f0(g, it1->second).terms) part.add(l, c);
        if (!part.is_zero()) m.f1[gl] = part;
    }
    return m;
}

MorResidual mor_residual(const CatCoalg& src, const CatCoalg& dst, const CatCoalgMor& m,
                         const std::string& g) {
    const SSet& S = *src.X;
    const SSet& T = *dst.X;
    long d = S.gen_dim(g);
    SimplicialChain xg = chain_of(S, g);
    SimplicialChain fx = apply_f0(m, xg);

    MorResidual r;
    if (d == 0) {
        Rat s = 0;
        for (auto& [l, c] : fx.terms) s += c;
        r.counit = s - 1;
    }

    // coalgebra map: Delta' f0 - (f0⊗f0) Delta
    r.comap = aw_coproduct(fx);
    r.comap.space = &T;
    for (auto& [f, b] : S.aw_pairs(S.simp(g))) {
        if (f.is_degenerate() || b.is_degenerate()) continue;
        SimplicialChain ff = apply_f0(m, chain_of(S, f.gen));
        SimplicialChain fb = apply_f0(m, chain_of(S, b.gen));
        for (auto& [lf, cf] : ff.terms)
            for (auto& [lb, cb] : fb.terms) r.comap.add(lf, lb, -cf * cb);
    }

    // f0∘∂̃ - ∂̃'∘f0 - (f1bar⊗f0)(Delta - Delta^op)
    r.twisted = apply_f0(m, tilde_boundary(src, xg));
    {
        SimplicialChain rhs = tilde_boundary(dst, fx);
        for (auto& [f, b] : S.aw_pairs(S.simp(g))) {
            if (f.is_degenerate() || b.is_degenerate()) continue;
            long pf = S.dim(f), pb = S.dim(b);
            if (pf == 1) {
                Rat w = f1_bar(m, chain_of(S, f.gen));
                if (w != 0)
                    for (auto& [l, c] : apply_f0(m, chain_of(S, b.gen)).terms) rhs.add(l, w * c);
            }
            if (pb == 1) {
                // -Delta^op term: tau sign (-1)^{|f||b|}
                Rat w = f1_bar(m, chain_of(S, b.gen));
                if (w != 0) {
                    Rat sgn = ((pf * pb) % 2 == 0) ? Rat(-1) : Rat(1);
                    for (auto& [l, c] : apply_f0(m, chain_of(S, f.gen)).terms) rhs.add(l, sgn * w * c);
                }
            }
        }
        for (auto& [l, c] : rhs.terms) r.twisted.add(l, -c);
    }

    // h'∘f0 - h - f1bar∘∂̃ - (f1bar⊗f1bar)Delta
    r.curv = curvature(dst, fx) - curvature(src, xg) - f1_bar(m, tilde_boundary(src, xg));
    if (d == 2) {
        Simp s = S.simp(g);
        Simp f = S.front_face(s, 1), b = S.back_face(s, 1);
        if (!f.is_degenerate() && !b.is_degenerate())
            r.curv += f1_bar(m, chain_of(S, f.gen)) * f1_bar(m, chain_of(S, b.gen));
    }
    return r;
}

std::vector<std::string> verify_mor(const CatCoalg& src, const CatCoalg& dst, const CatCoalgMor& m) {
    std::vector<std::string> bad;
    const SSet& S = *src.X;
    for (long d = 0; d <= S.top_dim(); ++d)
        for (auto& g : S.generators(d)) {
            MorResidual r = mor_residual(src, dst, m, g);
            if (r.counit != 0) bad.push_back("counit not preserved on '" + g + "'");
            if (!r.comap.is_zero()) bad.push_back("f0 not a coalgebra map on '" + g + "'");
            if (!r.twisted.is_zero()) bad.push_back("twisted-differential equation fails on '" + g + "'");
            if (r.curv != 0) bad.push_back("curvature equation fails on '" + g + "'");
        }
    return bad;
}

std::vector<EdgeStep> PathSystem::path(const std::string& a, const std::string& b) const {
    const auto& pa = to_root.at(a);
    const auto& pb = to_root.at(b);
    size_t ka = pa.size(), kb = pb.size();
    while (ka > 0 && kb > 0 && pa[ka - 1] == pb[kb - 1]) {
        --ka;
        --kb;
    }
    std::vector<EdgeStep> out(pa.begin(), pa.begin() + ka);
    for (size_t i = kb; i-- > 0;) out.push_back(EdgeStep{pb[i].edge, !pb[i].reversed});
    return out;
}

PathSystem path_system(const SSet& X, const std::string& root) {
    if (X.gen_dim(root) != 0) throw std::runtime_error("path_system: root is not a vertex");
    // adjacency, lexicographic by (neighbor, edge, direction)
    std::map<std::string, std::vector<std::pair<std::string, EdgeStep>>> adj;
    for (auto& e : X.generators(1)) {
        std::string a = X.first_vertex(X.simp(e));
        std::string b = X.last_vertex(X.simp(e));
        adj[a].push_back({b, EdgeStep{e, false}});
        adj[b].push_back({a, EdgeStep{e, true}});
    }
    for (auto& [v, lst] : adj)
        std::sort(lst.begin(), lst.end(), [](auto& x, auto& y) {
            return std::tie(x.first, x.second.edge, x.second.reversed) <
                   std::tie(y.first, y.second.edge, y.second.reversed);
        });

    PathSystem ps;
    ps.X = &X;
    ps.root = root;
    ps.to_root[root] = {};
    std::deque<std::string> q{root};
    while (!q.empty()) {
        std::string v = q.front();
        q.pop_front();
        for (auto& [w, step] : adj[v])
            if (!ps.to_root.count(w)) {
                // step goes v->w; the w->root path starts by reversing it
                std::vector<EdgeStep> p{EdgeStep{step.edge, !step.reversed}};
                p.insert(p.end(), ps.to_root[v].begin(), ps.to_root[v].end());
                ps.to_root[w] = std::move(p);
                q.push_back(w);
            }
    }
    std::vector<std::string> missing;
    for (auto& v : X.vertex_set())
        if (!ps.to_root.count(v)) missing.push_back(v);
    if (!missing.empty()) {
        std::ostringstream os;
        os << X.name() << ": not path-connected; unreachable from '" << root << "':";
        for (auto& v : missing) os << " " << v;
        throw std::runtime_error(os.str());
    }
    return ps;
}

} // namespace cobarlab
