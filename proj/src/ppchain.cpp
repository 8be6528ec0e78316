#include "cobarlab/ppchain.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cobarlab {

namespace {

// simultaneous substitution x_j := imgs[j] for j < imgs.size(), via a
// temporary index range so images may mention the original variables
Poly subst_vars(const Poly& p, const std::vector<Poly>& imgs) {
    constexpr int kTmp = 50;
    if ((int)imgs.size() > kTmp) throw std::logic_error("subst_vars: too many variables");
    Poly q = p.rename([&](int i) { return i < (int)imgs.size() ? i + kTmp : i; });
    for (size_t j = 0; j < imgs.size(); ++j) q = q.subst(kTmp + (int)j, imgs[j]);
    return q;
}

Poly apply_subst(const Poly& p, int var, const Poly& q) { return p.subst(var, q); }

std::string poly_ser(const Poly& p) { return p.str(); }

} // namespace

std::vector<Poly> domain_constraints(const PPMap& f) {
    std::vector<Poly> cons;
    Poly one = Poly::constant(Rat(1));
    if (f.domain == DomainKind::Cube) {
        for (long i = 0; i < f.m; ++i) {
            cons.push_back(Poly::var((int)i));
            cons.push_back(one - Poly::var((int)i));
        }
    } else {
        if (f.m > 0) {
            cons.push_back(Poly::var(0));
            for (long i = 1; i < f.m; ++i)
                cons.push_back(Poly::var((int)i) - Poly::var((int)(i - 1)));
            cons.push_back(one - Poly::var((int)(f.m - 1)));
        }
    }
    return cons;
}

namespace {

// canonical positive rescaling of a constraint
Poly scale_con(const Poly& p) {
    if (p.t.empty()) return p;
    Rat lead = p.t.begin()->second;
    if (lead < 0) lead = -lead;
    return p * (Rat(1) / lead);
}

std::vector<int> used_params(const std::vector<Poly>& ps) {
    std::set<int> s;
    for (auto& p : ps)
        for (int v : p.vars())
            if (v >= kParamBase) s.insert(v);
    return {s.begin(), s.end()};
}

bool all_affine(const std::vector<Poly>& ps) {
    for (auto& p : ps)
        if (!p.is_affine()) return false;
    return true;
}

} // namespace

PPMap pp_normalize(const PPMap& f) {
    PPMap r = f;
    std::vector<std::string> dom_ser;
    for (auto& d : domain_constraints(r)) dom_ser.push_back(poly_ser(scale_con(d)));
    std::vector<PPPiece> keep;
    for (auto piece : r.pieces) {
        if (r.target == TargetKind::Realization) {
            if (!r.model) throw std::logic_error("realization target without a model");
            // collapse degenerate carriers, then strip identically-zero
            // barycentric components onto the corresponding face
            bool changed = true;
            while (changed) {
                changed = false;
                if ((long)piece.comp.size() != r.model->dim(piece.carrier) + 1)
                    throw std::logic_error("barycentric component count mismatch");
                if (piece.carrier.is_degenerate()) {
                    int j = piece.carrier.degen.front();
                    piece.carrier.degen.erase(piece.carrier.degen.begin());
                    piece.comp[j] += piece.comp[j + 1];
                    piece.comp.erase(piece.comp.begin() + j + 1);
                    changed = true;
                    continue;
                }
                if (r.model->dim(piece.carrier) > 0) {
                    for (size_t j = 0; j < piece.comp.size(); ++j) {
                        if (piece.comp[j].is_zero()) {
                            piece.carrier = r.model->face(piece.carrier, (int)j);
                            piece.comp.erase(piece.comp.begin() + j);
                            changed = true;
                            break;
                        }
                    }
                }
            }
            Poly sum;
            for (auto& c : piece.comp) sum += c;
            if (sum != Poly::constant(Rat(1)))
                throw std::logic_error("barycentric components must sum to 1");
        } else {
            if ((long)piece.comp.size() != r.target_n)
                throw std::logic_error("component count mismatch");
        }
        // constraint cleanup
        std::vector<Poly> ge;
        bool infeasible = false;
        for (auto& g : piece.ge) {
            if (g.is_constant()) {
                if (g.constant_value() < 0) infeasible = true;
                continue;
            }
            Poly s = scale_con(g);
            if (std::count(dom_ser.begin(), dom_ser.end(), poly_ser(s))) continue;
            ge.push_back(s);
        }
        if (infeasible) continue;
        std::sort(ge.begin(), ge.end(),
                  [](const Poly& a, const Poly& b) { return poly_ser(a) < poly_ser(b); });
        ge.erase(std::unique(ge.begin(), ge.end()), ge.end());
        piece.ge = ge;
        // exact emptiness test when the cell is affine
        std::vector<Poly> cons = domain_constraints(r);
        cons.insert(cons.end(), piece.ge.begin(), piece.ge.end());
        if (all_affine(cons)) {
            if (r.free_vars == 0) {
                // relatively lower-dimensional pieces carry no information for
                // a continuous map on a full domain: drop them for canonicity
                std::vector<Poly> strict = cons;
                for (int v : used_params(cons)) strict.push_back(Poly::var(v));
                if (!full_dimensional(strict).feasible) continue;
            } else {
                AffineSystem sys;
                for (auto& c : cons) sys.add(c);
                for (int v : used_params(cons)) sys.add(Poly::var(v));
                if (!affine_feasible(sys).feasible) continue;
            }
        }
        keep.push_back(std::move(piece));
    }
    auto ser = [](const PPPiece& p) {
        std::ostringstream os;
        for (auto& g : p.ge) os << poly_ser(g) << ";";
        os << "|" << to_string(p.carrier) << "|";
        for (auto& c : p.comp) os << poly_ser(c) << ";";
        return os.str();
    };
    std::sort(keep.begin(), keep.end(),
              [&](const PPPiece& a, const PPPiece& b) { return ser(a) < ser(b); });
    keep.erase(std::unique(keep.begin(), keep.end(),
                           [&](const PPPiece& a, const PPPiece& b) { return ser(a) == ser(b); }),
               keep.end());
    r.pieces = keep;
    return r;
}

std::string pp_key(const PPMap& f0) {
    PPMap f = pp_normalize(f0);
    std::ostringstream os;
    os << f.m << "|" << f.free_vars << "|" << (f.domain == DomainKind::Cube ? "c" : "s") << "|"
       << (int)f.target << "|" << (f.model ? f.model->name() : "") << "|" << f.target_n << "|"
       << poly_ser(f.target_len) << "||";
    for (auto& p : f.pieces) {
        os << "{";
        for (auto& g : p.ge) os << poly_ser(g) << ";";
        os << "|" << to_string(p.carrier) << "|";
        for (auto& c : p.comp) os << poly_ser(c) << ";";
        os << "}";
    }
    return os.str();
}

std::string pp_dump(const PPMap& f0) {
    PPMap f = pp_normalize(f0);
    std::ostringstream os;
    os << "ppmap dim=" << f.m;
    if (f.free_vars) os << "+" << f.free_vars;
    os << " domain=" << (f.domain == DomainKind::Cube ? "cube" : "simplex");
    switch (f.target) {
        case TargetKind::Coords: os << " target=coords^" << f.target_n; break;
        case TargetKind::Realization: os << " target=|" << (f.model ? f.model->name() : "?") << "|"; break;
        case TargetKind::ScaledSimplex:
            os << " target=simplex^" << f.target_n << " scale=" << poly_ser(f.target_len);
            break;
    }
    os << "\n";
    for (auto& p : f.pieces) {
        os << "  piece";
        if (f.target == TargetKind::Realization) os << " carrier=" << to_string(p.carrier);
        os << "\n    cell:";
        if (p.ge.empty()) os << " (whole domain)";
        for (auto& g : p.ge) os << " " << poly_ser(g) << " >= 0;";
        os << "\n    comp: [";
        for (size_t i = 0; i < p.comp.size(); ++i) os << (i ? ", " : "") << poly_ser(p.comp[i]);
        os << "]\n";
    }
    return os.str();
}

// ---- realization points ----

std::pair<std::string, std::vector<Rat>> real_point(const SSet& X, const Simp& carrier0,
                                                    std::vector<Rat> bary) {
    Simp carrier = carrier0;
    while (true) {
        if ((long)bary.size() != X.dim(carrier) + 1)
            throw std::logic_error("real_point: coordinate count mismatch");
        if (carrier.is_degenerate()) {
            int j = carrier.degen.front();
            carrier.degen.erase(carrier.degen.begin());
            bary[j] += bary[j + 1];
            bary.erase(bary.begin() + j + 1);
            continue;
        }
        if (X.dim(carrier) > 0) {
            bool dropped = false;
            for (size_t i = 0; i < bary.size(); ++i) {
                if (bary[i] == 0) {
                    carrier = X.face(carrier, (int)i);
                    bary.erase(bary.begin() + i);
                    dropped = true;
                    break;
                }
            }
            if (dropped) continue;
        }
        break;
    }
    return {to_string(carrier), bary};
}

std::pair<std::string, std::vector<Rat>> pp_eval_real(const PPMap& f0, const std::vector<Rat>& x,
                                                      const std::vector<Rat>& params) {
    PPMap f = pp_normalize(f0);
    if (f.target != TargetKind::Realization) throw std::invalid_argument("not realization-valued");
    auto dom = domain_constraints(f);
    for (auto& p : f.pieces) {
        bool inside = true;
        for (auto& g : dom)
            if (g.eval(x, params) < 0) inside = false;
        for (auto& g : p.ge)
            if (inside && g.eval(x, params) < 0) inside = false;
        if (!inside) continue;
        std::vector<Rat> b;
        for (auto& c : p.comp) b.push_back(c.eval(x, params));
        return real_point(*f.model, p.carrier, b);
    }
    throw std::runtime_error("pp_eval_real: point not covered by any piece");
}

// ---- equality oracle ----

namespace {

// search for a common parent simplex into which both carriers embed as
// iterated faces; returns barycentric liftings on success
struct Lift {
    std::vector<Poly> f, g;
};

std::optional<std::vector<Poly>> lift_into(const SSet& X, const Simp& carrier,
                                           const std::string& parent,
                                           const std::vector<Poly>& comp) {
    long pd = X.gen_dim(parent);
    long cd = X.dim(carrier);
    // subsets of {0..pd} of size cd+1, lexicographic
    std::vector<int> idx(cd + 1);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        Simp cur = X.simp(parent);
        for (int j = (int)pd; j >= 0; --j) {
            if (std::find(idx.begin(), idx.end(), j) == idx.end()) cur = X.face(cur, j);
        }
        if (cur == carrier) {
            std::vector<Poly> lifted(pd + 1);
            for (size_t k = 0; k < idx.size(); ++k) lifted[idx[k]] = comp[k];
            return lifted;
        }
        // next subset
        int i = (int)idx.size() - 1;
        while (i >= 0 && idx[i] == (int)(pd - (idx.size() - 1 - i))) --i;
        if (i < 0) break;
        ++idx[i];
        for (size_t k = i + 1; k < idx.size(); ++k) idx[k] = idx[k - 1] + 1;
    }
    return std::nullopt;
}

std::optional<Lift> common_parent(const SSet& X, const Simp& cf, const std::vector<Poly>& compf,
                                  const Simp& cg, const std::vector<Poly>& compg) {
    long lo = std::max(X.dim(cf), X.dim(cg));
    for (long d = lo; d <= X.top_dim(); ++d) {
        for (auto& gen : X.generators(d)) {
            auto lf = lift_into(X, cf, gen, compf);
            if (!lf) continue;
            auto lg = lift_into(X, cg, gen, compg);
            if (!lg) continue;
            return Lift{*lf, *lg};
        }
    }
    return std::nullopt;
}

std::vector<Rat> witness_coords(const std::map<int, Rat>& w, long nvars) {
    std::vector<Rat> x((size_t)nvars, Rat(0));
    for (auto& [v, val] : w)
        if (v < nvars) x[v] = val;
    return x;
}

std::vector<Rat> witness_params(const std::map<int, Rat>& w) {
    std::vector<Rat> p;
    for (auto& [v, val] : w) {
        if (v >= kParamBase) {
            if ((int)p.size() <= v - kParamBase) p.resize(v - kParamBase + 1, Rat(0));
            p[v - kParamBase] = val;
        }
    }
    return p;
}

// value comparison of two pieces at a common full-dimensional region
Tri compare_piece_values(const PPMap& f, const PPPiece& pf, const PPPiece& pg,
                         const std::map<int, Rat>& w) {
    long nv = f.m + f.free_vars;
    auto x = witness_coords(w, nv);
    auto par = witness_params(w);
    if (f.target != TargetKind::Realization) {
        if (pf.comp == pg.comp) return Tri::Yes;
        for (size_t i = 0; i < pf.comp.size(); ++i)
            if (pf.comp[i].eval(x, par) != pg.comp[i].eval(x, par)) return Tri::No;
        return Tri::Undecided;
    }
    if (pf.carrier == pg.carrier && pf.comp == pg.comp) return Tri::Yes;
    if (pf.carrier == pg.carrier) {
        // same carrier, different polynomials: decide at the witness
        for (size_t i = 0; i < pf.comp.size(); ++i)
            if (pf.comp[i].eval(x, par) != pg.comp[i].eval(x, par)) return Tri::No;
        return Tri::Undecided;
    }
    if (auto lift = common_parent(*f.model, pf.carrier, pf.comp, pg.carrier, pg.comp)) {
        if (lift->f == lift->g) return Tri::Yes;
    }
    // carriers differ: compare canonical realization points at the witness
    std::vector<Rat> bf, bg;
    for (auto& c : pf.comp) bf.push_back(c.eval(x, par));
    for (auto& c : pg.comp) bg.push_back(c.eval(x, par));
    if (real_point(*f.model, pf.carrier, bf) != real_point(*f.model, pg.carrier, bg))
        return Tri::No;
    return Tri::Undecided;
}

struct Box {
    std::map<int, std::pair<Rat, Rat>> b;
};

// tier-3 resolution of one pair of pieces: find a certified-interior box of
// the joint cell, then compare there; exact, reports undecided honestly
Tri tier3_pair(const PPMap& f, const PPPiece& pf, const PPPiece& pg,
               const std::vector<Poly>& cons, int depth, std::map<int, Rat>& witness_out) {
    if (f.free_vars > 0 || !used_params(cons).empty()) return Tri::Undecided;
    Box init;
    for (long v = 0; v < f.m; ++v) init.b[(int)v] = {Rat(0), Rat(1)};
    std::vector<Box> todo{init};
    for (int level = 0; level <= depth && !todo.empty(); ++level) {
        std::vector<Box> next;
        for (auto& bx : todo) {
            bool outside = false, inside = true;
            for (auto& c : cons) {
                auto [lo, hi] = range_bound(c, bx.b);
                if (hi < 0) outside = true;
                if (!(lo > 0)) inside = false;
            }
            if (outside) continue;
            if (inside) {
                std::map<int, Rat> center;
                for (auto& [v, iv] : bx.b) center[v] = (iv.first + iv.second) / 2;
                Tri t = compare_piece_values(f, pf, pg, center);
                if (t == Tri::No) witness_out = center;
                return t;
            }
            if (level == depth) return Tri::Undecided;
            // bisect the longest side
            int bv = -1;
            Rat blen(0);
            for (auto& [v, iv] : bx.b) {
                Rat len = iv.second - iv.first;
                if (bv < 0 || len > blen) {
                    bv = v;
                    blen = len;
                }
            }
            Rat mid = (bx.b[bv].first + bx.b[bv].second) / 2;
            Box l = bx, r = bx;
            l.b[bv].second = mid;
            r.b[bv].first = mid;
            next.push_back(l);
            next.push_back(r);
        }
        todo = std::move(next);
    }
    // every box was certified outside: the pair region is empty
    return Tri::Yes;
}

} // namespace

EqReport pp_equal(const PPMap& f0, const PPMap& g0, int depth) {
    PPMap f = pp_normalize(f0), g = pp_normalize(g0);
    EqReport rep;
    auto meta_fail = [&](const std::string& why) {
        rep.eq = Tri::No;
        rep.tier = 1;
        rep.note = why;
        return rep;
    };
    if (f.m != g.m || f.free_vars != g.free_vars || f.domain != g.domain || f.target != g.target ||
        f.target_n != g.target_n)
        return meta_fail("shape mismatch");
    if ((f.model ? f.model->name() : "") != (g.model ? g.model->name() : ""))
        return meta_fail("model mismatch");
    if (!(f.target_len == g.target_len)) return meta_fail("target scale mismatch");
    if (pp_key(f) == pp_key(g)) {
        rep.eq = Tri::Yes;
        rep.tier = 1;
        return rep;
    }
    rep.eq = Tri::Yes;
    rep.tier = 2;
    auto dom = domain_constraints(f);
    for (auto& pf : f.pieces) {
        for (auto& pg : g.pieces) {
            std::vector<Poly> cons = dom;
            cons.insert(cons.end(), pf.ge.begin(), pf.ge.end());
            cons.insert(cons.end(), pg.ge.begin(), pg.ge.end());
            Tri t;
            std::map<int, Rat> w;
            if (all_affine(cons)) {
                std::vector<Poly> withcomp = cons;
                withcomp.insert(withcomp.end(), pf.comp.begin(), pf.comp.end());
                withcomp.insert(withcomp.end(), pg.comp.begin(), pg.comp.end());
                std::vector<Poly> strict = cons;
                for (int v : used_params(withcomp)) strict.push_back(Poly::var(v));
                auto fd = full_dimensional(strict);
                if (!fd.feasible) continue;  // no full-dimensional overlap
                w = fd.witness;
                t = compare_piece_values(f, pf, pg, w);
            } else {
                rep.tier = 3;
                t = tier3_pair(f, pf, pg, cons, depth, w);
                if (t == Tri::Undecided && depth == 0) {
                    rep.note = "non-affine cells need a tier-3 depth";
                }
            }
            if (t == Tri::No) {
                rep.eq = Tri::No;
                rep.witness = w;
                return rep;
            }
            if (t == Tri::Undecided) rep.eq = Tri::Undecided;
        }
    }
    return rep;
}

PPMap pp_collapse(const PPMap& f, long dir) {
    PPMap r = f;
    Poly value = (f.domain == DomainKind::Cube || dir == 0) ? Poly::zero()
                                                            : Poly::var((int)(dir - 1));
    auto sub = [&](Poly& p) { p = apply_subst(p, (int)dir, value); };
    for (auto& piece : r.pieces) {
        for (auto& g : piece.ge) sub(g);
        for (auto& c : piece.comp) sub(c);
    }
    return r;
}

Tri pp_degenerate(const PPMap& f0, int depth) {
    PPMap f = pp_normalize(f0);
    if (f.m == 0) return Tri::No;
    bool undecided = false;
    for (long dir = 0; dir < f.m; ++dir) {
        bool uses = false;
        for (auto& p : f.pieces) {
            for (auto& g : p.ge)
                if (g.uses_var((int)dir)) uses = true;
            for (auto& c : p.comp)
                if (c.uses_var((int)dir)) uses = true;
        }
        if (!uses) return Tri::Yes;
        EqReport rep = pp_equal(f, pp_collapse(f, dir), depth);
        if (rep.eq == Tri::Yes) return Tri::Yes;
        if (rep.eq == Tri::Undecided) undecided = true;
    }
    return undecided ? Tri::Undecided : Tri::No;
}

namespace {

PPMap face_common(const PPMap& f, long i, const Poly& value) {
    if (i < 0 || i >= f.m) throw std::out_of_range("face index");
    PPMap r = f;
    r.m = f.m - 1;
    auto ren = [&](int v) { return v > (int)i ? v - 1 : v; };
    for (auto& piece : r.pieces) {
        for (auto& g : piece.ge) g = apply_subst(g, (int)i, value).rename(ren);
        for (auto& c : piece.comp) c = apply_subst(c, (int)i, value).rename(ren);
    }
    return r;
}

} // namespace

PPMap pp_face_cube(const PPMap& f, long i, int eps) {
    if (f.domain != DomainKind::Cube) throw std::invalid_argument("cube face on non-cube domain");
    return face_common(f, i, Poly::constant(Rat(eps)));
}

PPMap pp_face_simplex(const PPMap& f, long i) {
    if (f.domain != DomainKind::Simplex)
        throw std::invalid_argument("simplex face on non-simplex domain");
    if (i < 0 || i > f.m) throw std::out_of_range("face index");
    if (i == 0) return face_common(f, 0, Poly::constant(Rat(0)));
    if (i == f.m) return face_common(f, f.m - 1, Poly::constant(Rat(1)));
    return face_common(f, i, Poly::var((int)(i - 1)));
}

// ---- simple constructors ----

PPMap const_real(const SSet& X, const std::string& vertex, long m, DomainKind kind) {
    if (X.gen_dim(vertex) != 0) throw std::invalid_argument("const_real needs a vertex");
    PPMap f;
    f.m = m;
    f.domain = kind;
    f.target = TargetKind::Realization;
    f.model = &X;
    PPPiece p;
    p.carrier = X.simp(vertex);
    p.comp = {Poly::constant(Rat(1))};
    f.pieces = {p};
    return f;
}

PPMap scalar_map(const Poly& value, long m, DomainKind kind) {
    PPMap f;
    f.m = m;
    f.domain = kind;
    f.target = TargetKind::Coords;
    f.target_n = 1;
    PPPiece p;
    p.comp = {value};
    f.pieces = {p};
    return f;
}

PPMap scalar_add(const PPMap& a, const PPMap& b) {
    if (a.m != b.m || a.domain != b.domain || a.target != TargetKind::Coords ||
        b.target != TargetKind::Coords || a.target_n != 1 || b.target_n != 1)
        throw std::invalid_argument("scalar_add: incompatible scalars");
    PPMap r = a;
    r.pieces.clear();
    for (auto& pa : a.pieces)
        for (auto& pb : b.pieces) {
            PPPiece p;
            p.ge = pa.ge;
            p.ge.insert(p.ge.end(), pb.ge.begin(), pb.ge.end());
            p.comp = {pa.comp[0] + pb.comp[0]};
            r.pieces.push_back(p);
        }
    return pp_normalize(r);
}

// ---- chains ----

void PPChain::add(const PPMap& f, const Rat& c) {
    if (c == 0) return;
    PPMap n = pp_normalize(f);
    if (pp_degenerate(n) == Tri::Yes) return;
    std::string k = pp_key(n);
    auto it = terms.find(k);
    if (it == terms.end())
        terms[k] = {n, c};
    else {
        it->second.second += c;
        if (it->second.second == 0) terms.erase(it);
    }
}

PPChain& PPChain::operator+=(const PPChain& o) {
    for (auto& [k, tc] : o.terms) add(tc.first, tc.second);
    return *this;
}

PPChain PPChain::operator*(const Rat& c) const {
    PPChain r;
    for (auto& [k, tc] : terms) r.add(tc.first, tc.second * c);
    return r;
}

bool PPChain::operator==(const PPChain& o) const {
    if (terms.size() != o.terms.size()) return false;
    for (auto it = terms.begin(), jt = o.terms.begin(); it != terms.end(); ++it, ++jt)
        if (it->first != jt->first || it->second.second != jt->second.second) return false;
    return true;
}

PPChain pp_chain(const PPMap& f, const Rat& c) {
    PPChain r;
    r.add(f, c);
    return r;
}

PPChain pp_boundary(const PPChain& c) {
    PPChain out;
    for (auto& [k, tc] : c.terms) {
        const PPMap& f = tc.first;
        const Rat& co = tc.second;
        if (f.domain == DomainKind::Cube) {
            Rat s(-1);
            for (long i = 0; i < f.m; ++i) {
                out.add(pp_face_cube(f, i, 1), co * s);
                out.add(pp_face_cube(f, i, 0), -co * s);
                s = -s;
            }
        } else {
            Rat s(1);
            for (long i = 0; i <= f.m; ++i) {
                out.add(pp_face_simplex(f, i), co * s);
                s = -s;
            }
        }
    }
    return out;
}

namespace {

std::vector<std::vector<int>> permutations_of(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

int perm_sign(const std::vector<int>& p) {
    int s = 1;
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) s = -s;
    return s;
}

// precompose a cube map with the inclusion iota_tau(t) = (t_{tau(1)},...):
// coordinate j pulls back to order coordinate tau[j]
PPMap precompose_perm(const PPMap& f, const std::vector<int>& tau) {
    PPMap r = f;
    r.domain = DomainKind::Simplex;
    auto ren = [&](int v) { return v < (int)tau.size() ? tau[v] : v; };
    for (auto& piece : r.pieces) {
        for (auto& g : piece.ge) g = g.rename(ren);
        for (auto& c : piece.comp) c = c.rename(ren);
    }
    return r;
}

// pieces of the folding map f_n on one order region; returns (cell, images)
struct FoldPiece {
    std::vector<Poly> cell;
    std::vector<Poly> img;  // t'_k in terms of the cube coordinates
};

std::vector<FoldPiece> fold_pieces(int n) {
    std::vector<FoldPiece> out;
    for (auto& rho : permutations_of(n)) {
        FoldPiece fp;
        for (int i = 0; i + 1 < n; ++i)
            fp.cell.push_back(Poly::var(rho[i + 1]) - Poly::var(rho[i]));
        // position of each variable in the region's increasing order
        std::vector<int> pos(n);
        for (int i = 0; i < n; ++i) pos[rho[i]] = i;
        for (int k = 1; k <= n; ++k) {
            int arg = 0;
            for (int j = 1; j < k; ++j)
                if (pos[j] > pos[arg]) arg = j;
            fp.img.push_back(Poly::var(arg));
        }
        out.push_back(fp);
    }
    return out;
}

PPMap precompose_fold(const PPMap& f) {
    PPMap r = f;
    r.domain = DomainKind::Cube;
    r.pieces.clear();
    auto folds = fold_pieces((int)f.m);
    for (auto& piece : f.pieces) {
        for (auto& fp : folds) {
            PPPiece p;
            p.carrier = piece.carrier;
            p.ge = fp.cell;
            for (auto& g : piece.ge) p.ge.push_back(subst_vars(g, fp.img));
            for (auto& c : piece.comp) p.comp.push_back(subst_vars(c, fp.img));
            r.pieces.push_back(p);
        }
    }
    return r;
}

} // namespace

PPChain eta_cube_to_simplex(const PPChain& c) {
    PPChain out;
    for (auto& [k, tc] : c.terms) {
        if (tc.first.domain != DomainKind::Cube)
            throw std::invalid_argument("eta_cube_to_simplex needs cube domains");
        for (auto& tau : permutations_of((int)tc.first.m))
            out.add(precompose_perm(tc.first, tau), tc.second * Rat(perm_sign(tau)));
    }
    return out;
}

PPChain eta_simplex_to_cube(const PPChain& c) {
    PPChain out;
    for (auto& [k, tc] : c.terms) {
        if (tc.first.domain != DomainKind::Simplex)
            throw std::invalid_argument("eta_simplex_to_cube needs simplex domains");
        out.add(precompose_fold(tc.first), tc.second);
    }
    return out;
}

PPMap pp_cross(const PPMap& a, const PPMap& b) {
    if (a.domain != DomainKind::Cube || b.domain != DomainKind::Cube)
        throw std::invalid_argument("pp_cross needs cube domains");
    if (a.target != TargetKind::Coords || b.target != TargetKind::Coords)
        throw std::invalid_argument("pp_cross needs coordinate targets");
    if (a.free_vars || b.free_vars) throw std::invalid_argument("pp_cross: no free variables");
    PPMap r;
    r.m = a.m + b.m;
    r.target = TargetKind::Coords;
    r.target_n = a.target_n + b.target_n;
    auto shift = [&](int v) { return v + (int)a.m; };
    for (auto& pa : a.pieces)
        for (auto& pb : b.pieces) {
            PPPiece p;
            p.ge = pa.ge;
            for (auto& g : pb.ge) p.ge.push_back(g.rename(shift));
            p.comp = pa.comp;
            for (auto& c : pb.comp) p.comp.push_back(c.rename(shift));
            r.pieces.push_back(p);
        }
    return r;
}

PPChain cross(const PPChain& a, const PPChain& b) {
    PPChain out;
    for (auto& [ka, ta] : a.terms)
        for (auto& [kb, tb] : b.terms)
            out.add(pp_cross(ta.first, tb.first), ta.second * tb.second);
    return out;
}

PPChain shuffle_cross(const PPChain& a, const PPChain& b) {
    PPChain out;
    for (auto& [ka, ta] : a.terms)
        for (auto& [kb, tb] : b.terms) {
            const PPMap& f = ta.first;
            const PPMap& g = tb.first;
            if (f.domain != DomainKind::Simplex || g.domain != DomainKind::Simplex)
                throw std::invalid_argument("shuffle_cross needs simplex domains");
            if (f.target != TargetKind::Coords || g.target != TargetKind::Coords)
                throw std::invalid_argument("shuffle_cross needs coordinate targets");
            int p = (int)f.m, q = (int)g.m, n = p + q;
            // choose the positions of the first factor
            std::vector<int> sel(p);
            std::iota(sel.begin(), sel.end(), 0);
            bool more = p >= 0;
            while (more) {
                std::vector<int> other;
                for (int i = 0; i < n; ++i)
                    if (std::find(sel.begin(), sel.end(), i) == sel.end()) other.push_back(i);
                int inv = 0;
                for (int x : sel)
                    for (int y : other)
                        if (y < x) ++inv;
                PPMap r;
                r.m = n;
                r.domain = DomainKind::Simplex;
                r.target = TargetKind::Coords;
                r.target_n = f.target_n + g.target_n;
                auto renf = [&](int v) { return v < p ? sel[v] : v; };
                auto reng = [&](int v) { return v < q ? other[v] : v; };
                for (auto& pf : f.pieces)
                    for (auto& pg : g.pieces) {
                        PPPiece piece;
                        for (auto& c : pf.ge) piece.ge.push_back(c.rename(renf));
                        for (auto& c : pg.ge) piece.ge.push_back(c.rename(reng));
                        for (auto& c : pf.comp) piece.comp.push_back(c.rename(renf));
                        for (auto& c : pg.comp) piece.comp.push_back(c.rename(reng));
                        r.pieces.push_back(piece);
                    }
                out.add(r, ta.second * tb.second * Rat(inv % 2 == 0 ? 1 : -1));
                // next p-subset of {0..n-1}
                int i = p - 1;
                while (i >= 0 && sel[i] == n - p + i) --i;
                if (i < 0 || p == 0)
                    more = false;
                else {
                    ++sel[i];
                    for (int k2 = i + 1; k2 < p; ++k2) sel[k2] = sel[k2 - 1] + 1;
                }
            }
        }
    return out;
}

// ---- Moore families ----

namespace {

// certify p >= 0 on the named cell (affine exact path, else undecided)
Tri nonneg_on_cell(const std::vector<Poly>& cons, const Poly& p) {
    std::vector<Poly> all = cons;
    all.push_back(p);
    if (!all_affine(all)) return Tri::Undecided;
    AffineSystem sys;
    for (auto& c : cons) sys.add(c);
    for (int v : used_params(all)) sys.add(Poly::var(v));
    sys.add(-p, true);
    return affine_feasible(sys).feasible ? Tri::No : Tri::Yes;
}

PPMap track_at_zero(const MooreFamily& f) {
    PPMap r = f.track;
    r.free_vars = 0;
    for (auto& piece : r.pieces) {
        for (auto& g : piece.ge) g = apply_subst(g, (int)f.m, Poly::constant(Rat(0)));
        for (auto& c : piece.comp) c = apply_subst(c, (int)f.m, Poly::constant(Rat(0)));
    }
    return r;
}

PPMap track_at_len(const MooreFamily& f) {
    PPMap r = f.track;
    r.free_vars = 0;
    r.pieces.clear();
    for (auto& lp : f.len.pieces) {
        for (auto& tp : f.track.pieces) {
            PPPiece p;
            p.carrier = tp.carrier;
            p.ge = lp.ge;
            for (auto& g : tp.ge) p.ge.push_back(apply_subst(g, (int)f.m, lp.comp[0]));
            for (auto& c : tp.comp) p.comp.push_back(apply_subst(c, (int)f.m, lp.comp[0]));
            r.pieces.push_back(p);
        }
    }
    return r;
}

} // namespace

MooreFamily make_moore(const SSet& X, const std::string& src, const std::string& dst, PPMap len,
                       PPMap track) {
    MooreFamily f;
    f.m = len.m;
    f.base = len.domain;
    f.src = src;
    f.dst = dst;
    if (len.target != TargetKind::Coords || len.target_n != 1 || len.free_vars != 0)
        throw std::invalid_argument("length must be a scalar map");
    if (track.m != len.m || track.free_vars != 1 || track.domain != len.domain ||
        track.target != TargetKind::Realization || track.model != &X)
        throw std::invalid_argument("track shape mismatch");
    for (auto& p : len.pieces)
        if (!p.comp[0].is_affine() || !all_affine(p.ge))
            throw std::invalid_argument("length must be piecewise affine");
    f.len = pp_normalize(len);
    f.track = pp_normalize(track);
    // nonnegative length
    auto dom = domain_constraints(f.len);
    for (auto& p : f.len.pieces) {
        std::vector<Poly> cons = dom;
        cons.insert(cons.end(), p.ge.begin(), p.ge.end());
        if (nonneg_on_cell(cons, p.comp[0]) != Tri::Yes)
            throw std::invalid_argument("length is not certified nonnegative");
    }
    // endpoint conditions
    auto check_const = [&](const PPMap& val, const std::string& v, const char* which) {
        EqReport rep = pp_equal(val, const_real(X, v, f.m, f.base));
        if (rep.eq == Tri::No)
            throw std::invalid_argument(std::string("track ") + which + " endpoint mismatch");
        if (rep.eq == Tri::Undecided)
            throw std::invalid_argument(std::string("track ") + which +
                                        " endpoint not certified");
    };
    check_const(track_at_zero(f), src, "source");
    check_const(track_at_len(f), dst, "target");
    return f;
}

MooreFamily constant_moore(const SSet& X, const std::string& b, long m) {
    PPMap len = scalar_map(Poly::zero(), m);
    PPMap track;
    track.m = m;
    track.free_vars = 1;
    track.target = TargetKind::Realization;
    track.model = &X;
    PPPiece p;
    p.carrier = X.simp(b);
    p.comp = {Poly::constant(Rat(1))};
    p.ge = {Poly::var((int)m), -Poly::var((int)m)};
    track.pieces = {p};
    return make_moore(X, b, b, len, track);
}

MooreFamily edge_moore(const SSet& X, const std::string& edge) {
    if (X.gen_dim(edge) != 1) throw std::invalid_argument("edge_moore needs an edge");
    Simp e = X.simp(edge);
    PPMap len = scalar_map(Poly::constant(Rat(1)), 0);
    PPMap track;
    track.m = 0;
    track.free_vars = 1;
    track.target = TargetKind::Realization;
    track.model = &X;
    Poly s = Poly::var(0);
    PPPiece p;
    p.carrier = e;
    p.comp = {Poly::constant(Rat(1)) - s, s};
    p.ge = {s, Poly::constant(Rat(1)) - s};
    track.pieces = {p};
    return make_moore(X, X.first_vertex(e), X.last_vertex(e), len, track);
}

std::string moore_key(const MooreFamily& f) {
    std::ostringstream os;
    os << f.src << ">" << f.dst << "|" << pp_key(f.len) << "|" << pp_key(f.track);
    return os.str();
}

EqReport moore_equal(const MooreFamily& a, const MooreFamily& b, int depth) {
    EqReport rep;
    if (a.m != b.m || a.base != b.base || a.src != b.src || a.dst != b.dst) {
        rep.eq = Tri::No;
        rep.tier = 1;
        rep.note = "family shape mismatch";
        return rep;
    }
    EqReport rl = pp_equal(a.len, b.len, depth);
    if (rl.eq != Tri::Yes) return rl;
    // with lengths equal and endpoints fixed, track equality on the
    // zero-length locus is automatic; the oracle compares the rest
    EqReport rt = pp_equal(a.track, b.track, depth);
    rt.tier = std::max(rt.tier, rl.tier);
    return rt;
}

Tri moore_degenerate(const MooreFamily& f, int depth) {
    if (f.m == 0) return Tri::No;
    bool undecided = false;
    for (long dir = 0; dir < f.m; ++dir) {
        EqReport rl = pp_equal(f.len, pp_collapse(f.len, dir), depth);
        if (rl.eq == Tri::No) continue;
        EqReport rt = pp_equal(f.track, pp_collapse(f.track, dir), depth);
        if (rl.eq == Tri::Yes && rt.eq == Tri::Yes) return Tri::Yes;
        if (rt.eq != Tri::No) undecided = true;
    }
    return undecided ? Tri::Undecided : Tri::No;
}

MooreFamily moore_face_cube(const MooreFamily& f, long i, int eps) {
    if (f.base != DomainKind::Cube) throw std::invalid_argument("cube face on non-cube base");
    MooreFamily r = f;
    r.m = f.m - 1;
    r.len = pp_face_cube(f.len, i, eps);
    PPMap tr = f.track;
    // reuse the cube face on the track: the time variable renumbers with it
    tr.free_vars = 0;
    tr.m = f.m + 1;
    tr = pp_face_cube(tr, i, eps);
    tr.m = r.m;
    tr.free_vars = 1;
    r.track = tr;
    return r;
}

MooreFamily moore_face_simplex(const MooreFamily& f, long i) {
    if (f.base != DomainKind::Simplex)
        throw std::invalid_argument("simplex face on non-simplex base");
    MooreFamily r = f;
    r.m = f.m - 1;
    r.len = pp_face_simplex(f.len, i);
    PPMap tr = f.track;
    tr.free_vars = 0;
    tr.m = f.m;  // keep the time variable out of the order constraints
    Poly value = i == 0 ? Poly::constant(Rat(0))
                        : (i == f.m ? Poly::constant(Rat(1)) : Poly::var((int)(i - 1)));
    tr = face_common(tr, i == f.m ? f.m - 1 : (i == 0 ? 0 : i), value);
    tr.m = r.m;
    tr.free_vars = 1;
    tr.domain = DomainKind::Simplex;
    r.track = tr;
    return r;
}

MooreFamily concat_fiber(const MooreFamily& f, const MooreFamily& g) {
    if (f.m != g.m || f.base != g.base) throw std::invalid_argument("concat_fiber: base mismatch");
    if (f.dst != g.src) throw std::invalid_argument("concat_fiber: endpoint mismatch");
    const SSet& X = *f.track.model;
    int sv = (int)f.m;
    PPMap len = scalar_add(f.len, g.len);
    PPMap track = f.track;
    for (auto& lp : f.len.pieces)
        for (auto& tq : g.track.pieces) {
            PPPiece p;
            p.carrier = tq.carrier;
            p.ge = lp.ge;
            Poly t2 = Poly::var(sv) - lp.comp[0];
            for (auto& c : tq.ge) p.ge.push_back(apply_subst(c, sv, t2));
            for (auto& c : tq.comp) p.comp.push_back(apply_subst(c, sv, t2));
            track.pieces.push_back(p);
        }
    return make_moore(X, f.src, g.dst, len, track);
}

MooreFamily moore_extend_base(const MooreFamily& f, long extra) {
    if (extra == 0) return f;
    MooreFamily r = f;
    r.m = f.m + extra;
    r.len.m = r.m;
    PPMap tr = f.track;
    tr.m = r.m;
    auto move_time = [&](int v) { return v == (int)f.m ? (int)r.m : v; };
    for (auto& piece : tr.pieces) {
        for (auto& c : piece.ge) c = c.rename(move_time);
        for (auto& c : piece.comp) c = c.rename(move_time);
    }
    r.track = tr;
    return r;
}

MooreFamily concat_moore(const MooreFamily& f, const MooreFamily& g) {
    if (f.base != DomainKind::Cube || g.base != DomainKind::Cube)
        throw std::invalid_argument("concat_moore needs cube bases");
    if (f.dst != g.src) throw std::invalid_argument("concat_moore: endpoint mismatch");
    const SSet& X = *f.track.model;
    long d1 = f.m, d2 = g.m;
    auto shift = [&](int v) { return v + (int)d1; };
    // length: sum over product cells
    PPMap len = scalar_map(Poly::zero(), d1 + d2);
    len.pieces.clear();
    for (auto& lp : f.len.pieces)
        for (auto& lq : g.len.pieces) {
            PPPiece p;
            p.ge = lp.ge;
            for (auto& c : lq.ge) p.ge.push_back(c.rename(shift));
            p.comp = {lp.comp[0] + lq.comp[0].rename(shift)};
            len.pieces.push_back(p);
        }
    // track
    PPMap track;
    track.m = d1 + d2;
    track.free_vars = 1;
    track.target = TargetKind::Realization;
    track.model = &X;
    int snew = (int)(d1 + d2);
    // first leg: pieces of f with the time variable moved to the end
    auto move_time_f = [&](int v) { return v == (int)d1 ? snew : v; };
    for (auto& tp : f.track.pieces) {
        PPPiece p;
        p.carrier = tp.carrier;
        for (auto& c : tp.ge) p.ge.push_back(c.rename(move_time_f));
        for (auto& c : tp.comp) p.comp.push_back(c.rename(move_time_f));
        track.pieces.push_back(p);
    }
    // second leg: pieces of g at time s - len_f(x1), per cell of len_f
    auto move_g = [&](int v) { return v == (int)d2 ? snew : v + (int)d1; };
    for (auto& lp : f.len.pieces)
        for (auto& tq : g.track.pieces) {
            PPPiece p;
            p.carrier = tq.carrier;
            p.ge = lp.ge;
            Poly t2 = Poly::var(snew) - lp.comp[0];
            for (auto& c : tq.ge)
                p.ge.push_back(apply_subst(c.rename(move_g), snew, t2));
            for (auto& c : tq.comp)
                p.comp.push_back(apply_subst(c.rename(move_g), snew, t2));
            track.pieces.push_back(p);
        }
    return make_moore(X, f.src, g.dst, len, track);
}

void MooreChain::add(const MooreFamily& f, const Rat& c) {
    if (c == 0) return;
    if (moore_degenerate(f) == Tri::Yes) return;
    std::string k = moore_key(f);
    auto it = terms.find(k);
    if (it == terms.end())
        terms[k] = {f, c};
    else {
        it->second.second += c;
        if (it->second.second == 0) terms.erase(it);
    }
}

MooreChain& MooreChain::operator+=(const MooreChain& o) {
    for (auto& [k, tc] : o.terms) add(tc.first, tc.second);
    return *this;
}

MooreChain MooreChain::operator*(const Rat& c) const {
    MooreChain r;
    for (auto& [k, tc] : terms) r.add(tc.first, tc.second * c);
    return r;
}

bool MooreChain::operator==(const MooreChain& o) const {
    if (terms.size() != o.terms.size()) return false;
    for (auto it = terms.begin(), jt = o.terms.begin(); it != terms.end(); ++it, ++jt)
        if (it->first != jt->first || it->second.second != jt->second.second) return false;
    return true;
}

MooreChain moore_chain(const MooreFamily& f, const Rat& c) {
    MooreChain r;
    r.add(f, c);
    return r;
}

MooreChain moore_boundary(const MooreChain& c) {
    MooreChain out;
    for (auto& [k, tc] : c.terms) {
        const MooreFamily& f = tc.first;
        const Rat& co = tc.second;
        if (f.base == DomainKind::Cube) {
            Rat s(-1);
            for (long i = 0; i < f.m; ++i) {
                out.add(moore_face_cube(f, i, 1), co * s);
                out.add(moore_face_cube(f, i, 0), -co * s);
                s = -s;
            }
        } else {
            Rat s(1);
            for (long i = 0; i <= f.m; ++i) {
                out.add(moore_face_simplex(f, i), co * s);
                s = -s;
            }
        }
    }
    return out;
}

MooreChain concat_moore(const MooreChain& a, const MooreChain& b) {
    MooreChain out;
    for (auto& [ka, ta] : a.terms)
        for (auto& [kb, tb] : b.terms)
            out.add(concat_moore(ta.first, tb.first), ta.second * tb.second);
    return out;
}

// ---- marked families ----

MarkedFamily make_marked(MooreFamily fam, std::vector<PPMap> marks) {
    MarkedFamily mf;
    mf.fam = std::move(fam);
    for (auto& t : marks) {
        if (t.m != mf.fam.m || t.domain != mf.fam.base || t.target != TargetKind::Coords ||
            t.target_n != 1 || t.free_vars != 0)
            throw std::invalid_argument("marks must be scalars on the base");
        t = pp_normalize(t);
    }
    mf.marks = std::move(marks);
    // certify 0 <= t_1 <= ... <= t_n <= len
    long n = (long)mf.marks.size();
    auto dom = domain_constraints(mf.fam.len);
    auto check = [&](const PPMap& lo, const PPMap& hi) {
        for (auto& pl : lo.pieces)
            for (auto& ph : hi.pieces) {
                std::vector<Poly> cons = dom;
                cons.insert(cons.end(), pl.ge.begin(), pl.ge.end());
                cons.insert(cons.end(), ph.ge.begin(), ph.ge.end());
                Tri t = nonneg_on_cell(cons, ph.comp[0] - pl.comp[0]);
                if (t == Tri::No) throw std::invalid_argument("mark ordering violated");
                if (t == Tri::Undecided)
                    throw std::invalid_argument("mark ordering not certified");
            }
    };
    PPMap zero = scalar_map(Poly::zero(), mf.fam.m, mf.fam.base);
    if (n > 0) check(zero, mf.marks.front());
    for (long i = 0; i + 1 < n; ++i) check(mf.marks[i], mf.marks[i + 1]);
    if (n > 0) check(mf.marks.back(), mf.fam.len);
    return mf;
}

MarkedFamily make_marked_unchecked(MooreFamily fam, std::vector<PPMap> marks) {
    MarkedFamily mf;
    mf.fam = std::move(fam);
    for (auto& t : marks) {
        if (t.m != mf.fam.m || t.domain != mf.fam.base || t.target != TargetKind::Coords ||
            t.target_n != 1 || t.free_vars != 0)
            throw std::invalid_argument("marks must be scalars on the base");
        t = pp_normalize(t);
    }
    mf.marks = std::move(marks);
    return mf;
}

MarkedFamily make_marked_product(MooreFamily fam, std::vector<PPMap> unit_marks) {
    // certify the affine unit ordering 0 <= u_1 <= ... <= u_n <= 1; the marks
    // u_i * len then inherit 0 <= t_1 <= ... <= t_n <= len from len >= 0
    auto dom = domain_constraints(fam.len);
    auto check = [&](const PPMap& lo, const PPMap& hi) {
        for (auto& pl : lo.pieces)
            for (auto& ph : hi.pieces) {
                std::vector<Poly> cons = dom;
                cons.insert(cons.end(), pl.ge.begin(), pl.ge.end());
                cons.insert(cons.end(), ph.ge.begin(), ph.ge.end());
                Tri t = nonneg_on_cell(cons, ph.comp[0] - pl.comp[0]);
                if (t == Tri::No) throw std::invalid_argument("unit mark ordering violated");
                if (t == Tri::Undecided)
                    throw std::invalid_argument("unit mark ordering not certified");
            }
    };
    long n = (long)unit_marks.size();
    PPMap zero = scalar_map(Poly::zero(), fam.m, fam.base);
    PPMap one = scalar_map(Poly::constant(Rat(1)), fam.m, fam.base);
    if (n > 0) check(zero, unit_marks.front());
    for (long i = 0; i + 1 < n; ++i) check(unit_marks[i], unit_marks[i + 1]);
    if (n > 0) check(unit_marks.back(), one);
    std::vector<PPMap> marks;
    for (auto& u : unit_marks) {
        PPMap m = u;
        m.pieces.clear();
        for (auto& up : u.pieces)
            for (auto& lp : fam.len.pieces) {
                PPPiece p;
                p.ge = up.ge;
                p.ge.insert(p.ge.end(), lp.ge.begin(), lp.ge.end());
                p.comp = {up.comp[0] * lp.comp[0]};
                m.pieces.push_back(p);
            }
        marks.push_back(std::move(m));
    }
    return make_marked_unchecked(std::move(fam), std::move(marks));
}

std::string marked_key(const MarkedFamily& f) {
    std::ostringstream os;
    os << moore_key(f.fam);
    for (auto& t : f.marks) os << "@" << pp_key(t);
    return os.str();
}

EqReport marked_equal(const MarkedFamily& a, const MarkedFamily& b, int depth) {
    EqReport rep;
    if (a.marks.size() != b.marks.size()) {
        rep.eq = Tri::No;
        rep.tier = 1;
        rep.note = "mark count mismatch";
        return rep;
    }
    rep = moore_equal(a.fam, b.fam, depth);
    if (rep.eq != Tri::Yes) return rep;
    for (size_t i = 0; i < a.marks.size(); ++i) {
        EqReport rm = pp_equal(a.marks[i], b.marks[i], depth);
        rm.tier = std::max(rm.tier, rep.tier);
        if (rm.eq != Tri::Yes) return rm;
        rep = rm;
    }
    return rep;
}

Tri marked_degenerate(const MarkedFamily& f, int depth) {
    if (f.fam.m == 0) return Tri::No;
    bool undecided = false;
    for (long dir = 0; dir < f.fam.m; ++dir) {
        Tri all = Tri::Yes;
        auto fold = [&](const EqReport& r) {
            if (r.eq == Tri::No)
                all = Tri::No;
            else if (r.eq == Tri::Undecided && all == Tri::Yes)
                all = Tri::Undecided;
        };
        fold(pp_equal(f.fam.len, pp_collapse(f.fam.len, dir), depth));
        if (all != Tri::No) fold(pp_equal(f.fam.track, pp_collapse(f.fam.track, dir), depth));
        for (auto& t : f.marks)
            if (all != Tri::No) fold(pp_equal(t, pp_collapse(t, dir), depth));
        if (all == Tri::Yes) return Tri::Yes;
        if (all == Tri::Undecided) undecided = true;
    }
    return undecided ? Tri::Undecided : Tri::No;
}

MarkedFamily marked_face_cube(const MarkedFamily& f, long i, int eps) {
    MarkedFamily r;
    r.fam = moore_face_cube(f.fam, i, eps);
    for (auto& t : f.marks) r.marks.push_back(pp_face_cube(t, i, eps));
    return r;
}

MarkedFamily marked_face_simplex(const MarkedFamily& f, long i) {
    MarkedFamily r;
    r.fam = moore_face_simplex(f.fam, i);
    for (auto& t : f.marks) r.marks.push_back(pp_face_simplex(t, i));
    return r;
}

MarkedFamily marked_coface(const MarkedFamily& f, long i) {
    long n = (long)f.marks.size();
    if (i < 0 || i > n + 1) throw std::out_of_range("coface index");
    MarkedFamily r = f;
    if (i == 0)
        r.marks.insert(r.marks.begin(), scalar_map(Poly::zero(), f.fam.m, f.fam.base));
    else if (i == n + 1)
        r.marks.push_back(f.fam.len);
    else
        r.marks.insert(r.marks.begin() + i, f.marks[i - 1]);
    return r;
}

MarkedFamily marked_codegeneracy(const MarkedFamily& f, long i) {
    if (i < 0 || i >= (long)f.marks.size()) throw std::out_of_range("codegeneracy index");
    MarkedFamily r = f;
    r.marks.erase(r.marks.begin() + i);
    return r;
}

MarkedFamily concat_marked(const MarkedFamily& f, const MarkedFamily& g) {
    MarkedFamily r;
    r.fam = concat_moore(f.fam, g.fam);
    long d1 = f.fam.m;
    auto shift = [&](int v) { return v + (int)d1; };
    auto widen_f = [&](const PPMap& t) {
        PPMap w = t;
        w.m = r.fam.m;
        return w;
    };
    for (auto& t : f.marks) r.marks.push_back(widen_f(t));
    // len_f only depends on the first block, marks of g on the second
    PPMap lf = widen_f(f.fam.len);
    for (auto& t : g.marks) {
        PPMap shifted = t;
        shifted.m = r.fam.m;
        for (auto& piece : shifted.pieces) {
            for (auto& c : piece.ge) c = c.rename(shift);
            for (auto& c : piece.comp) c = c.rename(shift);
        }
        r.marks.push_back(scalar_add(lf, shifted));
    }
    // both inputs carry ordering certificates and the shift by len_f >= 0
    // preserves them, so no re-certification
    return make_marked_unchecked(std::move(r.fam), std::move(r.marks));
}

MarkedChain eta_marked(const MarkedChain& c) {
    MarkedChain out;
    for (auto& [k, tc] : c.terms) {
        const MarkedFamily& f = tc.first;
        if (f.fam.base != DomainKind::Cube)
            throw std::invalid_argument("eta_marked needs cube bases");
        for (auto& tau : permutations_of((int)f.fam.m)) {
            MooreFamily fam = f.fam;
            fam.base = DomainKind::Simplex;
            fam.len = pp_normalize(precompose_perm(f.fam.len, tau));
            PPMap tr = precompose_perm(f.fam.track, tau);  // time var is beyond tau
            fam.track = pp_normalize(tr);
            std::vector<PPMap> marks;
            for (auto& t : f.marks) marks.push_back(precompose_perm(t, tau));
            out.add(make_marked_unchecked(std::move(fam), std::move(marks)),
                    tc.second * Rat(perm_sign(tau)));
        }
    }
    return out;
}

namespace {

// pull a family back along the coordinate selection of a shuffle piece
MooreFamily moore_rename_base(const MooreFamily& f, long new_m,
                              const std::function<int(int)>& ren, DomainKind base) {
    MooreFamily r = f;
    r.m = new_m;
    r.base = base;
    auto full = [&](int v) { return v == (int)f.m ? (int)new_m : ren(v); };
    PPMap len = f.len;
    len.m = new_m;
    len.domain = base;
    for (auto& piece : len.pieces) {
        for (auto& c : piece.ge) c = c.rename(ren);
        for (auto& c : piece.comp) c = c.rename(ren);
    }
    r.len = len;
    PPMap tr = f.track;
    tr.m = new_m;
    tr.domain = base;
    for (auto& piece : tr.pieces) {
        for (auto& c : piece.ge) c = c.rename(full);
        for (auto& c : piece.comp) c = c.rename(full);
    }
    r.track = tr;
    return r;
}

PPMap scalar_rename_base(const PPMap& t, long new_m, const std::function<int(int)>& ren,
                         DomainKind base) {
    PPMap r = t;
    r.m = new_m;
    r.domain = base;
    for (auto& piece : r.pieces) {
        for (auto& c : piece.ge) c = c.rename(ren);
        for (auto& c : piece.comp) c = c.rename(ren);
    }
    return r;
}

} // namespace

MarkedChain concat_marked_shuffle(const MarkedFamily& f, const MarkedFamily& g) {
    if (f.fam.base != DomainKind::Simplex || g.fam.base != DomainKind::Simplex)
        throw std::invalid_argument("concat_marked_shuffle needs simplex bases");
    if (f.fam.dst != g.fam.src)
        throw std::invalid_argument("concat_marked_shuffle: endpoint mismatch");
    MarkedChain out;
    int p = (int)f.fam.m, q = (int)g.fam.m, n = p + q;
    std::vector<int> sel(p);
    std::iota(sel.begin(), sel.end(), 0);
    bool more = p >= 0;
    while (more) {
        std::vector<int> other;
        for (int i = 0; i < n; ++i)
            if (std::find(sel.begin(), sel.end(), i) == sel.end()) other.push_back(i);
        int inv = 0;
        for (int x : sel)
            for (int y : other)
                if (y < x) ++inv;
        auto renf = [&](int v) { return v < p ? sel[v] : v; };
        auto reng = [&](int v) { return v < q ? other[v] : v; };
        MooreFamily fp = moore_rename_base(f.fam, n, renf, DomainKind::Simplex);
        MooreFamily gp = moore_rename_base(g.fam, n, reng, DomainKind::Simplex);
        MooreFamily cat = concat_fiber(fp, gp);
        std::vector<PPMap> marks;
        for (auto& t : f.marks)
            marks.push_back(scalar_rename_base(t, n, renf, DomainKind::Simplex));
        for (auto& t : g.marks)
            marks.push_back(scalar_add(fp.len, scalar_rename_base(t, n, reng, DomainKind::Simplex)));
        out.add(make_marked_unchecked(std::move(cat), std::move(marks)),
                Rat(inv % 2 == 0 ? 1 : -1));
        int i = p - 1;
        while (i >= 0 && sel[i] == n - p + i) --i;
        if (i < 0 || p == 0)
            more = false;
        else {
            ++sel[i];
            for (int k2 = i + 1; k2 < p; ++k2) sel[k2] = sel[k2 - 1] + 1;
        }
    }
    return out;
}

PPMap ev_component(const MarkedFamily& f, long i) {
    if (i < 0 || i >= (long)f.marks.size()) throw std::out_of_range("mark index");
    const PPMap& mark = f.marks[i];
    PPMap r = f.fam.track;
    r.free_vars = 0;
    r.pieces.clear();
    int sv = (int)f.fam.m;
    for (auto& mp : mark.pieces)
        for (auto& tp : f.fam.track.pieces) {
            PPPiece p;
            p.carrier = tp.carrier;
            p.ge = mp.ge;
            for (auto& g : tp.ge) p.ge.push_back(apply_subst(g, sv, mp.comp[0]));
            for (auto& c : tp.comp) p.comp.push_back(apply_subst(c, sv, mp.comp[0]));
            r.pieces.push_back(p);
        }
    return pp_normalize(r);
}

void MarkedChain::add(const MarkedFamily& f, const Rat& c) {
    if (c == 0) return;
    if (marked_degenerate(f) == Tri::Yes) return;
    std::string k = marked_key(f);
    auto it = terms.find(k);
    if (it == terms.end())
        terms[k] = {f, c};
    else {
        it->second.second += c;
        if (it->second.second == 0) terms.erase(it);
    }
}

MarkedChain& MarkedChain::operator+=(const MarkedChain& o) {
    for (auto& [k, tc] : o.terms) add(tc.first, tc.second);
    return *this;
}

MarkedChain MarkedChain::operator*(const Rat& c) const {
    MarkedChain r;
    for (auto& [k, tc] : terms) r.add(tc.first, tc.second * c);
    return r;
}

bool MarkedChain::operator==(const MarkedChain& o) const {
    if (terms.size() != o.terms.size()) return false;
    for (auto it = terms.begin(), jt = o.terms.begin(); it != terms.end(); ++it, ++jt)
        if (it->first != jt->first || it->second.second != jt->second.second) return false;
    return true;
}

// ---- semantic chain equality ----

namespace {

// cluster terms under the oracle, then match clusters across the two chains.
// A perfect matching of Yes-equal terms with equal coefficients proves
// equality outright, even if some other pairwise comparison was undecided
// (unmerged equal clusters just consume separate partners); a failed match
// in the presence of any undecided comparison stays Undecided.
template <typename Term, typename Eq>
Tri chains_equal(std::vector<std::pair<Term, Rat>> a, std::vector<std::pair<Term, Rat>> b,
                 const Eq& eq) {
    bool undecided = false;
    auto cluster = [&](std::vector<std::pair<Term, Rat>>& v) {
        for (size_t i = 0; i < v.size(); ++i)
            for (size_t j = i + 1; j < v.size();) {
                Tri t = eq(v[i].first, v[j].first);
                if (t == Tri::Undecided) undecided = true;
                if (t == Tri::Yes) {
                    v[i].second += v[j].second;
                    v.erase(v.begin() + j);
                } else {
                    ++j;
                }
            }
        v.erase(std::remove_if(v.begin(), v.end(),
                               [](const std::pair<Term, Rat>& t) { return t.second == 0; }),
                v.end());
    };
    cluster(a);
    cluster(b);
    std::vector<bool> used(b.size(), false);
    for (auto& [ta, ca] : a) {
        bool found = false;
        for (size_t j = 0; j < b.size() && !found; ++j) {
            if (used[j] || b[j].second != ca) continue;
            Tri t = eq(ta, b[j].first);
            if (t == Tri::Undecided) undecided = true;
            if (t == Tri::Yes) {
                used[j] = true;
                found = true;
            }
        }
        if (!found) return undecided ? Tri::Undecided : Tri::No;
    }
    for (size_t j = 0; j < b.size(); ++j)
        if (!used[j]) return undecided ? Tri::Undecided : Tri::No;
    return Tri::Yes;
}

} // namespace

Tri pp_chain_equal(const PPChain& a, const PPChain& b, int depth) {
    std::vector<std::pair<PPMap, Rat>> ta, tb;
    for (auto& [k, tc] : a.terms) ta.push_back(tc);
    for (auto& [k, tc] : b.terms) tb.push_back(tc);
    return chains_equal(ta, tb,
                        [&](const PPMap& f, const PPMap& g) { return pp_equal(f, g, depth).eq; });
}

Tri moore_chain_equal(const MooreChain& a, const MooreChain& b, int depth) {
    std::vector<std::pair<MooreFamily, Rat>> ta, tb;
    for (auto& [k, tc] : a.terms) ta.push_back(tc);
    for (auto& [k, tc] : b.terms) tb.push_back(tc);
    return chains_equal(ta, tb, [&](const MooreFamily& f, const MooreFamily& g) {
        return moore_equal(f, g, depth).eq;
    });
}

Tri marked_chain_equal(const MarkedChain& a, const MarkedChain& b, int depth) {
    std::vector<std::pair<MarkedFamily, Rat>> ta, tb;
    for (auto& [k, tc] : a.terms) ta.push_back(tc);
    for (auto& [k, tc] : b.terms) tb.push_back(tc);
    return chains_equal(ta, tb, [&](const MarkedFamily& f, const MarkedFamily& g) {
        return marked_equal(f, g, depth).eq;
    });
}

MarkedChain marked_chain(const MarkedFamily& f, const Rat& c) {
    MarkedChain r;
    r.add(f, c);
    return r;
}

MarkedChain marked_boundary(const MarkedChain& c) {
    MarkedChain out;
    for (auto& [k, tc] : c.terms) {
        const MarkedFamily& f = tc.first;
        const Rat& co = tc.second;
        if (f.fam.base == DomainKind::Cube) {
            Rat s(-1);
            for (long i = 0; i < f.fam.m; ++i) {
                out.add(marked_face_cube(f, i, 1), co * s);
                out.add(marked_face_cube(f, i, 0), -co * s);
                s = -s;
            }
        } else {
            Rat s(1);
            for (long i = 0; i <= f.fam.m; ++i) {
                out.add(marked_face_simplex(f, i), co * s);
                s = -s;
            }
        }
    }
    return out;
}

} // namespace cobarlab
