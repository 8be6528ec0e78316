#include "cobarlab/poly.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cobarlab {

namespace {

Mono trim(Mono m) {
    while (!m.empty() && m.back() == 0) m.pop_back();
    return m;
}

Mono mono_mul(const Mono& a, const Mono& b) {
    Mono r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return trim(r);
}

} // namespace

Poly Poly::constant(const Rat& c) {
    Poly p;
    if (c != 0) p.t[{}] = c;
    return p;
}

Poly Poly::var(int i) {
    Poly p;
    Mono m(i + 1, 0);
    m[i] = 1;
    p.t[m] = Rat(1);
    return p;
}

bool Poly::is_constant() const {
    return t.empty() || (t.size() == 1 && t.begin()->first.empty());
}

Rat Poly::constant_value() const {
    if (t.empty()) return Rat(0);
    if (!is_constant()) throw std::logic_error("constant_value on a non-constant polynomial");
    return t.begin()->second;
}

bool Poly::is_affine() const { return total_degree() <= 1; }

long Poly::total_degree() const {
    long d = -1;
    for (auto& [m, c] : t) {
        long s = 0;
        for (int e : m) s += e;
        d = std::max(d, s);
    }
    return d;
}

bool Poly::uses_var(int i) const {
    for (auto& [m, c] : t)
        if ((int)m.size() > i && m[i] > 0) return true;
    return false;
}

std::vector<int> Poly::vars() const {
    std::set<int> s;
    for (auto& [m, c] : t)
        for (size_t i = 0; i < m.size(); ++i)
            if (m[i] > 0) s.insert((int)i);
    return {s.begin(), s.end()};
}

Poly Poly::operator-() const {
    Poly r;
    for (auto& [m, c] : t) r.t[m] = -c;
    return r;
}

Poly& Poly::operator+=(const Poly& o) {
    for (auto& [m, c] : o.t) {
        auto it = t.find(m);
        if (it == t.end())
            t[m] = c;
        else {
            it->second += c;
            if (it->second == 0) t.erase(it);
        }
    }
    return *this;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r = *this;
    r += o;
    return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
    Poly r;
    for (auto& [m1, c1] : t)
        for (auto& [m2, c2] : o.t) {
            Mono m = mono_mul(m1, m2);
            auto it = r.t.find(m);
            if (it == r.t.end())
                r.t[m] = c1 * c2;
            else {
                it->second += c1 * c2;
                if (it->second == 0) r.t.erase(it);
            }
        }
    return r;
}

Poly Poly::operator*(const Rat& c) const {
    Poly r;
    if (c == 0) return r;
    for (auto& [m, k] : t) r.t[m] = k * c;
    return r;
}

Poly operator*(const Rat& c, const Poly& p) { return p * c; }

Poly Poly::pow(int e) const {
    if (e < 0) throw std::invalid_argument("negative power");
    Poly r = constant(Rat(1));
    for (int i = 0; i < e; ++i) r = r * *this;
    return r;
}

Poly Poly::subst(int var, const Poly& q) const {
    Poly r;
    for (auto& [m, c] : t) {
        Poly term = constant(c);
        Mono rest = m;
        int e = 0;
        if ((int)rest.size() > var) {
            e = rest[var];
            rest[var] = 0;
            rest = trim(rest);
        }
        Poly mono;
        mono.t[rest] = Rat(1);
        term = term * mono;
        if (e > 0) term = term * q.pow(e);
        r += term;
    }
    return r;
}

Poly Poly::rename(const std::function<int(int)>& f) const {
    Poly r;
    for (auto& [m, c] : t) {
        std::map<int, int> ex;
        for (size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            int j = (int)i < kParamBase ? f((int)i) : (int)i;
            if (j < 0) throw std::logic_error("rename maps a live variable to nothing");
            ex[j] += m[i];
        }
        Mono nm;
        if (!ex.empty()) {
            nm.assign(ex.rbegin()->first + 1, 0);
            for (auto& [j, e] : ex) nm[j] = e;
        }
        auto it = r.t.find(nm);
        if (it == r.t.end())
            r.t[nm] = c;
        else {
            it->second += c;
            if (it->second == 0) r.t.erase(it);
        }
    }
    return r;
}

Rat Poly::eval(const std::vector<Rat>& coord, const std::vector<Rat>& params) const {
    Rat total(0);
    for (auto& [m, c] : t) {
        Rat v = c;
        for (size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            Rat x(0);
            if ((int)i >= kParamBase) {
                size_t pi = i - kParamBase;
                if (pi >= params.size()) throw std::invalid_argument("missing parameter value");
                x = params[pi];
            } else if (i < coord.size()) {
                x = coord[i];
            }
            for (int e = 0; e < m[i]; ++e) v *= x;
        }
        total += v;
    }
    return total;
}

std::string Poly::str(const std::function<std::string(int)>& name) const {
    if (t.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [m, c] : t) {
        Rat a = c;
        if (first) {
            if (a < 0) {
                os << "-";
                a = -a;
            }
        } else {
            os << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        bool hasvar = false;
        for (int e : m)
            if (e > 0) hasvar = true;
        if (!hasvar || a != 1) os << to_string(a);
        bool star = !hasvar || a != 1;
        for (size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            if (star) os << "*";
            os << name((int)i);
            if (m[i] > 1) os << "^" << m[i];
            star = true;
        }
    }
    return os.str();
}

std::string Poly::str() const {
    return str([](int i) {
        std::ostringstream os;
        if (i >= kParamBase)
            os << "l" << (i - kParamBase);
        else
            os << "x" << i;
        return os.str();
    });
}

// ---- Fourier-Motzkin ----

namespace {

struct Lin {
    // affine form: coeff per var + constant
    std::map<int, Rat> a;
    Rat c{0};
    bool strict = false;
};

Lin to_lin(const Poly& p, bool strict) {
    if (!p.is_affine()) throw std::invalid_argument("affine_feasible: non-affine constraint");
    Lin l;
    l.strict = strict;
    for (auto& [m, co] : p.t) {
        int v = -1;
        for (size_t i = 0; i < m.size(); ++i)
            if (m[i] > 0) v = (int)i;
        if (v < 0)
            l.c = co;
        else
            l.a[v] = co;
    }
    return l;
}

} // namespace

FeasResult affine_feasible(const AffineSystem& sys) {
    std::vector<Lin> cons;
    std::set<int> vars;
    for (auto& [p, s] : sys.cons) {
        Lin l = to_lin(p, s);
        if (l.a.empty()) {
            if (l.c < 0 || (l.c == 0 && l.strict)) return {};
            continue;
        }
        for (auto& [v, co] : l.a) vars.insert(v);
        cons.push_back(std::move(l));
    }
    std::vector<int> order(vars.begin(), vars.end());
    // eliminate from the highest index down, remembering each layer
    struct Layer {
        int var;
        std::vector<Lin> lower, upper;  // lower: a>0 (v >= -rest/a); upper: a<0
    };
    std::vector<Layer> layers;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int v = *it;
        Layer L;
        L.var = v;
        std::vector<Lin> rest;
        for (auto& l : cons) {
            auto f = l.a.find(v);
            if (f == l.a.end())
                rest.push_back(l);
            else if (f->second > 0)
                L.lower.push_back(l);
            else
                L.upper.push_back(l);
        }
        for (auto& lo : L.lower)
            for (auto& up : L.upper) {
                // (-a_up)*lo + a_lo*up eliminates v, positive multipliers
                Rat alo = lo.a.at(v), aup = up.a.at(v);
                Lin n;
                n.strict = lo.strict || up.strict;
                n.c = (-aup) * lo.c + alo * up.c;
                for (auto& [w, co] : lo.a)
                    if (w != v) n.a[w] += (-aup) * co;
                for (auto& [w, co] : up.a)
                    if (w != v) n.a[w] += alo * co;
                for (auto it2 = n.a.begin(); it2 != n.a.end();)
                    it2 = it2->second == 0 ? n.a.erase(it2) : std::next(it2);
                if (n.a.empty()) {
                    if (n.c < 0 || (n.c == 0 && n.strict)) return {};
                } else {
                    rest.push_back(std::move(n));
                }
            }
        cons = std::move(rest);
        layers.push_back(std::move(L));
    }
    // back-substitute, lowest-index variable first
    FeasResult res;
    res.feasible = true;
    for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
        auto value = [&](const Lin& l) -> Rat {
            // the bound on var implied by l at the current witness
            Rat rest = l.c;
            for (auto& [w, co] : l.a)
                if (w != it->var) rest += co * (res.witness.count(w) ? res.witness[w] : Rat(0));
            return -rest / l.a.at(it->var);
        };
        bool has_lo = false, has_up = false, lo_strict = false, up_strict = false;
        Rat lo(0), up(0);
        for (auto& l : it->lower) {
            Rat b = value(l);
            if (!has_lo || b > lo || (b == lo && l.strict)) {
                lo = b;
                lo_strict = l.strict;
            }
            has_lo = true;
        }
        for (auto& l : it->upper) {
            Rat b = value(l);
            if (!has_up || b < up || (b == up && l.strict)) {
                up = b;
                up_strict = l.strict;
            }
            has_up = true;
        }
        Rat v(0);
        if (has_lo && has_up)
            v = (lo == up) ? lo : (lo + up) / 2;
        else if (has_lo)
            v = lo_strict ? lo + 1 : lo;
        else if (has_up)
            v = up_strict ? up - 1 : up;
        res.witness[it->var] = v;
    }
    return res;
}

FeasResult full_dimensional(const std::vector<Poly>& ge) {
    AffineSystem sys;
    for (auto& p : ge) {
        if (p.is_zero()) continue;
        sys.add(p, true);
    }
    return affine_feasible(sys);
}

std::pair<Rat, Rat> range_bound(const Poly& p, const std::map<int, std::pair<Rat, Rat>>& box) {
    // affinely map the box onto the unit box, then bound monomial-wise
    Poly q = p;
    for (int v : p.vars()) {
        auto it = box.find(v);
        if (it == box.end()) throw std::invalid_argument("range_bound: variable outside the box");
        const auto& [lo, hi] = it->second;
        q = q.subst(v, Poly::constant(lo) + (hi - lo) * Poly::var(v));
    }
    Rat lo(0), hi(0);
    for (auto& [m, c] : q.t) {
        bool hasvar = false;
        for (int e : m)
            if (e > 0) hasvar = true;
        if (!hasvar) {
            lo += c;
            hi += c;
        } else if (c > 0) {
            hi += c;
        } else {
            lo += c;
        }
    }
    return {lo, hi};
}

} // namespace cobarlab
