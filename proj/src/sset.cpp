#include "cobarlab/sset.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cobarlab {

std::string to_string(const Simp& s) {
    if (s.degen.empty()) return s.gen;
    std::ostringstream os;
    os << "s_{";
    for (size_t i = 0; i < s.degen.size(); ++i) {
        if (i) os << ",";
        os << s.degen[i];
    }
    os << "}" << s.gen;
    return os.str();
}

SSet::SSet(std::string name, std::vector<std::vector<std::string>> generators,
           std::map<std::string, std::vector<Simp>> faces)
    : name_(std::move(name)), generators_(std::move(generators)), faces_(std::move(faces)) {
    for (long d = 0; d < (long)generators_.size(); ++d)
        for (long i = 0; i < (long)generators_[d].size(); ++i) {
            const std::string& g = generators_[d][i];
            if (gen_dim_.count(g))
                throw std::runtime_error(name_ + ": duplicate generator label '" + g + "'");
            gen_dim_[g] = d;
            gen_index_[g] = i;
        }
    validate();
}

const std::vector<std::string>& SSet::generators(long d) const {
    static const std::vector<std::string> empty;
    if (d < 0 || d >= (long)generators_.size()) return empty;
    return generators_[d];
}

long SSet::gen_dim(const std::string& label) const {
    auto it = gen_dim_.find(label);
    if (it == gen_dim_.end())
        throw std::runtime_error(name_ + ": unknown generator '" + label + "'");
    return it->second;
}

long SSet::gen_index(const std::string& label) const {
    auto it = gen_index_.find(label);
    if (it == gen_index_.end())
        throw std::runtime_error(name_ + ": unknown generator '" + label + "'");
    return it->second;
}

Simp SSet::simp(const std::string& gen_label) const {
    gen_dim(gen_label);
    return Simp{{}, gen_label};
}

Simp SSet::degenerate(const Simp& s, int j) const {
    long d = dim(s);
    if (j < 0 || j > d) throw std::out_of_range(name_ + ": degeneracy index out of range");
    // push s_j through the canonical word via s_a s_b = s_{b+1} s_a (a <= b)
    std::vector<int> out;
    int cur = j;
    size_t idx = 0;
    const auto& w = s.degen;
    while (idx < w.size() && cur <= w[idx]) {
        out.push_back(w[idx] + 1);
        ++idx;
    }
    out.push_back(cur);
    for (; idx < w.size(); ++idx) out.push_back(w[idx]);
    return Simp{std::move(out), s.gen};
}

Simp SSet::face(const Simp& s, int i) const {
    long d = dim(s);
    if (d == 0) throw std::out_of_range(name_ + ": face of a vertex");
    if (i < 0 || i > d) throw std::out_of_range(name_ + ": face index out of range");
    if (s.degen.empty()) {
        auto it = faces_.find(s.gen);
        if (it == faces_.end())
            throw std::runtime_error(name_ + ": missing face data for '" + s.gen + "'");
        return it->second[i];
    }
    int j = s.degen.front();
    Simp rest{std::vector<int>(s.degen.begin() + 1, s.degen.end()), s.gen};
    if (i == j || i == j + 1) return rest;             // d_i s_j = id
    if (i < j) return degenerate(face(rest, i), j - 1); // d_i s_j = s_{j-1} d_i
    return degenerate(face(rest, i - 1), j);            // d_i s_j = s_j d_{i-1}, i > j+1
}

Simp SSet::front_face(const Simp& s, long p) const {
    Simp cur = s;
    for (long t = dim(s); t > p; --t) cur = face(cur, (int)t);
    return cur;
}

Simp SSet::back_face(const Simp& s, long q) const {
    Simp cur = s;
    for (long t = dim(s); t > q; --t) cur = face(cur, 0);
    return cur;
}

std::string SSet::vertex(const Simp& s, long j) const {
    Simp v = back_face(front_face(s, j), 0);
    if (!v.degen.empty())
        throw std::logic_error(name_ + ": vertex computation left a degeneracy word");
    return v.gen;
}

std::vector<std::pair<Simp, Simp>> SSet::aw_pairs(const Simp& s) const {
    long n = dim(s);
    std::vector<std::pair<Simp, Simp>> out;
    out.reserve(n + 1);
    for (long p = 0; p <= n; ++p) out.push_back({front_face(s, p), back_face(s, n - p)});
    return out;
}

void SSet::validate() const {
    for (long d = 1; d < (long)generators_.size(); ++d)
        for (const auto& g : generators_[d]) {
            auto it = faces_.find(g);
            if (it == faces_.end())
                throw std::runtime_error(name_ + ": generator '" + g + "' has no face list");
            if ((long)it->second.size() != d + 1)
                throw std::runtime_error(name_ + ": generator '" + g + "' needs " +
                                         std::to_string(d + 1) + " faces");
            for (const Simp& f : it->second) {
                auto git = gen_dim_.find(f.gen);
                if (git == gen_dim_.end())
                    throw std::runtime_error(name_ + ": face of '" + g + "' references unknown '" + f.gen + "'");
                long base = git->second;
                long k = (long)f.degen.size();
                if (base + k != d - 1)
                    throw std::runtime_error(name_ + ": face of '" + g + "' has wrong dimension");
                for (long m = 0; m < k; ++m) {
                    if (m > 0 && f.degen[m] >= f.degen[m - 1])
                        throw std::runtime_error(name_ + ": non-canonical degeneracy word on face of '" + g + "'");
                    long applied_to = base + (k - 1 - m);
                    if (f.degen[m] < 0 || f.degen[m] > applied_to)
                        throw std::runtime_error(name_ + ": degeneracy index out of range on face of '" + g + "'");
                }
            }
        }
    // d_i d_j = d_{j-1} d_i for i < j
    for (long d = 2; d < (long)generators_.size(); ++d)
        for (const auto& g : generators_[d]) {
            Simp x{{}, g};
            for (int j = 1; j <= d; ++j)
                for (int i = 0; i < j; ++i)
                    if (face(face(x, j), i) != face(face(x, i), j - 1))
                        throw std::runtime_error(name_ + ": simplicial identity d_" + std::to_string(i) +
                                                 " d_" + std::to_string(j) + " fails on '" + g + "'");
        }
}

Simp parse_face_expr(const std::string& expr) {
    if (expr.rfind("s_{", 0) != 0) return Simp{{}, expr};
    size_t close = expr.find('}');
    if (close == std::string::npos)
        throw std::runtime_error("malformed face expression '" + expr + "'");
    std::vector<int> word;
    std::string inner = expr.substr(3, close - 3);
    std::stringstream ss(inner);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) throw std::runtime_error("malformed degeneracy indices in '" + expr + "'");
        word.push_back(std::stoi(tok));
    }
    for (size_t i = 1; i < word.size(); ++i)
        if (word[i] >= word[i - 1])
            throw std::runtime_error("degeneracy word not canonical in '" + expr + "'");
    return Simp{std::move(word), expr.substr(close + 1)};
}

SSet load_space_json(const std::string& text, const std::string& name) {
    nlohmann::json j = nlohmann::json::parse(text);
    long top = j.at("dimensions").get<long>();
    std::vector<std::vector<std::string>> gens(top + 1);
    const auto& garr = j.at("generators");
    if ((long)garr.size() != top + 1)
        throw std::runtime_error(name + ": generators array must have dimensions+1 entries");
    for (long d = 0; d <= top; ++d)
        for (const auto& g : garr[d]) gens[d].push_back(g.get<std::string>());
    std::map<std::string, std::vector<Simp>> faces;
    if (j.contains("faces"))
        for (auto& [label, arr] : j.at("faces").items()) {
            std::vector<Simp> fs;
            for (const auto& f : arr) fs.push_back(parse_face_expr(f.get<std::string>()));
            faces[label] = std::move(fs);
        }
    return SSet(name, std::move(gens), std::move(faces));
}

namespace {

SSet make_delta(long n, bool boundary_only) {
    if (n < 0 || n > 9) throw std::runtime_error("delta/boundary builtin supports dimensions 0..9");
    if (boundary_only && n < 1) throw std::runtime_error("boundary builtin needs dimension >= 1");
    long top = boundary_only ? n - 1 : n;
    std::vector<std::vector<std::string>> gens(top + 1);
    std::map<std::string, std::vector<Simp>> faces;
    // subsets of {0..n} as increasing digit strings
    for (long mask = 1; mask < (1L << (n + 1)); ++mask) {
        std::string label;
        for (long v = 0; v <= n; ++v)
            if (mask & (1L << v)) label += (char)('0' + v);
        long d = (long)label.size() - 1;
        if (d > top) continue;
        gens[d].push_back(label);
        if (d >= 1) {
            std::vector<Simp> fs;
            for (long i = 0; i <= d; ++i) {
                std::string f = label;
                f.erase(f.begin() + i);
                fs.push_back(Simp{{}, f});
            }
            faces[label] = std::move(fs);
        }
    }
    for (auto& v : gens) std::sort(v.begin(), v.end());
    std::string nm = (boundary_only ? "boundary:" : "delta:") + std::to_string(n);
    return SSet(nm, std::move(gens), std::move(faces));
}

SSet make_surface(const std::string& name, long nverts, long vbase,
                  const std::vector<std::array<int, 3>>& tris) {
    std::vector<std::vector<std::string>> gens(3);
    std::map<std::string, std::vector<Simp>> faces;
    auto vlab = [&](int a) { return "v" + std::to_string(a); };
    auto elab = [&](int a, int b) { return "e" + std::to_string(a) + std::to_string(b); };
    for (long v = vbase; v < vbase + nverts; ++v) gens[0].push_back(vlab((int)v));
    std::set<std::pair<int, int>> edges;
    for (auto [a, b, c] : tris) {
        edges.insert({a, b});
        edges.insert({a, c});
        edges.insert({b, c});
    }
    for (auto [a, b] : edges) {
        gens[1].push_back(elab(a, b));
        faces[elab(a, b)] = {Simp{{}, vlab(b)}, Simp{{}, vlab(a)}};
    }
    for (auto [a, b, c] : tris) {
        std::string t = "t" + std::to_string(a) + std::to_string(b) + std::to_string(c);
        gens[2].push_back(t);
        faces[t] = {Simp{{}, elab(b, c)}, Simp{{}, elab(a, c)}, Simp{{}, elab(a, b)}};
    }
    return SSet(name, std::move(gens), std::move(faces));
}

} // namespace

bool is_builtin_space(const std::string& w) {
    if (w.rfind("delta:", 0) == 0 || w.rfind("boundary:", 0) == 0) return true;
    return w == "s1-min" || w == "s2-min" || w == "rp2" || w == "torus";
}

std::vector<std::string> builtin_space_names() {
    return {"delta:n", "boundary:n", "s1-min", "s2-min", "rp2", "torus"};
}

SSet builtin_space(const std::string& which) {
    if (which.rfind("delta:", 0) == 0) return make_delta(std::stol(which.substr(6)), false);
    if (which.rfind("boundary:", 0) == 0) return make_delta(std::stol(which.substr(9)), true);
    if (which == "s1-min")
        return SSet("s1-min", {{"v"}, {"e"}},
                    {{"e", {Simp{{}, "v"}, Simp{{}, "v"}}}});
    if (which == "s2-min")
        return SSet("s2-min", {{"b"}, {}, {"w"}},
                    {{"w", {Simp{{0}, "b"}, Simp{{0}, "b"}, Simp{{0}, "b"}}}});
    if (which == "rp2") {
        // 6-vertex triangulation of the projective plane (vertex links are
        // 5-cycles; Euler characteristic 1)
        std::vector<std::array<int, 3>> tris = {
            {1, 2, 3}, {1, 3, 4}, {1, 4, 5}, {1, 5, 6}, {1, 2, 6},
            {2, 3, 5}, {3, 4, 6}, {2, 4, 5}, {3, 5, 6}, {2, 4, 6}};
        return make_surface("rp2", 6, 1, tris);
    }
    if (which == "torus") {
        // 7-vertex torus: triangles {i,i+1,i+3} and {i,i+2,i+3} mod 7
        std::vector<std::array<int, 3>> tris;
        for (int i = 0; i < 7; ++i) {
            std::array<int, 3> a = {i, (i + 1) % 7, (i + 3) % 7};
            std::array<int, 3> b = {i, (i + 2) % 7, (i + 3) % 7};
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            tris.push_back(a);
            tris.push_back(b);
        }
        return make_surface("torus", 7, 0, tris);
    }
    throw std::runtime_error("unknown builtin space '" + which + "'");
}

SimplicialChain chain_of(const SSet& X, const std::string& gen_label, const Rat& c) {
    SimplicialChain ch;
    ch.space = &X;
    ch.degree = X.gen_dim(gen_label);
    ch.add(gen_label, c);
    return ch;
}

SimplicialChain boundary(const SimplicialChain& c) {
    SimplicialChain out;
    out.space = c.space;
    out.degree = c.degree - 1;
    if (c.degree == 0) {
        out.degree = 0;
        return out;
    }
    const SSet& X = *c.space;
    for (auto& [label, coef] : c.terms) {
        Simp s = X.simp(label);
        for (int i = 0; i <= c.degree; ++i) {
            Simp f = X.face(s, i);
            if (f.is_degenerate()) continue;
            out.add(f.gen, (i % 2 == 0) ? coef : Rat(-coef));
        }
    }
    return out;
}

TensorChain aw_coproduct(const SimplicialChain& c) {
    TensorChain out;
    out.space = c.space;
    const SSet& X = *c.space;
    for (auto& [label, coef] : c.terms)
        for (auto& [front, back] : X.aw_pairs(X.simp(label))) {
            if (front.is_degenerate() || back.is_degenerate()) continue;
            out.add(front.gen, back.gen, coef);
        }
    return out;
}

ChainComplex simplicial_chain_complex(const SSet& X) {
    ChainComplex c;
    long top = X.top_dim();
    c.basis.resize(top + 1);
    c.diff.resize(top + 1);
    for (long d = 0; d <= top; ++d) c.basis[d] = X.generators(d);
    c.diff[0] = IntMat(0, (long)c.basis[0].size());
    for (long d = 1; d <= top; ++d) {
        IntMat m((long)c.basis[d - 1].size(), (long)c.basis[d].size());
        for (long col = 0; col < (long)c.basis[d].size(); ++col) {
            Simp s = X.simp(c.basis[d][col]);
            for (int i = 0; i <= d; ++i) {
                Simp f = X.face(s, i);
                if (f.is_degenerate()) continue;
                m.add(X.gen_index(f.gen), col, (i % 2 == 0) ? Int(1) : Int(-1));
            }
        }
        c.diff[d] = std::move(m);
    }
    c.validate();
    return c;
}

void Necklace::validate() const {
    const SSet& X = *space;
    long total = 0;
    for (long b : block_sizes) {
        if (b <= 0) throw std::runtime_error("necklace: empty block");
        total += b;
    }
    if (total != (long)beads.size())
        throw std::runtime_error("necklace: grouping does not partition the beads");
    for (size_t i = 0; i < beads.size(); ++i) {
        if (beads[i].is_degenerate())
            throw std::runtime_error("necklace: degenerate bead");
        if (i + 1 < beads.size() && X.last_vertex(beads[i]) != X.first_vertex(beads[i + 1]))
            throw std::runtime_error("necklace: joint mismatch after bead " + std::to_string(i));
    }
}

} // namespace cobarlab
