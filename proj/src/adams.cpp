#include "cobarlab/adams.hpp"

#include <mutex>
#include <sstream>
#include <stdexcept>

namespace cobarlab {

namespace {

std::mutex theta_mutex;
std::mutex delta_mutex;

Poly C1() { return Poly::constant(Rat(1)); }

// pushforward of a realization-valued map through polynomial vertex images:
// images[source vertex index] = barycentric coefficients in the target top
// simplex (each summing to 1)
PPMap push_affine(const PPMap& track, const SSet& src, const SSet& dst, const std::string& top,
                  const std::vector<std::vector<Poly>>& images) {
    PPMap r = track;
    r.model = &dst;
    long nv = dst.gen_dim(top) + 1;
    for (auto& piece : r.pieces) {
        std::vector<Poly> comp((size_t)nv, Poly::zero());
        for (size_t j = 0; j < piece.comp.size(); ++j) {
            long vi = src.gen_index(src.vertex(piece.carrier, (long)j));
            for (long k = 0; k < nv; ++k) comp[k] += piece.comp[j] * images[vi][k];
        }
        piece.comp = comp;
        piece.carrier = dst.simp(top);
    }
    return r;
}

MooreFamily theta_build(long n);

const MooreFamily& theta_memo(long n) {
    static std::map<long, MooreFamily> memo;
    {
        std::lock_guard<std::mutex> lock(theta_mutex);
        auto it = memo.find(n);
        if (it != memo.end()) return it->second;
    }
    MooreFamily built = theta_build(n);  // recursive, so outside the lock
    std::lock_guard<std::mutex> lock(theta_mutex);
    return memo.emplace(n, std::move(built)).first->second;
}

MooreFamily theta_build(long n) {
    if (n < 1) throw std::invalid_argument("theta needs n >= 1");
    const SSet& Dn = delta_space(n);
    if (n == 1) return edge_moore(Dn, "01");
    const SSet& Dp = delta_space(n - 1);
    const MooreFamily& prev = theta_memo(n - 1);
    long m = n - 1;
    int tvar = (int)(n - 2);
    int svar = (int)m;
    Poly t = Poly::var(tvar);

    PPMap prev_len = prev.len;
    prev_len.m = m;
    PPMap len = scalar_add(prev_len, scalar_map(t, m));

    PPMap track;
    track.m = m;
    track.free_vars = 1;
    track.target = TargetKind::Realization;
    track.model = &Dn;
    const std::string top = Dn.generators(n)[0];

    // the homotopy between the inner face d_{n-1} (at t = 0) and the first
    // face inclusion (at t = 1); vertex n-1 slides from v_n toward itself
    std::vector<std::vector<Poly>> images((size_t)n, std::vector<Poly>((size_t)n + 1, Poly::zero()));
    for (long j = 0; j + 1 < n; ++j) images[j][j] = C1();
    images[n - 1][n - 1] = t;
    images[n - 1][n] = C1() - t;

    PPMap moved = prev.track;
    auto ren = [&](int v) { return v == tvar ? svar : v; };
    for (auto& piece : moved.pieces) {
        for (auto& g : piece.ge) g = g.rename(ren);
        for (auto& c : piece.comp) c = c.rename(ren);
    }
    PPMap pushed = push_affine(moved, Dp, Dn, top, images);
    track.pieces = pushed.pieces;

    // affine tail segment of length t onto v_n
    for (auto& lp : prev.len.pieces) {
        PPPiece p;
        p.carrier = Dn.simp(top);
        Poly sp = Poly::var(svar) - lp.comp[0];
        p.ge = lp.ge;
        p.ge.push_back(sp);
        p.ge.push_back(t - sp);
        p.comp.assign((size_t)n + 1, Poly::zero());
        p.comp[n - 1] = t - sp;
        p.comp[n] = C1() - t + sp;
        track.pieces.push_back(p);
    }
    return make_moore(Dn, Dn.generators(0)[0], Dn.generators(0)[n], len, track);
}

// theta(k) pushed into the standard n-simplex along the vertex map j -> img[j]
MooreFamily theta_vertex_push(long k, long n, const std::vector<long>& img) {
    return push_theta_affine(delta_space(n), delta_space(n).generators(n)[0], img);
}

// image of a standard-simplex simplex under the characteristic map of sigma
Simp simplex_image(const SSet& Dn, const Simp& s, const SSet& X, const std::string& sigma) {
    long n = X.gen_dim(sigma);
    std::vector<bool> keep((size_t)n + 1, false);
    for (char ch : s.gen) keep[ch - '0'] = true;
    Simp img = X.simp(sigma);
    for (long j = n; j >= 0; --j)
        if (!keep[j]) img = X.face(img, (int)j);
    for (auto it = s.degen.rbegin(); it != s.degen.rend(); ++it) img = X.degenerate(img, *it);
    (void)Dn;
    return img;
}

} // namespace

const SSet& delta_space(long n) {
    static std::map<long, SSet> memo;
    std::lock_guard<std::mutex> lock(delta_mutex);
    auto it = memo.find(n);
    if (it == memo.end()) {
        std::ostringstream os;
        os << "delta:" << n;
        it = memo.emplace(n, builtin_space(os.str())).first;
    }
    return it->second;
}

const MooreFamily& theta(long n) { return theta_memo(n); }

Tri theta_boundary_identity(long n, int depth) {
    if (n < 2) return Tri::Yes;  // empty identity in dimension <= 0
    MooreChain lhs = moore_boundary(moore_chain(theta(n)));
    MooreChain rhs;
    for (long i = 1; i <= n - 1; ++i) {
        Rat sign = i % 2 ? Rat(-1) : Rat(1);
        // first i-face then last (n-i)-face, concatenated
        std::vector<long> first, last, inner;
        for (long j = 0; j <= i; ++j) first.push_back(j);
        for (long j = 0; j <= n - i; ++j) last.push_back(i + j);
        rhs += concat_moore(moore_chain(theta_vertex_push(i, n, first)),
                            moore_chain(theta_vertex_push(n - i, n, last))) *
               sign;
        for (long j = 0; j <= n - 1; ++j) inner.push_back(j < i ? j : j + 1);
        rhs += moore_chain(theta_vertex_push(n - 1, n, inner)) * (-sign);
    }
    return moore_chain_equal(lhs, rhs, depth);
}

MooreFamily push_theta_affine(const SSet& X, const std::string& top, const std::vector<long>& img) {
    long k = (long)img.size() - 1;
    if (k < 1) throw std::invalid_argument("push_theta_affine needs at least two vertex images");
    const MooreFamily& th = theta(k);
    const SSet& Dk = delta_space(k);
    long n = X.gen_dim(top);
    std::vector<std::vector<Poly>> images((size_t)k + 1,
                                          std::vector<Poly>((size_t)n + 1, Poly::zero()));
    for (long j = 0; j <= k; ++j) images[j][img[j]] = C1();
    PPMap track = push_affine(th.track, Dk, X, top, images);
    Simp t = X.simp(top);
    return make_moore(X, X.vertex(t, img[0]), X.vertex(t, img[k]), th.len, track);
}

MooreFamily push_theta(const SSet& X, const std::string& sigma) {
    long n = X.gen_dim(sigma);
    if (n < 1) throw std::invalid_argument("push_theta needs dimension >= 1");
    const MooreFamily& th = theta(n);
    const SSet& Dn = delta_space(n);
    PPMap track = th.track;
    track.model = &X;
    for (auto& piece : track.pieces)
        piece.carrier = simplex_image(Dn, piece.carrier, X, sigma);
    Simp s = X.simp(sigma);
    return make_moore(X, X.first_vertex(s), X.last_vertex(s), th.len, track);
}

MooreChain adams_on_simplex(const SSet& X, const std::string& sigma) {
    if (X.gen_dim(sigma) < 1) return {};
    return moore_chain(push_theta(X, sigma));
}

MooreChain adams_on_chain(const SSet& X, const SimplicialChain& c) {
    MooreChain out;
    for (auto& [label, coeff] : c.terms) {
        if (X.gen_dim(label) < 1) continue;
        out += adams_on_simplex(X, label) * coeff;
    }
    return out;
}

MooreChain adams_on_word(const SSet& X, const BoxWord& w) {
    validate_box_word(X, w);
    if (w.letters.empty()) return moore_chain(constant_moore(X, w.src));
    MooreChain out = adams_on_simplex(X, w.letters.front());
    for (size_t i = 1; i < w.letters.size(); ++i)
        out = concat_moore(out, adams_on_simplex(X, w.letters[i]));
    return out;
}

McReport verify_mc_tuned(const SSet& X, long max_dim, int depth, int aw_mode, int h_sign,
                         int t_sign) {
    McReport rep;
    CatCoalg cc = cat_coalg(X);
    for (long d = 1; d <= std::min(max_dim, X.top_dim()); ++d) {
        for (auto& sigma : X.generators(d)) {
            SimplicialChain sc = chain_of(X, sigma);
            MooreChain lhs = moore_boundary(adams_on_simplex(X, sigma));
            lhs += adams_on_chain(X, tilde_boundary(cc, sc)) * Rat(t_sign);
            MooreChain rhs;
            for (auto& [pair, coeff] : aw_coproduct(sc).terms) {
                long p = X.gen_dim(pair.first), q = X.gen_dim(pair.second);
                if (p < 1 || q < 1) continue;
                Rat sign(1);
                long exp = aw_mode == 1 || aw_mode == 2 ? p : (aw_mode == 3 || aw_mode == 4 ? q : 0);
                if (exp % 2) sign = -sign;
                if (aw_mode == 2 || aw_mode == 4 || aw_mode == 6) sign = -sign;
                rhs += concat_moore(adams_on_simplex(X, pair.first),
                                    adams_on_simplex(X, pair.second)) *
                       (coeff * sign);
            }
            Rat hv = curvature(cc, sc);
            if (hv != 0)
                rhs += moore_chain(constant_moore(X, X.last_vertex(X.simp(sigma)))) *
                       (hv * Rat(h_sign));
            Tri res = moore_chain_equal(lhs, rhs, depth);
            if (res == Tri::No) {
                rep.pass = false;
                rep.failures.push_back(sigma);
            } else if (res == Tri::Undecided) {
                rep.pass = false;
                rep.undecided.push_back(sigma);
            }
        }
    }
    return rep;
}

McReport verify_mc(const SSet& X, long max_dim, int depth) {
    // sign conventions fixed by machine search over the standard simplices:
    // bd(A sigma) + A(twisted bd sigma) = sum (-1)^p concat(A front, A back)
    //   + curvature * const;
    // the unique survivor at dimension 3 among the 24 sign assignments
    return verify_mc_tuned(X, max_dim, depth, 1, 1, 1);
}

} // namespace cobarlab
