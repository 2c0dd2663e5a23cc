#include "skewfd/lattice.hpp"

#include <algorithm>
#include <map>
#include <queue>

namespace skewfd {

std::string kind_name(LatticeKind k) {
    switch (k) {
        case LatticeKind::line1d: return "line1d";
        case LatticeKind::square2d: return "square2d";
        case LatticeKind::triangular2d: return "triangular2d";
        case LatticeKind::cubic3d: return "cubic3d";
        case LatticeKind::fcc3d: return "fcc3d";
    }
    throw std::logic_error("bad kind");
}

LatticeKind kind_from_name(const std::string& s) {
    if (s == "line1d") return LatticeKind::line1d;
    if (s == "square2d") return LatticeKind::square2d;
    if (s == "triangular2d") return LatticeKind::triangular2d;
    if (s == "cubic3d") return LatticeKind::cubic3d;
    if (s == "fcc3d") return LatticeKind::fcc3d;
    throw std::invalid_argument("unknown lattice kind: " + s);
}

static Lattice make(LatticeKind k, int d, int n, double h) {
    if (n < 1) throw std::invalid_argument("extent must be positive");
    if (h <= 0) throw std::invalid_argument("spacing must be positive");
    Lattice lat;
    lat.kind = k;
    lat.d = d;
    lat.extent.assign(d, n);
    lat.periodic.assign(d, true);
    lat.h = h;
    return lat;
}

Lattice Lattice::line1d(int n, double h) { return make(LatticeKind::line1d, 1, n, h); }
Lattice Lattice::square2d(int n, double h) { return make(LatticeKind::square2d, 2, n, h); }
Lattice Lattice::triangular2d(int n, double h) { return make(LatticeKind::triangular2d, 2, n, h); }
Lattice Lattice::cubic3d(int n, double h) { return make(LatticeKind::cubic3d, 3, n, h); }

Lattice Lattice::fcc3d(int n, double h) {
    if (n % 2 != 0) throw std::invalid_argument("fcc3d extent must be even");
    return make(LatticeKind::fcc3d, 3, n, h);
}

IVec Lattice::wrap(IVec l) const {
    if ((int)l.size() != d) throw std::invalid_argument("index dimension mismatch");
    for (int k = 0; k < d; ++k) {
        if (periodic[k]) {
            l[k] = ((l[k] % extent[k]) + extent[k]) % extent[k];
        } else if (l[k] < 0 || l[k] >= extent[k]) {
            throw std::out_of_range("index out of range on non-periodic dimension");
        }
    }
    return l;
}

bool Lattice::on_lattice(const IVec& l) const {
    if (kind != LatticeKind::fcc3d) return true;
    long s = 0;
    for (int v : l) s += v;
    return ((s % 2) + 2) % 2 == 0;
}

DVec Lattice::coords(const IVec& l) const {
    if ((int)l.size() != d) throw std::invalid_argument("index dimension mismatch");
    if (kind == LatticeKind::triangular2d) {
        // oblique basis (1,0), (1/2, sqrt(3)/2)
        return {h * (l[0] + 0.5 * l[1]), h * (std::sqrt(3.0) / 2.0 * l[1])};
    }
    DVec x(d);
    for (int k = 0; k < d; ++k) x[k] = h * l[k];
    return x;
}

std::vector<IVec> Lattice::neighbor_offsets() const {
    switch (kind) {
        case LatticeKind::line1d:
            return {{1}, {-1}};
        case LatticeKind::square2d:
            return {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        case LatticeKind::triangular2d:
            return {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}};
        case LatticeKind::cubic3d:
            return {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
        case LatticeKind::fcc3d: {
            std::vector<IVec> offs;
            for (int a = 0; a < 3; ++a)
                for (int b = a + 1; b < 3; ++b)
                    for (int sa : {1, -1})
                        for (int sb : {1, -1}) {
                            IVec o(3, 0);
                            o[a] = sa;
                            o[b] = sb;
                            offs.push_back(o);
                        }
            return offs;
        }
    }
    throw std::logic_error("bad kind");
}

int Lattice::graph_distance(const IVec& a, const IVec& b) const {
    IVec wa = wrap(a), wb = wrap(b);
    if (wa == wb) return 0;
    auto offs = neighbor_offsets();
    std::map<IVec, int> dist;
    std::queue<IVec> q;
    dist[wa] = 0;
    q.push(wa);
    while (!q.empty()) {
        IVec cur = q.front();
        q.pop();
        for (const auto& o : offs) {
            IVec nxt(d);
            for (int k = 0; k < d; ++k) nxt[k] = cur[k] + o[k];
            nxt = wrap(nxt);
            if (dist.count(nxt)) continue;
            dist[nxt] = dist[cur] + 1;
            if (nxt == wb) return dist[nxt];
            q.push(nxt);
        }
    }
    throw std::runtime_error("sites not connected");
}

double Lattice::euclidean_distance(const IVec& a, const IVec& b) const {
    IVec wa = wrap(a), wb = wrap(b);
    // minimal distance over wrap images of b
    double best = -1;
    IVec shift(d, 0);
    std::vector<int> choices;
    for (int k = 0; k < d; ++k) choices.push_back(periodic[k] ? 3 : 1);
    long total = 1;
    for (int c : choices) total *= c;
    for (long idx = 0; idx < total; ++idx) {
        long rem = idx;
        IVec img = wb;
        for (int k = 0; k < d; ++k) {
            int c = rem % choices[k];
            rem /= choices[k];
            if (choices[k] == 3) img[k] += (c - 1) * extent[k];
        }
        DVec xa = coords(wa), xb = coords(img);
        double s = 0;
        for (int k = 0; k < d; ++k) s += (xa[k] - xb[k]) * (xa[k] - xb[k]);
        double dd = std::sqrt(s);
        if (best < 0 || dd < best) best = dd;
    }
    return best;
}

long Lattice::box_size() const {
    long n = 1;
    for (int e : extent) n *= e;
    return n;
}

long Lattice::site_code(const IVec& l, int alpha, int m) const {
    IVec w = wrap(l);
    if (!on_lattice(w)) throw std::invalid_argument("site not on lattice");
    long flat = 0;
    for (int k = 0; k < d; ++k) flat = flat * extent[k] + w[k];
    return flat * m + alpha;
}

IVec Lattice::site_from_code(long code, int m, int* alpha) const {
    if (alpha) *alpha = (int)(code % m);
    long flat = code / m;
    IVec l(d);
    for (int k = d - 1; k >= 0; --k) {
        l[k] = (int)(flat % extent[k]);
        flat /= extent[k];
    }
    return l;
}

std::vector<IVec> Lattice::all_sites() const {
    std::vector<IVec> out;
    IVec l(d, 0);
    while (true) {
        if (on_lattice(l)) out.push_back(l);
        int k = d - 1;
        while (k >= 0) {
            if (++l[k] < extent[k]) break;
            l[k] = 0;
            --k;
        }
        if (k < 0) break;
    }
    return out;
}

} // namespace skewfd
