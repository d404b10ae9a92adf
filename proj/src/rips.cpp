#include "tda/rips.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

#include "tda/kernels.hpp"

namespace tda {

// --- packed combinatorial keys ------------------------------------------------

namespace {

// C(v, r) rows for r in [1, 5]; grown on demand, thread-local so unpacking
// needs no locking.
struct BinomTable {
    std::vector<std::uint64_t> rows[6];  // rows[r][v] = C(v, r), r in 1..5

    void ensure(std::uint32_t n) {
        for (int r = 1; r <= 5; ++r) {
            auto& row = rows[r];
            std::size_t old = row.size();
            if (old >= n + 1u) continue;
            row.resize(n + 1u);
            for (std::size_t v = old; v <= n; ++v) {
                if (v == 0) {
                    row[v] = 0;
                    continue;
                }
                if (r == 1) {
                    row[v] = v;
                    continue;
                }
                // C(v, r) = C(v-1, r) + C(v-1, r-1), saturating at uint64 max.
                std::uint64_t a = row[v - 1];
                std::uint64_t b = rows[r - 1][v - 1];
                row[v] = (a > std::numeric_limits<std::uint64_t>::max() - b)
                             ? std::numeric_limits<std::uint64_t>::max()
                             : a + b;
            }
        }
    }

    std::uint64_t operator()(std::uint32_t v, int r) {
        if (r == 0) return 1;
        ensure(v);
        return rows[r][v];
    }
};

thread_local BinomTable g_binom;

}  // namespace

std::uint64_t pack_simplex(const std::uint32_t* vertices, int dim) {
    std::uint64_t key = 0;
    for (int i = 0; i <= dim; ++i) key += g_binom(vertices[i], i + 1);
    return key;
}

void unpack_simplex(std::uint64_t key, int dim, std::uint32_t* out) {
    for (int i = dim; i >= 0; --i) {
        int r = i + 1;
        const auto& row = g_binom.rows[r];
        // largest v with C(v, r) <= key
        auto it = std::upper_bound(row.begin(), row.end(), key);
        std::uint32_t v = static_cast<std::uint32_t>((it - row.begin()) - 1);
        out[i] = v;
        key -= row[v];
    }
}

bool lex_less(std::uint64_t a, std::uint64_t b, int dim) {
    std::uint32_t va[5], vb[5];
    unpack_simplex(a, dim, va);
    unpack_simplex(b, dim, vb);
    for (int i = 0; i <= dim; ++i) {
        if (va[i] != vb[i]) return va[i] < vb[i];
    }
    return false;
}

// --- Filtration accessors -------------------------------------------------------

std::size_t Filtration::count(int d) const {
    if (d < 0 || d > max_simplex_dim()) return 0;
    return dims_[d].size();
}

double Filtration::value(int d, std::size_t i) const { return dims_[d][i].value; }
std::uint64_t Filtration::key(int d, std::size_t i) const { return dims_[d][i].key; }

const std::vector<SimplexEntry>& Filtration::entries(int d) const {
    require(d >= 0 && d <= max_simplex_dim(), "validation", "simplex dimension out of range");
    return dims_[d];
}

std::array<std::uint32_t, 5> Filtration::vertices(int d, std::size_t i) const {
    std::array<std::uint32_t, 5> out{};
    g_binom.ensure(static_cast<std::uint32_t>(n_));
    unpack_simplex(dims_[d][i].key, d, out.data());
    return out;
}

void Filtration::dump(const std::string& path) const {
    std::ofstream out(path);
    require(out.good(), "io", "cannot write '" + path + "'");
    int top = max_simplex_dim();
    std::vector<std::size_t> pos(top + 1, 0);
    g_binom.ensure(static_cast<std::uint32_t>(n_));
    for (;;) {
        int pick = -1;
        for (int d = 0; d <= top; ++d) {
            if (pos[d] >= dims_[d].size()) continue;
            if (pick < 0) {
                pick = d;
                continue;
            }
            const auto& a = dims_[d][pos[d]];
            const auto& b = dims_[pick][pos[pick]];
            // (value, dim, lex); d > pick here so value must be strictly lower.
            if (a.value < b.value) pick = d;
        }
        if (pick < 0) break;
        const auto& e = dims_[pick][pos[pick]++];
        std::uint32_t vs[5];
        unpack_simplex(e.key, pick, vs);
        out << format_double(e.value) << ' ' << pick;
        for (int i = 0; i <= pick; ++i) out << ' ' << vs[i];
        out << '\n';
    }
    require(out.good(), "io", "write failed for '" + path + "'");
}

// --- construction ----------------------------------------------------------------

double resolve_threshold(const PointCloud& cloud, const RipsParams& params) {
    switch (params.policy) {
        case RipsParams::ThresholdPolicy::enclosing:
            return cloud.enclosing_radius();
        case RipsParams::ThresholdPolicy::diameter:
            return cloud.diameter();
        case RipsParams::ThresholdPolicy::fixed:
            require(params.threshold_value >= 0.0 && std::isfinite(params.threshold_value), "validation",
                    "fixed Rips threshold must be finite and >= 0");
            return params.threshold_value;
    }
    fail("validation", "unknown threshold policy");
}

namespace {

// Pairwise distances, cached as a dense matrix when the cloud is small
// enough; otherwise computed on demand.
struct DistanceSource {
    const PointCloud& cloud;
    std::vector<double> dense;
    std::size_t n;

    DistanceSource(const PointCloud& c, std::size_t cache_cap) : cloud(c), n(c.size()) {
        if (c.metric() == PointCloud::Metric::explicit_matrix) {
            dense = c.matrix();
            return;
        }
        if (n <= cache_cap) {
            dense.resize(n * n);
            const auto& ops = kernels::active();
            std::vector<double> q(c.dim());
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t d = 0; d < c.dim(); ++d) q[d] = c.soa()[d * n + i];
                ops.sq_dist_batch(q.data(), c.soa(), n, c.dim(), dense.data() + i * n);
            }
            for (auto& v : dense) v = std::sqrt(v);
        }
    }

    double operator()(std::size_t i, std::size_t j) const {
        if (!dense.empty()) return dense[i * n + j];
        return cloud.dist(i, j);
    }
};

struct ExpansionSink {
    // One of the two is active: stored entries or bare counters.
    std::vector<std::vector<SimplexEntry>>* store = nullptr;
    std::vector<std::size_t>* counters = nullptr;

    void emit(int dim, double value, const std::uint32_t* verts) {
        if (counters) {
            (*counters)[dim]++;
            return;
        }
        (*store)[dim].push_back({value, pack_simplex(verts, dim)});
    }
};

// Depth-first clique expansion: extend each simplex by vertices below its
// minimum, intersecting lower-neighbor lists while descending.  Emits
// simplex dimensions >= 2 only; vertices and edges are handled by callers.
struct Expander {
    const DistanceSource& dist;
    const std::vector<std::vector<std::uint32_t>>& low;
    int top_dim;
    ExpansionSink& sink;
    // Scratch candidate set per recursion depth (indexed by simplex dim).
    std::vector<std::vector<std::uint32_t>> cand;
    // The current simplex of dimension d occupies tuple[5-d .. 5] in
    // ascending order; an extension writes one slot further down.
    std::uint32_t tuple[6] = {};

    Expander(const DistanceSource& ds, const std::vector<std::vector<std::uint32_t>>& lo, int top,
             ExpansionSink& s)
        : dist(ds), low(lo), top_dim(top), sink(s), cand(top + 1) {}

    void run(int dim, double value) {
        if (dim >= top_dim) return;
        const auto& cs = cand[dim];
        for (std::uint32_t w : cs) {
            double v2 = value;
            for (int i = 5 - dim; i <= 5; ++i) {
                double dw = dist(w, tuple[i]);
                if (dw > v2) v2 = dw;
            }
            tuple[4 - dim] = w;
            sink.emit(dim + 1, v2, &tuple[4 - dim]);
            if (dim + 1 < top_dim) {
                auto& next = cand[dim + 1];
                next.clear();
                std::set_intersection(cs.begin(), cs.end(), low[w].begin(), low[w].end(),
                                      std::back_inserter(next));
                run(dim + 1, v2);
            }
        }
    }
};

void expand_from_edges(const DistanceSource& dist, const std::vector<std::vector<std::uint32_t>>& low,
                       int top_dim, ExpansionSink& sink) {
    if (top_dim < 2) return;
    std::size_t n = low.size();
    Expander ex(dist, low, top_dim, sink);
    for (std::uint32_t v = 0; v < n; ++v) {
        for (std::uint32_t u : ex.low[v]) {
            ex.tuple[4] = u;
            ex.tuple[5] = v;
            auto& c1 = ex.cand[1];
            c1.clear();
            std::set_intersection(low[u].begin(), low[u].end(), low[v].begin(), low[v].end(),
                                  std::back_inserter(c1));
            ex.run(1, dist(u, v));
        }
    }
}

}  // namespace

Filtration build_rips(const PointCloud& cloud, const RipsParams& params) {
    require(params.max_dim >= 0, "validation", "max homology dimension must be >= 0");
    require(params.max_dim <= params.max_dim_cap, "validation",
            "max homology dimension " + std::to_string(params.max_dim) + " exceeds the configured cap " +
                std::to_string(params.max_dim_cap));
    require(params.budget > 0, "validation", "simplex budget must be positive");
    double threshold = resolve_threshold(cloud, params);

    std::size_t n = cloud.size();
    int top_dim = params.max_dim + 1;

    // Key packing must fit 64 bits for the largest possible tuple.
    g_binom.ensure(static_cast<std::uint32_t>(n));
    {
        std::uint64_t worst = 0;
        for (int i = 0; i <= top_dim; ++i) {
            std::uint64_t c = g_binom(static_cast<std::uint32_t>(n - top_dim + i), i + 1);
            require(std::numeric_limits<std::uint64_t>::max() - worst > c, "validation",
                    "cloud too large to index simplices of this dimension");
            worst += c;
        }
    }

    DistanceSource dist(cloud, params.distance_cache_cap);

    // Lower-neighbor lists.
    std::vector<std::vector<std::uint32_t>> low(n);
    std::size_t edge_count = 0;
    for (std::size_t v = 1; v < n; ++v) {
        for (std::size_t u = 0; u < v; ++u) {
            if (dist(u, v) <= threshold) {
                low[v].push_back(static_cast<std::uint32_t>(u));
                ++edge_count;
            }
        }
    }

    // Budget check on cheap upper bounds before any expansion.
    {
        double running = static_cast<double>(n);
        require(running <= params.budget, "complexity-budget",
                "estimated simplex count exceeds budget in dimension 0");
        running += static_cast<double>(edge_count);
        require(running <= params.budget, "complexity-budget",
                "estimated simplex count exceeds budget in dimension 1");
        for (int d = 2; d <= top_dim; ++d) {
            double est = 0.0;
            for (std::size_t v = 0; v < n; ++v) {
                double k = static_cast<double>(low[v].size());
                // C(k, d) computed in floating point
                double c = 1.0;
                for (int i = 0; i < d; ++i) c = c * (k - i) / (i + 1);
                if (c > 0) est += c;
            }
            running += est;
            require(running <= params.budget, "complexity-budget",
                    "estimated simplex count exceeds budget in dimension " + std::to_string(d));
        }
    }

    Filtration f;
    f.n_ = n;
    f.max_dim_ = params.max_dim;
    f.threshold_ = threshold;
    f.dims_.resize(top_dim + 1);

    // Vertices and edges.
    auto& verts0 = f.dims_[0];
    verts0.resize(n);
    for (std::size_t v = 0; v < n; ++v) verts0[v] = {0.0, v};
    auto& edges = f.dims_[1];
    edges.reserve(edge_count);
    for (std::uint32_t v = 0; v < n; ++v) {
        for (std::uint32_t u : low[v]) {
            std::uint32_t tuple[2] = {u, v};
            edges.push_back({dist(u, v), pack_simplex(tuple, 1)});
        }
    }

    ExpansionSink sink;
    sink.store = &f.dims_;
    expand_from_edges(dist, low, top_dim, sink);

    // Per-dimension (value, lex) order; ties on value fall back to the
    // lexicographic vertex order the global filtration order requires.
    // Geometric data ties heavily (simplices sharing their longest edge share
    // a value), so unpack every key once up front instead of per comparison.
    for (int d = 1; d <= top_dim; ++d) {
        auto& entries = f.dims_[d];
        const std::size_t m = entries.size();
        std::vector<std::array<std::uint32_t, 5>> vtab(m);
        for (std::size_t i = 0; i < m; ++i) unpack_simplex(entries[i].key, d, vtab[i].data());
        std::vector<std::uint32_t> perm(m);
        for (std::size_t i = 0; i < m; ++i) perm[i] = static_cast<std::uint32_t>(i);
        std::sort(perm.begin(), perm.end(), [&entries, &vtab, d](std::uint32_t a, std::uint32_t b) {
            if (entries[a].value != entries[b].value) return entries[a].value < entries[b].value;
            const auto& va = vtab[a];
            const auto& vb = vtab[b];
            for (int i = 0; i <= d; ++i)
                if (va[i] != vb[i]) return va[i] < vb[i];
            return false;
        });
        std::vector<SimplexEntry> ordered(m);
        for (std::size_t i = 0; i < m; ++i) ordered[i] = entries[perm[i]];
        entries = std::move(ordered);
    }
    return f;
}

Filtration build_rips(const PointCloud& cloud, int max_dim, double threshold) {
    RipsParams p;
    p.max_dim = max_dim;
    p.policy = RipsParams::ThresholdPolicy::fixed;
    p.threshold_value = threshold;
    return build_rips(cloud, p);
}

std::vector<std::size_t> count_simplices(const PointCloud& cloud, int max_simplex_dim, double threshold) {
    require(max_simplex_dim >= 0 && max_simplex_dim <= 4, "validation",
            "simplex dimension must be between 0 and 4");
    require(threshold >= 0.0 && std::isfinite(threshold), "validation", "threshold must be finite and >= 0");
    std::size_t n = cloud.size();
    g_binom.ensure(static_cast<std::uint32_t>(n));
    RipsParams params;
    DistanceSource dist(cloud, params.distance_cache_cap);
    std::vector<std::vector<std::uint32_t>> low(n);
    std::size_t edge_count = 0;
    for (std::size_t v = 1; v < n; ++v) {
        for (std::size_t u = 0; u < v; ++u) {
            if (dist(u, v) <= threshold) {
                low[v].push_back(static_cast<std::uint32_t>(u));
                ++edge_count;
            }
        }
    }
    std::vector<std::size_t> counts(max_simplex_dim + 1, 0);
    counts[0] = n;
    if (max_simplex_dim >= 1) counts[1] = edge_count;
    if (max_simplex_dim >= 2) {
        ExpansionSink sink;
        sink.counters = &counts;
        expand_from_edges(dist, low, max_simplex_dim, sink);
    }
    return counts;
}

std::vector<double> estimate_simplex_counts(const PointCloud& cloud, int max_simplex_dim, double threshold) {
    require(max_simplex_dim >= 0 && max_simplex_dim <= 4, "validation",
            "simplex dimension must be between 0 and 4");
    std::size_t n = cloud.size();
    RipsParams params;
    DistanceSource dist(cloud, params.distance_cache_cap);
    std::vector<std::size_t> lowdeg(n, 0);
    for (std::size_t v = 1; v < n; ++v)
        for (std::size_t u = 0; u < v; ++u)
            if (dist(u, v) <= threshold) ++lowdeg[v];
    std::vector<double> est(max_simplex_dim + 1, 0.0);
    est[0] = static_cast<double>(n);
    for (int d = 1; d <= max_simplex_dim; ++d) {
        double total = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            double k = static_cast<double>(lowdeg[v]);
            double c = 1.0;
            for (int i = 0; i < d; ++i) c = c * (k - i) / (i + 1);
            if (c > 0) total += c;
        }
        est[d] = total;
    }
    return est;
}

}  // namespace tda
