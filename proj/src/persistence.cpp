#include "tda/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace tda {

std::vector<DiagramPoint> PersistenceDiagram::points_of_dim(int dim) const {
    std::vector<DiagramPoint> out;
    for (const auto& p : points)
        if (p.dim == dim) out.push_back(p);
    return out;
}

std::size_t PersistenceDiagram::count_of_dim(int dim) const {
    std::size_t c = 0;
    for (const auto& p : points)
        if (p.dim == dim) ++c;
    return c;
}

namespace {

struct UnionFind {
    std::vector<std::uint32_t> parent;
    std::vector<std::uint32_t> min_vertex;

    explicit UnionFind(std::size_t n) : parent(n), min_vertex(n) {
        for (std::size_t i = 0; i < n; ++i) {
            parent[i] = static_cast<std::uint32_t>(i);
            min_vertex[i] = static_cast<std::uint32_t>(i);
        }
    }

    std::uint32_t find(std::uint32_t x) {
        std::uint32_t root = x;
        while (parent[root] != root) root = parent[root];
        while (parent[x] != root) {
            std::uint32_t next = parent[x];
            parent[x] = root;
            x = next;
        }
        return root;
    }
};

// Key -> position lookup for one simplex dimension.  Keys are colex ranks,
// so when the key space is not much larger than the row count a flat array
// beats binary search (the lookup sits on the reduction's hot path).
struct RowIndex {
    std::vector<std::uint32_t> direct;  // key -> position, when dense enough
    std::vector<std::pair<std::uint64_t, std::uint32_t>> sorted;

    explicit RowIndex(const std::vector<SimplexEntry>& entries) {
        std::uint64_t space = 0;
        for (const auto& e : entries) space = std::max(space, e.key);
        space += 1;
        const bool dense = !entries.empty() && space <= 64 * static_cast<std::uint64_t>(entries.size()) &&
                           space <= (std::uint64_t{1} << 25);
        if (dense) {
            direct.assign(space, 0);
            for (std::size_t i = 0; i < entries.size(); ++i)
                direct[entries[i].key] = static_cast<std::uint32_t>(i);
            return;
        }
        sorted.resize(entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i)
            sorted[i] = {entries[i].key, static_cast<std::uint32_t>(i)};
        std::sort(sorted.begin(), sorted.end());
    }

    std::uint32_t position(std::uint64_t key) const {
        if (!direct.empty()) return direct[key];
        auto it = std::lower_bound(sorted.begin(), sorted.end(), std::make_pair(key, std::uint32_t{0}));
        return it->second;
    }
};

struct ReductionResult {
    // (row position in dim d-1, column position in dim d)
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    std::vector<bool> row_paired;   // over dim d-1 positions
    std::vector<bool> positive_col; // over dim d positions (cleared or reduced to zero)
};

// Column reduction of the boundary matrix from dimension d to d-1 over Z/2.
// Columns arrive in filtration order; `cleared` marks columns already known
// to be positive from the (d+1)-reduction, which are skipped (twist).
//
// The working column is a bitset over row positions: geometric filtrations
// drive long pivot walks (hundreds of additions per column), and word-wise
// XOR of the sparse owner columns plus a downward scan for the new low is
// far cheaper there than merging sorted vectors.  Owner columns are stored
// fully reduced, sparse and ascending, concatenated in one arena.
ReductionResult reduce_boundary(const Filtration& f, int d, const std::vector<bool>* cleared) {
    const auto& cols = f.entries(d);
    const auto& rows = f.entries(d - 1);

    ReductionResult out;
    out.row_paired.assign(rows.size(), false);
    out.positive_col.assign(cols.size(), false);
    if (cols.empty()) return out;
    RowIndex row_index(rows);

    const std::size_t nwords = (rows.size() + 63) / 64;
    std::vector<std::uint64_t> bits(nwords, 0);
    std::vector<std::uint32_t> touched;           // dirty words of the current column
    std::vector<std::uint32_t> word_stamp(nwords, 0);
    std::uint32_t stamp = 0;

    // pivot row -> owner column, as (offset, length) into the arena
    std::vector<std::int64_t> pivot_owner(rows.size(), -1);
    std::vector<std::uint32_t> arena;
    std::vector<std::pair<std::size_t, std::uint32_t>> arena_span;

    std::uint32_t verts[6];
    std::uint32_t face[5];

    const auto flip = [&](std::uint32_t r) {
        const std::uint32_t w = r >> 6;
        if (word_stamp[w] != stamp) {
            word_stamp[w] = stamp;
            touched.push_back(w);
        }
        bits[w] ^= std::uint64_t{1} << (r & 63);
    };
    // Highest set row at or below `from`; -1 when none.  XOR with an owner
    // never sets a bit above the current low (the owner's own low equals it),
    // so lows only move down and the scans amortize.
    const auto scan_down = [&](std::int64_t from) -> std::int64_t {
        if (from < 0) return -1;
        std::size_t w = static_cast<std::size_t>(from) >> 6;
        std::uint64_t word = bits[w] & (~std::uint64_t{0} >> (63 - (from & 63)));
        for (;;) {
            if (word)
                return static_cast<std::int64_t>((w << 6) + 63 -
                                                 static_cast<std::size_t>(__builtin_clzll(word)));
            if (w == 0) return -1;
            word = bits[--w];
        }
    };

    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cleared && (*cleared)[c]) {
            out.positive_col[c] = true;
            continue;
        }
        ++stamp;
        touched.clear();
        unpack_simplex(cols[c].key, d, verts);
        std::int64_t low = -1;
        for (int drop = 0; drop <= d; ++drop) {
            int k = 0;
            for (int i = 0; i <= d; ++i)
                if (i != drop) face[k++] = verts[i];
            const std::uint32_t pos = row_index.position(pack_simplex(face, d - 1));
            flip(pos);
            low = std::max<std::int64_t>(low, pos);
        }
        for (;;) {
            if (low < 0) {
                out.positive_col[c] = true;
                break;
            }
            const std::int64_t owner = pivot_owner[low];
            if (owner < 0) {
                // New pivot: extract the reduced column, ascending.
                pivot_owner[low] = static_cast<std::int64_t>(arena_span.size());
                const std::size_t begin = arena.size();
                const std::size_t top_word = static_cast<std::size_t>(low) >> 6;
                for (std::size_t w = 0; w <= top_word; ++w) {
                    std::uint64_t word = bits[w];
                    while (word) {
                        const auto b = static_cast<std::uint32_t>(__builtin_ctzll(word));
                        arena.push_back(static_cast<std::uint32_t>(w << 6) + b);
                        word &= word - 1;
                    }
                }
                arena_span.emplace_back(begin, static_cast<std::uint32_t>(arena.size() - begin));
                out.pairs.emplace_back(static_cast<std::uint32_t>(low), static_cast<std::uint32_t>(c));
                out.row_paired[static_cast<std::size_t>(low)] = true;
                break;
            }
            // column += owner column over Z/2; the shared low bit clears.
            const auto [begin, len] = arena_span[static_cast<std::size_t>(owner)];
            for (std::uint32_t i = 0; i < len; ++i) flip(arena[begin + i]);
            low = scan_down(low - 1);
        }
        for (const std::uint32_t w : touched) bits[w] = 0;
    }
    return out;
}

}  // namespace

PersistenceDiagram compute_diagram(const Filtration& f, double t_max) {
    require(std::isfinite(t_max) && t_max > 0.0, "validation", "truncation value T must be finite and positive");

    PersistenceDiagram diagram;
    diagram.t_max = t_max;

    auto push = [&](int dim, double birth, double death) {
        if (birth >= t_max) return;
        if (death > t_max) death = t_max;
        if (death <= birth) return;  // zero persistence dropped
        diagram.points.push_back({dim, birth, death});
    };

    int top = f.max_simplex_dim();
    int max_dim = f.max_homology_dim();

    // Dimension 0 via union-find over edges in filtration order.  A merging
    // edge kills the younger component (the one whose minimum vertex entered
    // the vertex order later); non-merging edges create 1-cycles.
    std::vector<bool> edge_positive(f.count(1), false);
    std::size_t components = f.vertex_count();
    {
        UnionFind uf(f.vertex_count());
        const auto& edges = f.entries(1);
        std::uint32_t verts[6];
        for (std::size_t e = 0; e < edges.size(); ++e) {
            unpack_simplex(edges[e].key, 1, verts);
            std::uint32_t ru = uf.find(verts[0]);
            std::uint32_t rv = uf.find(verts[1]);
            if (ru == rv) {
                edge_positive[e] = true;
                continue;
            }
            push(0, 0.0, edges[e].value);
            // merge: keep the elder representative's min vertex
            std::uint32_t mv = std::min(uf.min_vertex[ru], uf.min_vertex[rv]);
            uf.parent[ru] = rv;
            uf.min_vertex[rv] = mv;
            --components;
        }
    }
    for (std::size_t c = 0; c < components; ++c) push(0, 0.0, t_max);

    // Dimensions >= 1: reduce boundary matrices top-down so pivots of the
    // (d+1)-reduction clear columns of the d-reduction.
    std::vector<bool> cleared;  // over dim-d columns, for the next round
    bool have_cleared = false;
    // row_paired of the (q+1)-reduction and the positive set of the
    // q-reduction meet when q is processed; stash pairing info per dimension.
    std::vector<std::vector<bool>> paired_rows(top + 1);
    for (int d = top; d >= 2; --d) {
        ReductionResult r = reduce_boundary(f, d, have_cleared ? &cleared : nullptr);
        int q = d - 1;
        for (const auto& [row, col] : r.pairs) push(q, f.value(q, row), f.value(d, col));
        paired_rows[q] = std::move(r.row_paired);
        if (d <= max_dim) {
            // positive d-simplices not killed by any (d+1)-simplex are
            // essential dim-d classes.
            const auto& killed = paired_rows[d];
            for (std::size_t c = 0; c < r.positive_col.size(); ++c) {
                if (r.positive_col[c] && !killed[c]) push(d, f.value(d, c), t_max);
            }
        }
        // Pivot rows of this reduction are positive (q)-simplices whose
        // columns in the q-reduction are zero: clear them next round.
        cleared = paired_rows[q];
        have_cleared = true;
    }
    if (max_dim >= 1 && top >= 2) {
        // Essential 1-classes: cycle-creating edges never paired by a triangle.
        const auto& killed = paired_rows[1];
        for (std::size_t e = 0; e < edge_positive.size(); ++e) {
            if (edge_positive[e] && !killed[e]) push(1, f.value(1, e), t_max);
        }
    }

    std::sort(diagram.points.begin(), diagram.points.end(), [](const DiagramPoint& a, const DiagramPoint& b) {
        if (a.dim != b.dim) return a.dim < b.dim;
        if (a.birth != b.birth) return a.birth < b.birth;
        return a.death < b.death;
    });
    return diagram;
}

// --- bottleneck ---------------------------------------------------------------

namespace {

// Hopcroft-Karp maximum matching on an adjacency list, left size L.
struct HopcroftKarp {
    const std::vector<std::vector<std::uint32_t>>& adj;
    std::size_t left, right;
    std::vector<std::int32_t> match_l, match_r, dist;

    HopcroftKarp(const std::vector<std::vector<std::uint32_t>>& a, std::size_t l, std::size_t r)
        : adj(a), left(l), right(r), match_l(l, -1), match_r(r, -1), dist(l, -1) {}

    bool bfs() {
        std::vector<std::uint32_t> queue;
        queue.reserve(left);
        for (std::size_t u = 0; u < left; ++u) {
            if (match_l[u] < 0) {
                dist[u] = 0;
                queue.push_back(static_cast<std::uint32_t>(u));
            } else {
                dist[u] = -1;
            }
        }
        bool reachable = false;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            std::uint32_t u = queue[head];
            for (std::uint32_t v : adj[u]) {
                std::int32_t w = match_r[v];
                if (w < 0) {
                    reachable = true;
                } else if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    queue.push_back(static_cast<std::uint32_t>(w));
                }
            }
        }
        return reachable;
    }

    bool dfs(std::uint32_t u) {
        for (std::uint32_t v : adj[u]) {
            std::int32_t w = match_r[v];
            if (w < 0 || (dist[w] == dist[u] + 1 && dfs(static_cast<std::uint32_t>(w)))) {
                match_l[u] = static_cast<std::int32_t>(v);
                match_r[v] = static_cast<std::int32_t>(u);
                return true;
            }
        }
        dist[u] = -1;
        return false;
    }

    std::size_t run() {
        std::size_t matched = 0;
        while (bfs()) {
            for (std::size_t u = 0; u < left; ++u) {
                if (match_l[u] < 0 && dfs(static_cast<std::uint32_t>(u))) ++matched;
            }
        }
        return matched;
    }
};

double linf_point(const DiagramPoint& a, const DiagramPoint& b) {
    return std::max(std::fabs(a.birth - b.birth), std::fabs(a.death - b.death));
}

// Perfect matching feasibility at tolerance delta for the standard bottleneck
// reduction: left = A ∪ diag(B), right = B ∪ diag(A); diag-diag edges free.
bool feasible(const std::vector<DiagramPoint>& A, const std::vector<DiagramPoint>& B, double delta) {
    std::size_t k1 = A.size(), k2 = B.size();
    std::size_t total = k1 + k2;
    std::vector<std::vector<std::uint32_t>> adj(total);
    for (std::size_t i = 0; i < k1; ++i) {
        for (std::size_t j = 0; j < k2; ++j) {
            if (linf_point(A[i], B[j]) <= delta) adj[i].push_back(static_cast<std::uint32_t>(j));
        }
        double to_diag = (A[i].death - A[i].birth) / 2.0;
        if (to_diag <= delta) adj[i].push_back(static_cast<std::uint32_t>(k2 + i));
    }
    for (std::size_t j = 0; j < k2; ++j) {
        auto& row = adj[k1 + j];
        double to_diag = (B[j].death - B[j].birth) / 2.0;
        if (to_diag <= delta) row.push_back(static_cast<std::uint32_t>(j));
        for (std::size_t i = 0; i < k1; ++i) row.push_back(static_cast<std::uint32_t>(k2 + i));
    }
    HopcroftKarp hk(adj, total, total);
    return hk.run() == total;
}

}  // namespace

double bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b, int dim) {
    require(a.t_max == b.t_max, "t-mismatch",
            "bottleneck distance requires diagrams truncated at the same T");
    std::vector<DiagramPoint> A = a.points_of_dim(dim);
    std::vector<DiagramPoint> B = b.points_of_dim(dim);
    if (A.empty() && B.empty()) return 0.0;

    std::vector<double> candidates;
    candidates.push_back(0.0);
    for (const auto& p : A) candidates.push_back((p.death - p.birth) / 2.0);
    for (const auto& q : B) candidates.push_back((q.death - q.birth) / 2.0);
    for (const auto& p : A)
        for (const auto& q : B) candidates.push_back(linf_point(p, q));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // Smallest candidate for which a perfect matching exists.
    std::size_t lo = 0, hi = candidates.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (feasible(A, B, candidates[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return candidates[lo];
}

// --- JSON ------------------------------------------------------------------------

std::string diagram_to_json(const PersistenceDiagram& d) {
    std::string out = "{\n  \"T\": " + format_double(d.t_max) + ",\n  \"points\": [";
    for (std::size_t i = 0; i < d.points.size(); ++i) {
        const auto& p = d.points[i];
        out += (i ? ",\n    " : "\n    ");
        out += "{\"dim\": " + std::to_string(p.dim) + ", \"birth\": " + format_double(p.birth) +
               ", \"death\": " + format_double(p.death) + "}";
    }
    out += d.points.empty() ? "]\n}\n" : "\n  ]\n}\n";
    return out;
}

void write_diagram_json(const std::string& path, const PersistenceDiagram& d) {
    std::ofstream out(path);
    require(out.good(), "io", "cannot write '" + path + "'");
    out << diagram_to_json(d);
    require(out.good(), "io", "write failed for '" + path + "'");
}

}  // namespace tda
