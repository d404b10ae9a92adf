#include "tda/pointcloud.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "tda/kernels.hpp"
#include "tda/rng.hpp"

namespace tda {

// --- PointCloud --------------------------------------------------------------

PointCloud PointCloud::from_points(const std::vector<double>& row_major, std::size_t count, std::size_t dim) {
    require(dim >= 1, "validation", "point dimension must be >= 1");
    require(count >= 1, "empty-set", "point cloud must contain at least one point");
    require(row_major.size() == count * dim, "validation", "coordinate buffer size does not match count*dim");
    for (double v : row_major) {
        require(std::isfinite(v), "validation", "coordinates must be finite");
    }
    PointCloud c;
    c.metric_ = Metric::euclidean;
    c.count_ = count;
    c.dim_ = dim;
    c.coords_.resize(count * dim);
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t d = 0; d < dim; ++d) c.coords_[d * count + i] = row_major[i * dim + d];
    }
    return c;
}

PointCloud PointCloud::from_distance_matrix(const std::vector<double>& matrix, std::size_t count) {
    return from_distance_matrix(matrix, count, MatrixCheck{});
}

PointCloud PointCloud::from_distance_matrix(const std::vector<double>& matrix, std::size_t count,
                                            const MatrixCheck& check) {
    require(count >= 1, "empty-set", "distance matrix must have at least one row");
    require(matrix.size() == count * count, "validation", "distance matrix must be square");
    for (std::size_t i = 0; i < count; ++i) {
        require(matrix[i * count + i] == 0.0, "validation",
                "distance matrix diagonal must be exactly zero (row " + std::to_string(i) + ")");
        for (std::size_t j = 0; j < count; ++j) {
            double v = matrix[i * count + j];
            require(std::isfinite(v) && v >= 0.0, "validation", "distances must be finite and nonnegative");
            double diff = std::fabs(v - matrix[j * count + i]);
            require(diff <= check.symmetry_tol, "validation",
                    "distance matrix is not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
    }
    auto triangle_ok = [&](std::size_t i, std::size_t j, std::size_t k) {
        return matrix[i * count + k] <= matrix[i * count + j] + matrix[j * count + k] + check.triangle_tol;
    };
    if (check.full_triangle_check) {
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t j = 0; j < count; ++j)
                for (std::size_t k = 0; k < count; ++k)
                    require(triangle_ok(i, j, k), "validation", "triangle inequality violated");
    } else {
        double total = static_cast<double>(count) * count * count;
        std::size_t trials = static_cast<std::size_t>(std::min<double>(total, check.sampled_triples));
        Rng rng = Rng::stream(check.seed, 0x7472690aULL);
        for (std::size_t t = 0; t < trials; ++t) {
            std::size_t i = rng.next_below(count), j = rng.next_below(count), k = rng.next_below(count);
            require(triangle_ok(i, j, k), "validation",
                    "triangle inequality violated at sampled triple (" + std::to_string(i) + "," +
                        std::to_string(j) + "," + std::to_string(k) + ")");
        }
    }
    PointCloud c;
    c.metric_ = Metric::explicit_matrix;
    c.count_ = count;
    c.dim_ = 0;
    c.matrix_ = matrix;
    // Enforce exact symmetry internally so orderings cannot depend on which
    // of the two entries a code path reads.
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = i + 1; j < count; ++j) c.matrix_[j * count + i] = c.matrix_[i * count + j];
    return c;
}

double PointCloud::sq_dist(std::size_t i, std::size_t j) const {
    if (metric_ == Metric::explicit_matrix) {
        double v = matrix_[i * count_ + j];
        return v * v;
    }
    double acc = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
        double diff = coords_[d * count_ + i] - coords_[d * count_ + j];
        acc += diff * diff;
    }
    return acc;
}

double PointCloud::dist(std::size_t i, std::size_t j) const {
    if (metric_ == Metric::explicit_matrix) return matrix_[i * count_ + j];
    return std::sqrt(sq_dist(i, j));
}

const double* PointCloud::soa() const {
    require(metric_ == Metric::euclidean, "validation", "coordinate access requires a euclidean cloud");
    return coords_.data();
}

std::vector<double> PointCloud::point(std::size_t i) const {
    require(metric_ == Metric::euclidean, "validation", "coordinate access requires a euclidean cloud");
    std::vector<double> p(dim_);
    for (std::size_t d = 0; d < dim_; ++d) p[d] = coords_[d * count_ + i];
    return p;
}

PointCloud PointCloud::gather(std::span<const std::uint32_t> indices) const {
    require(!indices.empty(), "empty-set", "gather requires at least one index");
    for (auto i : indices) require(i < count_, "validation", "gather index out of range");
    PointCloud c;
    c.metric_ = metric_;
    c.count_ = indices.size();
    c.dim_ = dim_;
    if (metric_ == Metric::euclidean) {
        c.coords_.resize(indices.size() * dim_);
        for (std::size_t d = 0; d < dim_; ++d)
            for (std::size_t k = 0; k < indices.size(); ++k)
                c.coords_[d * indices.size() + k] = coords_[d * count_ + indices[k]];
    } else {
        c.matrix_.resize(indices.size() * indices.size());
        for (std::size_t a = 0; a < indices.size(); ++a)
            for (std::size_t b = 0; b < indices.size(); ++b)
                c.matrix_[a * indices.size() + b] = matrix_[indices[a] * count_ + indices[b]];
    }
    return c;
}

double PointCloud::diameter() const {
    double best = 0.0;
    if (metric_ == Metric::explicit_matrix) {
        for (double v : matrix_)
            if (v > best) best = v;
        return best;
    }
    const auto& ops = kernels::active();
    std::vector<double> q(dim_), row(count_);
    for (std::size_t i = 0; i + 1 < count_; ++i) {
        for (std::size_t d = 0; d < dim_; ++d) q[d] = coords_[d * count_ + i];
        ops.sq_dist_batch(q.data(), coords_.data(), count_, dim_, row.data());
        for (std::size_t j = i + 1; j < count_; ++j) {
            if (row[j] > best) best = row[j];
        }
    }
    return std::sqrt(best);
}

double PointCloud::enclosing_radius() const {
    require(count_ >= 1, "empty-set", "enclosing radius of an empty cloud");
    double best = HUGE_VAL;
    if (metric_ == Metric::explicit_matrix) {
        for (std::size_t i = 0; i < count_; ++i) {
            double worst = 0.0;
            for (std::size_t j = 0; j < count_; ++j) {
                double v = matrix_[i * count_ + j];
                if (v > worst) worst = v;
            }
            if (worst < best) best = worst;
        }
        return best;
    }
    const auto& ops = kernels::active();
    std::vector<double> q(dim_), row(count_);
    for (std::size_t i = 0; i < count_; ++i) {
        for (std::size_t d = 0; d < dim_; ++d) q[d] = coords_[d * count_ + i];
        ops.sq_dist_batch(q.data(), coords_.data(), count_, dim_, row.data());
        double worst = 0.0;
        for (std::size_t j = 0; j < count_; ++j) {
            if (row[j] > worst) worst = row[j];
        }
        if (worst < best) best = worst;
    }
    return std::sqrt(best);
}

const std::vector<double>& PointCloud::matrix() const {
    require(metric_ == Metric::explicit_matrix, "validation", "matrix access requires an explicit-matrix cloud");
    return matrix_;
}

// --- synthetic shapes --------------------------------------------------------

SyntheticShape::Kind shape_kind_from_name(const std::string& name) {
    if (name == "circle") return SyntheticShape::Kind::circle;
    if (name == "sphere") return SyntheticShape::Kind::sphere;
    if (name == "torus") return SyntheticShape::Kind::torus;
    if (name == "uniform-cube" || name == "cube") return SyntheticShape::Kind::uniform_cube;
    fail("validation", "unknown shape '" + name + "' (circle, sphere, torus, uniform-cube)");
}

PointCloud sample_shape(const SyntheticShape& shape, std::size_t count, std::uint64_t seed) {
    require(count >= 1, "empty-set", "shape sample count must be >= 1");
    require(shape.noise_sigma >= 0.0, "validation", "noise sigma must be >= 0");
    constexpr double kTau = 6.283185307179586476925286766559;
    std::size_t dim = 0;
    switch (shape.kind) {
        case SyntheticShape::Kind::circle:
            require(shape.radius > 0.0, "validation", "circle radius must be positive");
            dim = 2;
            break;
        case SyntheticShape::Kind::sphere:
            require(shape.radius > 0.0, "validation", "sphere radius must be positive");
            dim = 3;
            break;
        case SyntheticShape::Kind::torus:
            require(shape.ring_radius > 0.0 && shape.tube_radius > 0.0, "validation", "torus radii must be positive");
            require(shape.tube_radius < shape.ring_radius, "validation", "torus tube radius must be below ring radius");
            dim = 3;
            break;
        case SyntheticShape::Kind::uniform_cube:
            require(shape.side > 0.0, "validation", "cube side must be positive");
            dim = 3;
            break;
    }
    std::vector<double> pts(count * dim);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = Rng::stream(seed, i);
        double* p = pts.data() + i * dim;
        switch (shape.kind) {
            case SyntheticShape::Kind::circle: {
                double theta = kTau * rng.next_double();
                p[0] = shape.radius * std::cos(theta);
                p[1] = shape.radius * std::sin(theta);
                break;
            }
            case SyntheticShape::Kind::sphere: {
                // Archimedes: z uniform on [-r, r], azimuth uniform.
                double z = shape.radius * (2.0 * rng.next_double() - 1.0);
                double phi = kTau * rng.next_double();
                double rho = std::sqrt(std::max(0.0, shape.radius * shape.radius - z * z));
                p[0] = rho * std::cos(phi);
                p[1] = rho * std::sin(phi);
                p[2] = z;
                break;
            }
            case SyntheticShape::Kind::torus: {
                // Area-uniform: accept tube angle psi with probability
                // proportional to R + r*cos(psi).
                double psi = 0.0;
                for (;;) {
                    psi = kTau * rng.next_double();
                    double accept = (shape.ring_radius + shape.tube_radius * std::cos(psi)) /
                                    (shape.ring_radius + shape.tube_radius);
                    if (rng.next_double() < accept) break;
                }
                double theta = kTau * rng.next_double();
                double w = shape.ring_radius + shape.tube_radius * std::cos(psi);
                p[0] = w * std::cos(theta);
                p[1] = w * std::sin(theta);
                p[2] = shape.tube_radius * std::sin(psi);
                break;
            }
            case SyntheticShape::Kind::uniform_cube: {
                p[0] = shape.side * rng.next_double();
                p[1] = shape.side * rng.next_double();
                p[2] = shape.side * rng.next_double();
                break;
            }
        }
        if (shape.noise_sigma > 0.0) {
            for (std::size_t d = 0; d < dim; ++d) p[d] += shape.noise_sigma * rng.next_gaussian();
        }
    }
    return PointCloud::from_points(pts, count, dim);
}

// --- subsampling --------------------------------------------------------------

std::vector<std::uint32_t> sample_one(std::size_t population, std::size_t m, bool replacement,
                                      std::uint64_t seed, std::uint64_t stream_id) {
    require(population >= 1, "empty-set", "cannot subsample an empty cloud");
    require(m >= 1, "validation", "subsample size must be >= 1");
    Rng rng = Rng::stream(seed, stream_id);
    std::vector<std::uint32_t> out(m);
    if (replacement) {
        for (std::size_t k = 0; k < m; ++k) out[k] = static_cast<std::uint32_t>(rng.next_below(population));
        return out;
    }
    require(m <= population, "validation", "subsample size exceeds population for replacement-free sampling");
    // Partial Fisher-Yates over an identity array.
    std::vector<std::uint32_t> scratch(population);
    std::iota(scratch.begin(), scratch.end(), 0u);
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t j = k + static_cast<std::size_t>(rng.next_below(population - k));
        std::swap(scratch[k], scratch[j]);
        out[k] = scratch[k];
    }
    return out;
}

std::vector<std::vector<std::uint32_t>> sample_iid(const PointCloud& cloud, const SubsampleScheme& scheme) {
    require(scheme.n >= 1, "validation", "number of subsamples must be >= 1");
    std::vector<std::vector<std::uint32_t>> out(scheme.n);
    for (std::size_t i = 0; i < scheme.n; ++i) {
        out[i] = sample_one(cloud.size(), scheme.m, scheme.replacement, scheme.seed, i);
    }
    return out;
}

// --- Hausdorff -----------------------------------------------------------------

namespace {

// max over points of a of the distance to b (euclidean clouds).
double directed_sq(const PointCloud& a, const PointCloud& b) {
    const auto& ops = kernels::active();
    std::size_t dim = a.dim();
    std::vector<double> q(dim);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t d = 0; d < dim; ++d) q[d] = a.soa()[d * a.size() + i];
        double best = ops.min_sq_dist(q.data(), b.soa(), b.size(), dim);
        if (best > worst) worst = best;
    }
    return worst;
}

}  // namespace

double hausdorff(const PointCloud& a, const PointCloud& b) {
    require(a.size() >= 1 && b.size() >= 1, "empty-set", "hausdorff distance requires nonempty sets");
    require(a.metric() == PointCloud::Metric::euclidean && b.metric() == PointCloud::Metric::euclidean,
            "validation", "hausdorff of two separate clouds requires euclidean metrics");
    require(a.dim() == b.dim(), "validation", "hausdorff requires matching ambient dimension");
    return std::sqrt(std::max(directed_sq(a, b), directed_sq(b, a)));
}

double hausdorff_subsets(const PointCloud& cloud, std::span<const std::uint32_t> a,
                         std::span<const std::uint32_t> b) {
    require(!a.empty() && !b.empty(), "empty-set", "hausdorff distance requires nonempty sets");
    for (auto i : a) require(i < cloud.size(), "validation", "subset index out of range");
    for (auto i : b) require(i < cloud.size(), "validation", "subset index out of range");
    if (cloud.metric() == PointCloud::Metric::euclidean) {
        return hausdorff(cloud.gather(a), cloud.gather(b));
    }
    auto directed = [&](std::span<const std::uint32_t> x, std::span<const std::uint32_t> y) {
        double worst = 0.0;
        for (auto i : x) {
            double best = HUGE_VAL;
            for (auto j : y) {
                double v = cloud.dist(i, j);
                if (v < best) best = v;
            }
            if (best > worst) worst = best;
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

// --- CSV ------------------------------------------------------------------------

namespace {

bool parse_row(const std::string& line, std::vector<double>& out) {
    out.clear();
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim spaces and a possible trailing CR
        std::size_t b = field.find_first_not_of(" \t\r");
        if (b == std::string::npos) return false;
        std::size_t e = field.find_last_not_of(" \t\r");
        field = field.substr(b, e - b + 1);
        const char* begin = field.c_str();
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin || *end != '\0') return false;
        out.push_back(v);
    }
    return !out.empty();
}

}  // namespace

std::vector<std::vector<double>> read_csv_rows(const std::string& path, bool* had_header) {
    std::ifstream in(path);
    require(in.good(), "io", "cannot open '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    bool header = false;
    std::vector<double> row;
    while (std::getline(in, line)) {
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (!parse_row(line, row)) {
            require(first, "parse", "non-numeric row in '" + path + "' after data began");
            header = true;
            first = false;
            continue;
        }
        first = false;
        if (!rows.empty()) {
            require(row.size() == rows.front().size(), "parse",
                    "ragged CSV '" + path + "': row with " + std::to_string(row.size()) + " fields, expected " +
                        std::to_string(rows.front().size()));
        }
        rows.push_back(row);
    }
    require(!rows.empty(), "empty-set", "no data rows in '" + path + "'");
    if (had_header) *had_header = header;
    return rows;
}

PointCloud read_point_csv(const std::string& path) {
    bool header = false;
    auto rows = read_csv_rows(path, &header);
    std::size_t dim = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * dim);
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return PointCloud::from_points(flat, rows.size(), dim);
}

PointCloud read_matrix_csv(const std::string& path, const PointCloud::MatrixCheck& check) {
    bool header = false;
    auto rows = read_csv_rows(path, &header);
    std::size_t n = rows.size();
    require(rows.front().size() == n, "validation", "distance matrix CSV must be square");
    std::vector<double> flat;
    flat.reserve(n * n);
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return PointCloud::from_distance_matrix(flat, n, check);
}

void write_point_csv(const std::string& path, const PointCloud& cloud) {
    std::ofstream out(path);
    require(out.good(), "io", "cannot write '" + path + "'");
    for (std::size_t d = 0; d < cloud.dim(); ++d) out << (d ? "," : "") << "x" << d;
    out << "\n";
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        for (std::size_t d = 0; d < cloud.dim(); ++d) {
            out << (d ? "," : "") << format_double(cloud.soa()[d * cloud.size() + i]);
        }
        out << "\n";
    }
    require(out.good(), "io", "write failed for '" + path + "'");
}

}  // namespace tda
