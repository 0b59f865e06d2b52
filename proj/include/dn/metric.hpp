#pragma once

#include <atomic>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace dn {

using PointId = int32_t;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DuplicatePointsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Finite metric over points {0..n-1} with an instrumented distance oracle.
/// Backends: Euclidean coordinates (n x dim, row-major) or an explicit
/// symmetric distance matrix. Immutable after construction; the call counter
/// is atomic so concurrent readers stay exact at quiescence.
class MetricView {
public:
    MetricView() = default; // empty view; assign from a factory before use
    static MetricView euclidean(std::vector<double> coords, int dim);
    static MetricView matrix(std::vector<double> entries, int n);

    int size() const { return n_; }
    int dim() const { return dim_; }
    bool is_euclidean() const { return euclidean_; }

    double distance(PointId i, PointId j) const {
        check_index(i);
        check_index(j);
        calls_.fetch_add(1, std::memory_order_relaxed);
        return raw_distance(i, j);
    }

    uint64_t distance_calls() const { return calls_.load(std::memory_order_relaxed); }
    void reset_distance_calls() const { calls_.store(0, std::memory_order_relaxed); }

    /// Counts one oracle evaluation that bypassed distance() (query points).
    void note_oracle_call() const { calls_.fetch_add(1, std::memory_order_relaxed); }

    /// Coordinate row for Euclidean backends.
    const double* point(PointId i) const {
        check_index(i);
        return data_.data() + static_cast<size_t>(i) * dim_;
    }

    const std::vector<double>& raw_data() const { return data_; }

    /// View restricted to a subset of points; ids are renumbered 0..k-1 in
    /// the order given. Copies the needed rows/entries.
    MetricView subset(const std::vector<PointId>& ids) const;

private:
    double raw_distance(PointId i, PointId j) const;
    void check_index(PointId i) const {
        if (i < 0 || i >= n_) throw std::out_of_range("point id out of range");
    }

    int n_ = 0;
    int dim_ = 0;
    bool euclidean_ = true;
    std::vector<double> data_; // coords (n*dim) or matrix (n*n)
    mutable std::atomic<uint64_t> calls_{0};

public:
    MetricView(MetricView&& o) noexcept
        : n_(o.n_), dim_(o.dim_), euclidean_(o.euclidean_), data_(std::move(o.data_)),
          calls_(o.calls_.load()) {}
    MetricView& operator=(MetricView&& o) noexcept {
        n_ = o.n_;
        dim_ = o.dim_;
        euclidean_ = o.euclidean_;
        data_ = std::move(o.data_);
        calls_.store(o.calls_.load());
        return *this;
    }
    MetricView(const MetricView&) = delete;
    MetricView& operator=(const MetricView&) = delete;
};

/// A query point outside the stored set: raw coordinates for Euclidean
/// backends, or a precomputed distance row (one entry per stored point) for
/// matrix backends. Evaluations are counted against the view's oracle.
struct QueryPoint {
    std::vector<double> values;
    bool is_coords = true;

    static QueryPoint coords(std::vector<double> c) { return {std::move(c), true}; }
    static QueryPoint distance_row(std::vector<double> row) { return {std::move(row), false}; }
};

double query_distance(const MetricView& view, const QueryPoint& q, PointId i);

/// Turn a stored point into a query handle (used by tests and self-queries).
QueryPoint query_of_point(const MetricView& view, PointId i);

struct SpreadStats {
    double diameter = 0.0;
    double min_positive_distance = 0.0;
    double spread = 0.0;
};

struct AxiomReport {
    bool passed = true;
    std::string violation; // empty when passed
    PointId a = -1, b = -1, c = -1;
};

/// Closed ball {x : d(center,x) <= r}; r may be +inf.
std::vector<PointId> ball(const MetricView& view, PointId center, double r);

/// Exact O(n^2) spread scan. Throws DuplicatePointsError when two points
/// coincide (spread would be infinite). Diagnostic use only.
SpreadStats spread_stats(const MetricView& view);

/// Sampled symmetry / triangle-inequality check with relative tolerance
/// 1e-9. Violations are report content, not exceptions.
AxiomReport check_metric_axioms(const MetricView& view, int sample_count, uint64_t seed);

struct DedupResult {
    std::vector<int> kept;      // indices into the original rows, one per kept point
    std::vector<int> canon_of;  // original index -> kept PointId
    int duplicates_removed = 0;
};

/// Exact-equality dedup of coordinate rows. Returns the kept-row selection;
/// callers rebuild the view from the kept rows.
DedupResult dedup_rows(const std::vector<double>& rows, int n, int width);

struct LoadedPoints {
    MetricView view;
    int dim = 0;
    DedupResult dedup;
};

/// Points file: one point per line, whitespace-separated decimal coordinates,
/// '#' comment lines ignored, equal arity required.
LoadedPoints load_points_file(const std::string& path, bool dedup = true);

/// Matrix file: first line n, then n rows of n nonnegative decimals.
LoadedPoints load_matrix_file(const std::string& path, bool dedup = true);

} // namespace dn
