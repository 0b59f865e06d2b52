#include "dn/metric.hpp"
#include "dn/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace dn {

MetricView MetricView::euclidean(std::vector<double> coords, int dim) {
    if (dim <= 0) throw std::invalid_argument("dimension must be positive");
    if (coords.size() % static_cast<size_t>(dim) != 0)
        throw std::invalid_argument("coordinate count not divisible by dimension");
    MetricView v;
    v.n_ = static_cast<int>(coords.size() / dim);
    v.dim_ = dim;
    v.euclidean_ = true;
    v.data_ = std::move(coords);
    return v;
}

MetricView MetricView::matrix(std::vector<double> entries, int n) {
    if (n < 0) throw std::invalid_argument("negative size");
    if (entries.size() != static_cast<size_t>(n) * n)
        throw std::invalid_argument("matrix entry count mismatch");
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double d = entries[static_cast<size_t>(i) * n + j];
            if (d < 0.0 || std::isnan(d)) throw std::invalid_argument("matrix entries must be nonnegative");
        }
        if (entries[static_cast<size_t>(i) * n + i] != 0.0)
            throw std::invalid_argument("matrix diagonal must be zero");
    }
    MetricView v;
    v.n_ = n;
    v.dim_ = n;
    v.euclidean_ = false;
    v.data_ = std::move(entries);
    return v;
}

double MetricView::raw_distance(PointId i, PointId j) const {
    if (euclidean_) {
        const double* a = data_.data() + static_cast<size_t>(i) * dim_;
        const double* b = data_.data() + static_cast<size_t>(j) * dim_;
        double s = 0.0;
        for (int k = 0; k < dim_; ++k) {
            double d = a[k] - b[k];
            s += d * d;
        }
        return std::sqrt(s);
    }
    return data_[static_cast<size_t>(i) * n_ + j];
}

MetricView MetricView::subset(const std::vector<PointId>& ids) const {
    for (PointId id : ids) check_index(id);
    int k = static_cast<int>(ids.size());
    if (euclidean_) {
        std::vector<double> coords;
        coords.reserve(static_cast<size_t>(k) * dim_);
        for (PointId id : ids) {
            const double* p = point(id);
            coords.insert(coords.end(), p, p + dim_);
        }
        return euclidean(std::move(coords), dim_);
    }
    std::vector<double> m(static_cast<size_t>(k) * k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            m[static_cast<size_t>(a) * k + b] = data_[static_cast<size_t>(ids[a]) * n_ + ids[b]];
    return matrix(std::move(m), k);
}

double query_distance(const MetricView& view, const QueryPoint& q, PointId i) {
    if (i < 0 || i >= view.size()) throw std::out_of_range("point id out of range");
    view.note_oracle_call();
    if (q.is_coords) {
        if (!view.is_euclidean())
            throw std::invalid_argument("coordinate query against a matrix backend");
        if (static_cast<int>(q.values.size()) != view.dim())
            throw std::invalid_argument("query dimension mismatch");
        const double* p = view.point(i);
        double s = 0.0;
        for (int k = 0; k < view.dim(); ++k) {
            double d = q.values[k] - p[k];
            s += d * d;
        }
        return std::sqrt(s);
    }
    if (q.values.size() != static_cast<size_t>(view.size()))
        throw std::invalid_argument("query row length mismatch");
    return q.values[i];
}

QueryPoint query_of_point(const MetricView& view, PointId i) {
    if (view.is_euclidean()) {
        const double* p = view.point(i);
        return QueryPoint::coords(std::vector<double>(p, p + view.dim()));
    }
    std::vector<double> row(view.size());
    for (PointId j = 0; j < view.size(); ++j) row[j] = view.distance(i, j);
    return QueryPoint::distance_row(std::move(row));
}

std::vector<PointId> ball(const MetricView& view, PointId center, double r) {
    if (r < 0.0 && !std::isinf(r)) throw std::invalid_argument("negative radius");
    std::vector<PointId> out;
    for (PointId j = 0; j < view.size(); ++j)
        if (view.distance(center, j) <= r) out.push_back(j);
    return out;
}

SpreadStats spread_stats(const MetricView& view) {
    if (view.size() < 2) throw std::invalid_argument("spread needs at least two points");
    SpreadStats s;
    s.min_positive_distance = kInf;
    for (PointId i = 0; i < view.size(); ++i) {
        for (PointId j = i + 1; j < view.size(); ++j) {
            double d = view.distance(i, j);
            if (d == 0.0) throw DuplicatePointsError("duplicate points at ids " + std::to_string(i) +
                                                     "," + std::to_string(j));
            s.diameter = std::max(s.diameter, d);
            s.min_positive_distance = std::min(s.min_positive_distance, d);
        }
    }
    s.spread = s.diameter / s.min_positive_distance;
    return s;
}

AxiomReport check_metric_axioms(const MetricView& view, int sample_count, uint64_t seed) {
    AxiomReport rep;
    int n = view.size();
    if (n < 2 || sample_count <= 0) return rep;
    Rng rng(seed);
    constexpr double rel_tol = 1e-9;
    for (int s = 0; s < sample_count; ++s) {
        PointId a = static_cast<PointId>(rng.next_below(n));
        PointId b = static_cast<PointId>(rng.next_below(n));
        PointId c = static_cast<PointId>(rng.next_below(n));
        double dab = view.distance(a, b);
        double dba = view.distance(b, a);
        if (dab != dba) {
            rep.passed = false;
            rep.violation = "symmetry";
            rep.a = a;
            rep.b = b;
            return rep;
        }
        double dbc = view.distance(b, c);
        double dac = view.distance(a, c);
        double slack = rel_tol * (dab + dbc + dac);
        if (dac > dab + dbc + slack) {
            rep.passed = false;
            rep.violation = "triangle";
            rep.a = a;
            rep.b = b;
            rep.c = c;
            return rep;
        }
    }
    return rep;
}

DedupResult dedup_rows(const std::vector<double>& rows, int n, int width) {
    DedupResult res;
    res.canon_of.assign(n, -1);
    std::map<std::vector<double>, int> seen;
    for (int i = 0; i < n; ++i) {
        std::vector<double> key(rows.begin() + static_cast<size_t>(i) * width,
                                rows.begin() + static_cast<size_t>(i + 1) * width);
        auto it = seen.find(key);
        if (it == seen.end()) {
            int id = static_cast<int>(res.kept.size());
            seen.emplace(std::move(key), id);
            res.kept.push_back(i);
            res.canon_of[i] = id;
        } else {
            res.canon_of[i] = it->second;
            ++res.duplicates_removed;
        }
    }
    return res;
}

namespace {

std::vector<std::vector<double>> read_numeric_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::vector<double> row;
        double x;
        while (ls >> x) row.push_back(x);
        if (!ls.eof()) throw ParseError(path + ": line " + std::to_string(lineno) + ": not a number");
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

LoadedPoints load_points_file(const std::string& path, bool dedup) {
    auto rows = read_numeric_lines(path);
    if (rows.empty()) throw ParseError(path + ": no points");
    size_t dim = rows[0].size();
    std::vector<double> flat;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != dim)
            throw ParseError(path + ": row " + std::to_string(i + 1) + " has arity " +
                             std::to_string(rows[i].size()) + ", expected " + std::to_string(dim));
        flat.insert(flat.end(), rows[i].begin(), rows[i].end());
    }
    int n = static_cast<int>(rows.size());
    LoadedPoints lp;
    lp.dim = static_cast<int>(dim);
    if (dedup) {
        lp.dedup = dedup_rows(flat, n, static_cast<int>(dim));
        std::vector<double> kept;
        kept.reserve(lp.dedup.kept.size() * dim);
        for (int orig : lp.dedup.kept)
            kept.insert(kept.end(), flat.begin() + static_cast<size_t>(orig) * dim,
                        flat.begin() + static_cast<size_t>(orig + 1) * dim);
        lp.view = MetricView::euclidean(std::move(kept), static_cast<int>(dim));
    } else {
        lp.dedup.kept.resize(n);
        lp.dedup.canon_of.resize(n);
        for (int i = 0; i < n; ++i) lp.dedup.kept[i] = lp.dedup.canon_of[i] = i;
        lp.view = MetricView::euclidean(std::move(flat), static_cast<int>(dim));
    }
    return lp;
}

LoadedPoints load_matrix_file(const std::string& path, bool dedup) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    int n = 0;
    if (!(in >> n) || n <= 0) throw ParseError(path + ": bad matrix size line");
    std::vector<double> m(static_cast<size_t>(n) * n);
    for (size_t k = 0; k < m.size(); ++k) {
        if (!(in >> m[k]))
            throw ParseError(path + ": matrix row " + std::to_string(k / n + 1) + " truncated");
    }
    LoadedPoints lp;
    lp.dim = n;
    if (dedup) {
        lp.dedup = dedup_rows(m, n, n);
        if (lp.dedup.duplicates_removed > 0) {
            int k = static_cast<int>(lp.dedup.kept.size());
            std::vector<double> sub(static_cast<size_t>(k) * k);
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b)
                    sub[static_cast<size_t>(a) * k + b] =
                        m[static_cast<size_t>(lp.dedup.kept[a]) * n + lp.dedup.kept[b]];
            lp.view = MetricView::matrix(std::move(sub), k);
            return lp;
        }
        lp.view = MetricView::matrix(std::move(m), n);
        return lp;
    }
    lp.dedup.kept.resize(n);
    lp.dedup.canon_of.resize(n);
    for (int i = 0; i < n; ++i) lp.dedup.kept[i] = lp.dedup.canon_of[i] = i;
    lp.view = MetricView::matrix(std::move(m), n);
    return lp;
}

} // namespace dn
