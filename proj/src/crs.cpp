#include "dn/crs.hpp"
#include "dn/rng.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace dn {

namespace {

int floor_log_tau(double x) {
    int l = ceil_log_tau(x);
    if (NetTree::scale(l) > static_cast<long double>(x)) --l;
    return l;
}

} // namespace

// ---------------------------------------------------------------------------
// Assouad embedding
// ---------------------------------------------------------------------------

double assouad_kappa(double eps) {
    // Frozen from the calibration battery (planar/3d/5d random, uniform,
    // exponential line, integer line; worst observed 1.049 / 1.118 / 1.390 /
    // 24.57) with 20% headroom. eps = 1 collapses the row count to one and
    // the scales interfere, hence the large constant there.
    if (eps <= 0.11) return 1.26;
    if (eps <= 0.26) return 1.35;
    if (eps <= 0.51) return 1.67;
    return 30.0;
}

double AssouadEmbedding::query(int i, int j) const {
    const auto& a = phi[i];
    const auto& b = phi[j];
    double m = 0.0;
    for (size_t k = 0; k < a.size(); ++k) m = std::max(m, std::fabs(a[k] - b[k]));
    return m * m;
}

AssouadEmbedding build_assouad(const MetricView& view, double eps, uint64_t seed,
                               std::optional<double> max_spread) {
    if (!(eps > 0.0) || eps > 1.0) throw std::invalid_argument("eps must be in (0, 1]");
    int n = view.size();
    AssouadEmbedding emb;
    emb.eps = eps;
    emb.rows = std::max(1, static_cast<int>(std::ceil(8.0 / eps * std::log(1.0 / eps))));
    if (n <= 1) {
        emb.phi.assign(std::max(n, 0), {});
        return emb;
    }
    SpreadStats st = spread_stats(view);
    double allowed = max_spread ? *max_spread : 3.0 * std::pow(n / eps, 12.0);
    if (st.spread > allowed) throw SpreadTooLargeError("spread exceeds the Assouad bound");

    NetTree tree = build_net_tree(view, seed);
    double log1e = std::log1p(eps);
    int l_min = static_cast<int>(std::floor(std::log(st.min_positive_distance) / log1e)) - 1;
    int l_max = static_cast<int>(std::ceil(std::log(st.diameter) / log1e)) + 1;

    struct ScalePlan {
        int l;
        std::vector<PointId> net;
        std::vector<int> color; // per net point
        int colors = 0;
    };
    std::vector<ScalePlan> plans;
    plans.reserve(l_max - l_min + 1);
    for (int l = l_min; l <= l_max; ++l) {
        ScalePlan sp;
        sp.l = l;
        double r = std::exp(log1e * l);
        // Net that eps*r-covers and Omega(eps*r)-separates: the deepest
        // net-tree level whose stated covering radius 4 tau^lvl fits.
        int lvl = floor_log_tau(eps * r / 4.0);
        sp.net = net_at_level(tree, lvl);
        std::sort(sp.net.begin(), sp.net.end());
        // Greedy coloring of the 4r proximity graph.
        sp.color.assign(sp.net.size(), 0);
        for (size_t i = 0; i < sp.net.size(); ++i) {
            std::vector<char> used(i + 1, 0);
            for (size_t j = 0; j < i; ++j)
                if (view.distance(sp.net[i], sp.net[j]) <= 4.0 * r) used[sp.color[j]] = 1;
            int c = 0;
            while (used[c]) ++c;
            sp.color[i] = c;
            sp.colors = std::max(sp.colors, c + 1);
        }
        plans.push_back(std::move(sp));
    }

    emb.row_width.assign(emb.rows, 0);
    auto row_of = [&](int l) { return ((l % emb.rows) + emb.rows) % emb.rows; };
    for (const auto& sp : plans)
        emb.row_width[row_of(sp.l)] = std::max(emb.row_width[row_of(sp.l)], sp.colors);
    emb.row_offset.assign(emb.rows + 1, 0);
    for (int r = 0; r < emb.rows; ++r) emb.row_offset[r + 1] = emb.row_offset[r] + emb.row_width[r];
    int len = emb.row_offset[emb.rows];
    emb.phi.assign(n, std::vector<double>(len, 0.0));

    // Per scale: phi coordinate (row(l), color) gains
    // max(0, r - d(x, C_color)) / (1+eps)^(l/2). Exact nearest-in-color
    // distances come from one scan of the net per point; colors farther than
    // r contribute zero and are skipped.
    std::vector<double> best;
    for (const auto& sp : plans) {
        double r = std::exp(log1e * sp.l);
        double weight = std::exp(-0.5 * log1e * sp.l); // (1+eps)^(-l/2)
        int base = emb.row_offset[row_of(sp.l)];
        for (PointId x = 0; x < n; ++x) {
            best.assign(sp.colors, kInf);
            for (size_t t = 0; t < sp.net.size(); ++t) {
                double d = view.distance(x, sp.net[t]);
                if (d < best[sp.color[t]]) best[sp.color[t]] = d;
            }
            for (int c = 0; c < sp.colors; ++c)
                if (best[c] < r) emb.phi[x][base + c] += (r - best[c]) * weight;
        }
    }
    return emb;
}

// ---------------------------------------------------------------------------
// Coarse layer: pruned HSTs with per-vertex Assouad sub-schemes
// ---------------------------------------------------------------------------

namespace {

/// Largest b = 2^(a + j*m) (j integer) with b < x; returns log2(b).
double grid_below(double log2x, int a, int m) {
    double j = std::floor((log2x - a) / m);
    double cand = a + j * m;
    if (cand >= log2x) cand -= m;
    return cand;
}

} // namespace

int CoarseCrs::Pruned::lca(int u, int v) const {
    int a = first_occ[u], b = first_occ[v];
    if (a > b) std::swap(a, b);
    int len = b - a + 1;
    int j = 0;
    while ((2 << j) <= len) ++j;
    int x = sparse[j][a], y = sparse[j][b - (1 << j) + 1];
    return euler[euler_depth[x] <= euler_depth[y] ? x : y];
}

int CoarseCrs::Pruned::ancestor_at_depth(int v, int d) const {
    int k = depth[v] - d;
    for (int j = 0; k; ++j, k >>= 1)
        if (k & 1) v = jump[j][v];
    return v;
}

void CoarseCrs::Pruned::build_index(int rt) {
    root = rt;
    int m = static_cast<int>(hst_node.size());
    depth.assign(m, 0);
    std::vector<int> order;
    order.reserve(m);
    std::vector<int> stack = {root};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (int c : children[v]) {
            depth[c] = depth[v] + 1;
            stack.push_back(c);
        }
    }
    int maxd = 0;
    for (int v = 0; v < m; ++v) maxd = std::max(maxd, depth[v]);
    int levels = 1;
    while ((1 << levels) <= maxd) ++levels;
    jump.assign(levels, std::vector<int>(m, root));
    for (int v = 0; v < m; ++v) jump[0][v] = parent[v] < 0 ? root : parent[v];
    for (int j = 1; j < levels; ++j)
        for (int v = 0; v < m; ++v) jump[j][v] = jump[j - 1][jump[j - 1][v]];

    euler.clear();
    euler_depth.clear();
    first_occ.assign(m, -1);
    struct Frame {
        int v;
        size_t ci;
    };
    std::vector<Frame> fs = {{root, 0}};
    while (!fs.empty()) {
        Frame& f = fs.back();
        if (first_occ[f.v] < 0) first_occ[f.v] = static_cast<int>(euler.size());
        euler.push_back(f.v);
        euler_depth.push_back(depth[f.v]);
        if (f.ci < children[f.v].size()) {
            int c = children[f.v][f.ci++];
            fs.push_back({c, 0});
        } else {
            fs.pop_back();
            if (!fs.empty()) {
                euler.push_back(fs.back().v);
                euler_depth.push_back(depth[fs.back().v]);
            }
        }
    }
    int e = static_cast<int>(euler.size());
    int logs = 1;
    while ((1 << logs) <= e) ++logs;
    sparse.assign(logs, std::vector<int>(e));
    for (int i = 0; i < e; ++i) sparse[0][i] = i;
    for (int j = 1; j < logs; ++j)
        for (int i = 0; i + (1 << j) <= e; ++i) {
            int a = sparse[j - 1][i], b = sparse[j - 1][i + (1 << (j - 1))];
            sparse[j][i] = euler_depth[a] <= euler_depth[b] ? a : b;
        }
}

CoarseCrs CoarseCrs::build(const MetricView& view, const Hst& hst, uint64_t seed) {
    CoarseCrs crs;
    int n = view.size();
    Rng rng(seed);
    int lg = 1;
    while ((1 << lg) < std::max(2, n)) ++lg;
    // a1 = 0, a2 = ceil(5 (log2(1/eps0) + log2 n)), modulus twice that span.
    double bits = std::log2(1.0 / kEps0) + lg;
    int a2 = static_cast<int>(std::ceil(5.0 * bits));
    int mod = static_cast<int>(std::ceil(10.0 * bits));
    int offsets[2] = {0, a2};

    for (int t = 0; t < 2; ++t) {
        Pruned& pt = crs.trees_[t];
        int m = hst.size();
        // Retained: root, leaves, and vertices whose [delta, parent delta)
        // span contains a grid value 2^(a + j*mod).
        std::vector<char> keep(m, 0);
        keep[hst.root] = 1;
        for (int v = 0; v < m; ++v) {
            if (hst.is_leaf(v)) {
                keep[v] = 1;
                continue;
            }
            if (v == hst.root) continue;
            double du = hst.nodes[v].delta;
            double dp = hst.nodes[hst.nodes[v].parent].delta;
            if (dp <= du) continue; // empty span [du, dp)
            double lo = std::log2(du), hi = std::log2(dp);
            double below_hi = grid_below(hi, offsets[t], mod);
            if (below_hi >= lo) keep[v] = 1;
        }
        // Build the pruned tree on kept vertices.
        std::vector<int> pid(m, -1);
        std::vector<int> korder;
        std::vector<int> stack = {hst.root};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (keep[v]) {
                pid[v] = static_cast<int>(korder.size());
                korder.push_back(v);
            }
            if (!hst.is_leaf(v)) {
                stack.push_back(hst.nodes[v].right);
                stack.push_back(hst.nodes[v].left);
            }
        }
        int pm = static_cast<int>(korder.size());
        pt.hst_node = korder;
        pt.delta.resize(pm);
        pt.parent.assign(pm, -1);
        pt.children.assign(pm, {});
        pt.leaf_of.assign(n, -1);
        for (int i = 0; i < pm; ++i) {
            int v = korder[i];
            pt.delta[i] = hst.nodes[v].delta;
            if (hst.is_leaf(v)) pt.leaf_of[hst.nodes[v].rep] = i;
            if (v == hst.root) continue;
            int a = hst.nodes[v].parent;
            while (!keep[a]) a = hst.nodes[a].parent;
            pt.parent[i] = pid[a];
            pt.children[pid[a]].push_back(i);
        }
        pt.build_index(pid[hst.root]);

        // Assouad sub-scheme per internal pruned vertex over child reps.
        pt.sub.resize(pm);
        pt.child_reps.resize(pm);
        pt.child_slot.assign(pm, -1);
        double allowed = 3.0 * std::pow(n / kEps0, 12.0);
        for (int i = 0; i < pm; ++i) {
            if (pt.children[i].empty()) continue;
            std::vector<PointId> reps;
            for (size_t s = 0; s < pt.children[i].size(); ++s) {
                int c = pt.children[i][s];
                pt.child_slot[c] = static_cast<int>(s);
                reps.push_back(hst.nodes[pt.hst_node[c]].rep);
            }
            pt.child_reps[i] = reps;
            MetricView sub = view.subset(reps);
            if (reps.size() >= 2) {
                SpreadStats st = spread_stats(sub);
                crs.max_subset_spread_ = std::max(crs.max_subset_spread_, st.spread);
            }
            pt.sub[i] = build_assouad(sub, kEps0, rng.fork().next_u64(), allowed);
        }
    }
    return crs;
}

double CoarseCrs::query(PointId x, PointId y) const {
    if (x == y) return 0.0;
    double best_span = kInf;
    double value = 0.0;
    for (int t = 0; t < 2; ++t) {
        const Pruned& pt = trees_[t];
        int u = pt.lca(pt.leaf_of[x], pt.leaf_of[y]);
        int xi = pt.ancestor_at_depth(pt.leaf_of[x], pt.depth[u] + 1);
        int yi = pt.ancestor_at_depth(pt.leaf_of[y], pt.depth[u] + 1);
        double span = std::max(pt.delta[xi], pt.delta[yi]);
        if (span < best_span) {
            best_span = span;
            value = pt.sub[u].query(pt.child_slot[xi], pt.child_slot[yi]);
        }
    }
    return value;
}

// ---------------------------------------------------------------------------
// Boosted CRS
// ---------------------------------------------------------------------------

namespace {

uint64_t pair_key(int u, int v) {
    if (u > v) std::swap(u, v);
    return (static_cast<uint64_t>(u) << 32) | static_cast<uint32_t>(v);
}

/// Seed divisor: with the coarse estimate eta0 in [d/k, k d], eta = eta0 /
/// (22 k) satisfies eta <= d/22, which places both seed vertices strictly
/// below the parents of the covering WSPD pair (their levels exceed
/// log_tau(eps d / 22) by the genWSPD stop-rule failure bound).
constexpr double kSeedDivisor = 22.0;

} // namespace

int CrsIndex::max_ladder_steps() {
    // Seed levels sit at most log_tau(22 k^2) + O(1) levels below the pair
    // found; both sides climb. Measured well under this on the battery.
    double k = CoarseCrs::kappa_bound();
    return 2 * (static_cast<int>(std::ceil(std::log(kSeedDivisor * k * k) / std::log(11.0))) + 6);
}

CrsIndex CrsIndex::build(const MetricView& view, double eps, uint64_t seed) {
    if (!(eps > 0.0) || eps > 1.0) throw std::invalid_argument("eps must be in (0, 1]");
    CrsIndex idx;
    idx.eps_ = eps;
    Rng rng(seed);
    idx.hst_ = build_coarse_hst(view, rng.fork().next_u64());
    idx.coarse_ = CoarseCrs::build(view, idx.hst_, rng.fork().next_u64());
    idx.tree_ = build_net_tree(view, rng.fork().next_u64());
    idx.wspd_ = build_wspd(idx.tree_, view, eps);
    for (auto [u, v] : idx.wspd_.pairs)
        idx.rep_dist_[pair_key(u, v)] =
            view.distance(idx.tree_.verts[u].rep, idx.tree_.verts[v].rep);

    // K_u per HST vertex: net-tree vertices spanning level ceil(log_tau
    // delta_u) with representatives within 4 delta_u, found by pruned
    // descent from the net-tree root.
    int hn = idx.hst_.size();
    idx.k_sets_.assign(hn, {});
    for (int u = 0; u < hn; ++u) {
        if (idx.hst_.is_leaf(u)) continue;
        double du = idx.hst_.nodes[u].delta;
        if (du <= 0.0) continue;
        int cut = ceil_log_tau(du);
        PointId rep_u = idx.hst_.nodes[u].rep;
        std::vector<int> stack = {idx.tree_.root};
        while (!stack.empty()) {
            int w = stack.back();
            stack.pop_back();
            double d = view.distance(idx.tree_.verts[w].rep, rep_u);
            long double cov = idx.tree_.is_leaf(w)
                                  ? 0.0L
                                  : NetTree::kCoverFactor * NetTree::scale(idx.tree_.verts[w].level);
            if (static_cast<long double>(d) > 4.0L * du + cov) continue;
            if (idx.tree_.verts[w].level < cut && cut <= idx.tree_.parent_level(w)) {
                if (d <= 4.0 * du) idx.k_sets_[u].push_back(w);
                continue;
            }
            if (idx.tree_.verts[w].level >= cut)
                for (int c : idx.tree_.verts[w].children) stack.push_back(c);
        }
    }

    // HST LCA structures.
    idx.hdepth_.assign(hn, 0);
    idx.hfirst_.assign(hn, -1);
    idx.heuler_.clear();
    struct Frame {
        int v;
        int stage;
    };
    std::vector<Frame> fs = {{idx.hst_.root, 0}};
    while (!fs.empty()) {
        auto [v, stage] = fs.back();
        fs.pop_back();
        if (idx.hfirst_[v] < 0) idx.hfirst_[v] = static_cast<int>(idx.heuler_.size());
        idx.heuler_.push_back(v);
        if (stage == 0 && !idx.hst_.is_leaf(v)) {
            int l = idx.hst_.nodes[v].left, r = idx.hst_.nodes[v].right;
            idx.hdepth_[l] = idx.hdepth_[v] + 1;
            idx.hdepth_[r] = idx.hdepth_[v] + 1;
            fs.push_back({v, 1});
            fs.push_back({r, 0});
            fs.push_back({v, -1}); // revisit marker between children
            fs.push_back({l, 0});
        }
    }
    int e = static_cast<int>(idx.heuler_.size());
    int logs = 1;
    while ((1 << logs) <= e) ++logs;
    idx.hsparse_.assign(logs, std::vector<int>(e));
    for (int i = 0; i < e; ++i) idx.hsparse_[0][i] = i;
    for (int j = 1; j < logs; ++j)
        for (int i = 0; i + (1 << j) <= e; ++i) {
            int a = idx.hsparse_[j - 1][i], b = idx.hsparse_[j - 1][i + (1 << (j - 1))];
            idx.hsparse_[j][i] = idx.hdepth_[idx.heuler_[a]] <= idx.hdepth_[idx.heuler_[b]] ? a : b;
        }
    return idx;
}

int CrsIndex::hst_lca(int u, int v) const {
    int a = hfirst_[u], b = hfirst_[v];
    if (a > b) std::swap(a, b);
    int len = b - a + 1;
    int j = 0;
    while ((2 << j) <= len) ++j;
    int x = hsparse_[j][a], y = hsparse_[j][b - (1 << j) + 1];
    return hdepth_[heuler_[x]] <= hdepth_[heuler_[y]] ? heuler_[x] : heuler_[y];
}

double CrsIndex::query(PointId x, PointId y, int* ladder_steps) const {
    if (ladder_steps) *ladder_steps = 0;
    if (x == y) return 0.0;
    const NetTree& t = tree_;

    // Anchor vertices via the HST lca's K set (constant-size scan); they
    // bound the restricted seek window for the seed levels.
    int z = hst_lca(hst_.leaf_of[x], hst_.leaf_of[y]);
    int xl = t.leaf_of[x], yl = t.leaf_of[y];
    int ux = -1, vy = -1;
    for (int w : k_sets_[z]) {
        if (t.tree_lca(w, xl) == w) ux = w;
        if (t.tree_lca(w, yl) == w) vy = w;
    }

    double eta0 = coarse_.query(x, y);
    double eta = eta0 / (kSeedDivisor * CoarseCrs::kappa_bound());
    int seed_level = floor_log_tau(eps_ * eta);

    auto seek = [&](PointId p, int anchor) {
        if (anchor >= 0) {
            auto got = t.restricted_level_ancestor(p, anchor, seed_level);
            if (got) return *got;
        }
        return t.level_ancestor(p, seed_level);
    };
    int u = seek(x, ux);
    int v = seek(y, vy);

    int steps = 0;
    const int cap = 4 * (t.size() + 2);
    while (!(u != v && wspd_.contains(u, v))) {
        int pu = t.verts[u].parent, pv = t.verts[v].parent;
        if (pu < 0 && pv < 0) throw std::logic_error("crs ladder reached the root");
        bool climb_u;
        if (pu < 0)
            climb_u = false;
        else if (pv < 0)
            climb_u = true;
        else {
            int lpu = t.verts[pu].level, lpv = t.verts[pv].level;
            climb_u = lpu < lpv || (lpu == lpv && pu <= pv);
        }
        if (climb_u)
            u = pu;
        else
            v = pv;
        if (++steps > cap) throw std::logic_error("crs ladder did not terminate");
    }
    if (ladder_steps) *ladder_steps = steps;
    return rep_dist_.at(pair_key(u, v));
}

} // namespace dn
