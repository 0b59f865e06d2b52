#include "dn/net_tree.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

namespace dn {

long double NetTree::scale(int l) {
    if (l <= kLeafLevel) return 0.0L;
    if (l >= kRootParentLevel) return std::numeric_limits<long double>::infinity();
    return powl(static_cast<long double>(kTau), static_cast<long double>(l));
}

int ceil_log_tau(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("ceil_log_tau needs x > 0");
    int l = static_cast<int>(std::ceil(std::log(x) / std::log(11.0)));
    while (NetTree::scale(l - 1) >= static_cast<long double>(x)) --l;
    while (NetTree::scale(l) < static_cast<long double>(x)) ++l;
    return l;
}

int NetTree::max_out_degree() const {
    int deg = 0;
    for (const auto& v : verts) deg = std::max(deg, static_cast<int>(v.children.size()));
    return deg;
}

void NetTree::refresh_rel(int v) {
    const int lv = verts[v].level;
    const long double reach = kRelFactor * scale(lv);
    auto& rel = verts[v].rel;
    rel.erase(std::remove_if(rel.begin(), rel.end(),
                             [&](const RelEntry& e) {
                                 int w = e.vertex;
                                 return !(verts[w].level <= lv && lv < parent_level(w) &&
                                          static_cast<long double>(e.dist) <= reach);
                             }),
              rel.end());
}

std::vector<PointId> NetTree::points_under(int v) const {
    std::vector<PointId> out;
    std::vector<int> stack = {v};
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        if (is_leaf(u)) {
            out.push_back(verts[u].rep);
            continue;
        }
        for (int c : verts[u].children) stack.push_back(c);
    }
    return out;
}

std::string NetTree::to_json() const {
    std::ostringstream os;
    os << "[";
    for (int v = 0; v < size(); ++v) {
        if (v) os << ",";
        os << "{\"id\":" << v << ",\"level\":";
        if (verts[v].level == kLeafLevel)
            os << "\"-inf\"";
        else
            os << verts[v].level;
        os << ",\"rep\":" << verts[v].rep << ",\"parent\":" << verts[v].parent << ",\"children\":[";
        for (size_t i = 0; i < verts[v].children.size(); ++i) {
            if (i) os << ",";
            os << verts[v].children[i];
        }
        os << "],\"rel\":[";
        for (size_t i = 0; i < verts[v].rel.size(); ++i) {
            if (i) os << ",";
            os << verts[v].rel[i].vertex;
        }
        os << "]}";
    }
    os << "]";
    return os.str();
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

namespace {

class Builder {
public:
    Builder(const MetricView& view, const GreedySequence& seq, std::vector<InsertRecord>* audit)
        : view_(view), seq_(seq), audit_(audit) {}

    NetTree build() {
        NetTree t;
        int n = view_.size();
        t.leaf_of.assign(n, -1);
        if (n == 0) return t;
        tree_ = &t;
        // First point: a single leaf serving as the root.
        int leaf0 = new_vertex(kLeafLevel, seq_.order[0], -1);
        t.leaf_of[seq_.order[0]] = leaf0;
        t.root = leaf0;
        double rbar = kInf;
        for (int k = 1; k < n; ++k) {
            rbar = std::min(rbar, seq_.pick_alpha[k]);
            insert_point(seq_.order[k], seq_.prev_center[k], rbar);
        }
        t.finalize();
        return t;
    }

private:
    int new_vertex(int level, PointId rep, int parent) {
        NetTree& t = *tree_;
        int id = t.size();
        NetTreeVertex v;
        v.level = level;
        v.rep = rep;
        v.parent = parent;
        v.rel.push_back({id, 0.0});
        t.verts.push_back(std::move(v));
        return id;
    }

    void insert_point(PointId pk, PointId chat, double rbar) {
        NetTree& t = *tree_;
        int l = ceil_log_tau(rbar);
        // Find q: the nearest point among the centers of strictly earlier
        // phases. Case (1): the serving center itself predates this phase.
        // Case (2): scan the Rel list of its level-l parent.
        int uhat = t.verts[t.leaf_of[chat]].parent;
        PointId q;
        if (uhat < 0 || t.verts[uhat].level > l) {
            q = chat;
        } else {
            t.refresh_rel(uhat);
            // Cached distances to uhat's representative lower-bound each
            // candidate's distance and skip most oracle calls; candidates
            // tied with the minimum are always evaluated, so the smaller-id
            // tie rule is unaffected.
            PointId anchor = t.verts[uhat].rep;
            double d_anchor = view_.distance(anchor, pk);
            q = anchor;
            double best = d_anchor;
            for (const RelEntry& e : t.verts[uhat].rel) {
                PointId cand = t.verts[e.vertex].rep;
                if (cand == anchor) continue;
                if (std::fabs(e.dist - d_anchor) > best) continue;
                double d = view_.distance(cand, pk);
                if (d < best || (d == best && cand < q)) {
                    best = d;
                    q = cand;
                }
            }
        }

        if (audit_) audit_->push_back({pk, q, l});
        int qleaf = t.leaf_of[q];
        int u = t.verts[qleaf].parent;
        double d_q_pk = view_.distance(q, pk);
        int pk_leaf;
        if (u < 0 || t.verts[u].level > l) {
            // Case (a): splice a new level-l vertex between q's leaf and its
            // parent, and hang the new leaf off it.
            int v = new_vertex(l, q, u);
            if (u >= 0) {
                auto& ch = t.verts[u].children;
                *std::find(ch.begin(), ch.end(), qleaf) = v;
                t.verts[v].parent_rep_dist = view_.distance(t.verts[u].rep, q);
            } else {
                t.root = v;
            }
            t.verts[qleaf].parent = v;
            t.verts[qleaf].parent_rep_dist = 0.0; // rep_v == q
            t.verts[v].children.push_back(qleaf);
            pk_leaf = new_vertex(kLeafLevel, pk, v);
            t.verts[pk_leaf].parent_rep_dist = d_q_pk;
            t.verts[v].children.push_back(pk_leaf);
            t.leaf_of[pk] = pk_leaf;
            update_rel(v);
            update_rel(pk_leaf);
        } else {
            // Case (b): the parent already sits at level l; its
            // representative is q.
            pk_leaf = new_vertex(kLeafLevel, pk, u);
            t.verts[pk_leaf].parent_rep_dist = d_q_pk;
            t.verts[u].children.push_back(pk_leaf);
            t.leaf_of[pk] = pk_leaf;
            update_rel(pk_leaf);
        }
    }

    void update_rel(int x) {
        NetTree& t = *tree_;
        int y = t.verts[x].parent;
        if (y < 0) return;
        t.refresh_rel(y);
        // Each Rel(y) member is a traversal root: its own membership tests
        // run when the level conditions permit them at all, and its children
        // are entered when something below could still pass a test. The
        // cached member distances to y plus one oracle call for d(x, y)
        // lower-bound d(x, member), so out-of-reach members and subtrees
        // cost no oracle calls. (The correctness argument walks root-paths
        // whose top vertex is a Rel(y) member.)
        const double d_yx = view_.distance(t.verts[y].rep, t.verts[x].rep);
        const int lx = t.verts[x].level, ly = t.verts[y].level;
        std::vector<RelEntry> roots(t.verts[y].rel);
        for (const RelEntry& e : roots) {
            const int z = e.vertex;
            if (z == x) continue;
            const int lz = t.verts[z].level;
            const long double lb = std::fabs(e.dist - d_yx);
            bool test_z =
                (lz <= lx && lx < t.parent_level(z) &&
                 lb <= NetTree::kRelFactor * NetTree::scale(lx)) ||
                (lx <= lz && lz < ly && lb <= NetTree::kRelFactor * NetTree::scale(lz));
            bool enter_children = false;
            if (!t.is_leaf(z)) {
                // Descendants w have level <= lz - 1 and sit within the
                // covering radius of z; their test thresholds are at most
                // 13 tau^max(lx, lz-1).
                long double cov = NetTree::kCoverFactor * NetTree::scale(lz);
                long double sub_reach =
                    NetTree::kRelFactor * NetTree::scale(std::max(lx, lz - 1));
                enter_children = lb - cov <= sub_reach;
            }
            if (!test_z && !enter_children) continue;
            if (test_z || enter_children) {
                double d = view_.distance(t.verts[x].rep, t.verts[z].rep);
                if (test_z && apply_tests(x, z, d)) enter_children = true;
                if (enter_children) enter(x, z, d);
            }
        }
    }

    /// Visits the children of w whose cached parent distance leaves their
    /// subtree within testing reach of x.
    void enter(int x, int w, double d_xw) {
        NetTree& t = *tree_;
        const int lx = t.verts[x].level;
        for (int c : t.verts[w].children) {
            if (c == x) continue;
            long double lb = std::fabs(d_xw - t.verts[c].parent_rep_dist);
            int lc = t.verts[c].level;
            long double reach = NetTree::kRelFactor * NetTree::scale(std::max(lx, lc));
            if (!t.is_leaf(c)) reach += NetTree::kCoverFactor * NetTree::scale(lc);
            if (lb > reach) continue;
            visit(x, c);
        }
    }

    /// Runs both membership tests for the pair (x, w) given their exact
    /// representative distance; returns whether x entered Rel(w).
    bool apply_tests(int x, int w, double d) {
        NetTree& t = *tree_;
        int lx = t.verts[x].level, lw = t.verts[w].level;
        if (lw <= lx && lx < t.parent_level(w) &&
            static_cast<long double>(d) <= NetTree::kRelFactor * NetTree::scale(lx))
            t.verts[x].rel.push_back({w, d});
        bool into_w = lx <= lw && lw < t.parent_level(x) &&
                      static_cast<long double>(d) <= NetTree::kRelFactor * NetTree::scale(lw);
        if (into_w) t.verts[w].rel.push_back({x, d});
        return into_w;
    }

    void visit(int x, int w) {
        if (w == x) return;
        NetTree& t = *tree_;
        double d = view_.distance(t.verts[x].rep, t.verts[w].rep);
        if (apply_tests(x, w, d)) enter(x, w, d);
    }

    const MetricView& view_;
    const GreedySequence& seq_;
    std::vector<InsertRecord>* audit_;
    NetTree* tree_ = nullptr;
};

} // namespace

NetTree build_net_tree_from_sequence(const MetricView& view, const GreedySequence& seq,
                                     std::vector<InsertRecord>* audit) {
    return Builder(view, seq, audit).build();
}

NetTree build_net_tree(const MetricView& view, uint64_t seed) {
    if (view.size() == 1) {
        GreedySequence seq;
        seq.n = 1;
        seq.exact = false;
        seq.order = {0};
        seq.pick_alpha = {kInf};
        seq.prev_center = {0};
        return build_net_tree_from_sequence(view, seq);
    }
    Hst hst = build_coarse_hst(view, seed);
    GreedySequence seq = net_permutation(view, hst);
    return build_net_tree_from_sequence(view, seq);
}

// ---------------------------------------------------------------------------
// Augmentation
// ---------------------------------------------------------------------------

void NetTree::finalize() {
    int m = size();
    if (m == 0) return;
    depth_.assign(m, 0);
    std::vector<int> order; // preorder, parents before children
    order.reserve(m);
    std::vector<int> stack = {root};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (int c : verts[v].children) {
            depth_[c] = depth_[v] + 1;
            stack.push_back(c);
        }
    }

    // Jump pointers.
    int levels = 1;
    int maxd = 0;
    for (int v = 0; v < m; ++v) maxd = std::max(maxd, depth_[v]);
    while ((1 << levels) <= maxd) ++levels;
    jump_.assign(levels, std::vector<int>(m, -1));
    for (int v = 0; v < m; ++v) jump_[0][v] = verts[v].parent;
    for (int j = 1; j < levels; ++j)
        for (int v = 0; v < m; ++v)
            jump_[j][v] = jump_[j - 1][v] < 0 ? -1 : jump_[j - 1][jump_[j - 1][v]];

    // Long-path (by height) decomposition into ladders, each doubled upward.
    std::vector<int> height(m, 0), heavy(m, -1);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int v = *it;
        for (int c : verts[v].children)
            if (height[c] + 1 > height[v]) {
                height[v] = height[c] + 1;
                heavy[v] = c;
            }
    }
    ladder_id_.assign(m, -1);
    std::vector<int> pos_in_ladder(m, 0);
    ladders_.clear();
    for (int v : order) {
        if (ladder_id_[v] >= 0) continue;
        // v is a path head; walk the heavy chain down.
        std::vector<int> path;
        for (int u = v; u >= 0; u = heavy[u]) path.push_back(u);
        int len = static_cast<int>(path.size());
        // Extend upward by len extra ancestors.
        std::vector<int> ext;
        int up = verts[v].parent;
        for (int i = 0; i < len && up >= 0; ++i) {
            ext.push_back(up);
            up = verts[up].parent;
        }
        std::reverse(ext.begin(), ext.end());
        int lid = static_cast<int>(ladders_.size());
        std::vector<int> lad;
        lad.reserve(ext.size() + path.size());
        lad.insert(lad.end(), ext.begin(), ext.end());
        lad.insert(lad.end(), path.begin(), path.end());
        for (int u : path) {
            ladder_id_[u] = lid;
        }
        ladders_.push_back(std::move(lad));
    }
    for (size_t lid = 0; lid < ladders_.size(); ++lid) {
        const auto& lad = ladders_[lid];
        for (size_t i = 0; i < lad.size(); ++i) {
            int u = lad[i];
            if (ladder_id_[u] == static_cast<int>(lid)) pos_in_ladder[u] = static_cast<int>(i);
        }
    }
    ladder_pos_ = std::move(pos_in_ladder);

    // Euler tour + sparse table for LCA.
    euler_.clear();
    euler_depth_.clear();
    first_occ_.assign(m, -1);
    struct Frame {
        int v;
        size_t next_child;
    };
    std::vector<Frame> fs = {{root, 0}};
    while (!fs.empty()) {
        Frame& f = fs.back();
        if (first_occ_[f.v] < 0) first_occ_[f.v] = static_cast<int>(euler_.size());
        euler_.push_back(f.v);
        euler_depth_.push_back(depth_[f.v]);
        if (f.next_child < verts[f.v].children.size()) {
            int c = verts[f.v].children[f.next_child++];
            fs.push_back({c, 0});
        } else {
            fs.pop_back();
            if (!fs.empty()) {
                euler_.push_back(fs.back().v);
                euler_depth_.push_back(depth_[fs.back().v]);
            }
        }
    }
    int e = static_cast<int>(euler_.size());
    int logs = 1;
    while ((1 << logs) <= e) ++logs;
    sparse_.assign(logs, std::vector<int>(e));
    for (int i = 0; i < e; ++i) sparse_[0][i] = i;
    for (int j = 1; j < logs; ++j)
        for (int i = 0; i + (1 << j) <= e; ++i) {
            int a = sparse_[j - 1][i], b = sparse_[j - 1][i + (1 << (j - 1))];
            sparse_[j][i] = euler_depth_[a] <= euler_depth_[b] ? a : b;
        }
}

int NetTree::ancestor_at_depth(int v, int depth) const {
    assert(depth <= depth_[v]);
    int k = depth_[v] - depth;
    if (k == 0) return v;
    int j = 0;
    while ((2 << j) <= k) ++j; // j = floor(log2 k)
    int u = jump_[j][v];
    // The ladder holding u reaches at least 2^j above it.
    const auto& lad = ladders_[ladder_id_[u]];
    int pos = ladder_pos_[u] - (depth_[u] - depth);
    assert(pos >= 0 && pos < static_cast<int>(lad.size()));
    return lad[pos];
}

int NetTree::level_ancestor(PointId x, int l) const {
    int leaf = leaf_of[x];
    // Smallest depth whose vertex level is <= l; levels strictly decrease
    // with depth along the path.
    int lo = 0, hi = depth_[leaf];
    if (verts[root].level <= l) return root;
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        if (verts[ancestor_at_depth(leaf, mid)].level <= l)
            hi = mid;
        else
            lo = mid + 1;
    }
    return ancestor_at_depth(leaf, lo);
}

int NetTree::search_window() const {
    int n = num_points();
    int lg = 1;
    while ((1 << lg) < n) ++lg;
    return 6 * lg;
}

std::optional<int> NetTree::restricted_level_ancestor(PointId x, int z, int l) const {
    int leaf = leaf_of[x];
    if (tree_lca(z, leaf) != z) throw std::invalid_argument("z is not an ancestor of x");
    int lz = verts[z].level;
    int window = search_window();
    if (l > lz || l < lz - window) return std::nullopt;
    int lo = depth_[z];
    int hi = std::min(depth_[leaf], depth_[z] + window + 1);
    // Same binary search as level_ancestor, over a short depth range.
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        if (verts[ancestor_at_depth(leaf, mid)].level <= l)
            hi = mid;
        else
            lo = mid + 1;
    }
    return ancestor_at_depth(leaf, lo);
}

int NetTree::tree_lca(int u, int v) const {
    int a = first_occ_[u], b = first_occ_[v];
    if (a > b) std::swap(a, b);
    int len = b - a + 1;
    int j = 0;
    while ((2 << j) <= len) ++j;
    int x = sparse_[j][a], y = sparse_[j][b - (1 << j) + 1];
    return euler_[euler_depth_[x] <= euler_depth_[y] ? x : y];
}

// ---------------------------------------------------------------------------
// Verification and nets
// ---------------------------------------------------------------------------

std::vector<PointId> net_at_level(const NetTree& tree, int l) {
    std::vector<PointId> out;
    for (int v = 0; v < tree.size(); ++v)
        if (tree.verts[v].level < l && l <= tree.parent_level(v)) out.push_back(tree.verts[v].rep);
    return out;
}

namespace {

void check(NetTreeReport& rep, const std::string& name, bool ok, const std::string& detail) {
    rep.checks.push_back({name, ok, ok ? "" : detail});
}

} // namespace

NetTreeReport verify_net_tree(const NetTree& tree, const MetricView& view) {
    NetTreeReport rep;
    const int m = tree.size();
    const int n = view.size();

    // Structure: leaf bijection, level monotonicity, arity.
    {
        bool ok = static_cast<int>(tree.leaf_of.size()) == n;
        std::string detail;
        std::vector<char> seen(m, 0);
        for (PointId p = 0; ok && p < n; ++p) {
            int lf = tree.leaf_of[p];
            if (lf < 0 || !tree.is_leaf(lf) || tree.verts[lf].rep != p) {
                ok = false;
                detail = "leaf bijection broken at point " + std::to_string(p);
            }
        }
        for (int v = 0; ok && v < m; ++v) {
            if (!tree.is_leaf(v) && tree.verts[v].level == kLeafLevel) {
                ok = false;
                detail = "internal vertex at leaf level";
            }
            if (tree.is_leaf(v) && tree.verts[v].level != kLeafLevel) {
                ok = false;
                detail = "leaf with finite level";
            }
            if (tree.verts[v].level >= tree.parent_level(v)) {
                ok = false;
                detail = "level not below parent at vertex " + std::to_string(v);
            }
            if (!tree.is_leaf(v) && tree.verts[v].children.size() < 2) {
                ok = false;
                detail = "internal vertex with fewer than two children";
            }
        }
        check(rep, "structure", ok, detail);
    }

    // Inheritance.
    {
        bool ok = true;
        std::string detail;
        for (int v = 0; v < m && ok; ++v) {
            if (tree.is_leaf(v)) continue;
            bool found = false;
            for (int c : tree.verts[v].children) found |= tree.verts[c].rep == tree.verts[v].rep;
            if (!found) {
                ok = false;
                detail = "vertex " + std::to_string(v) + " rep not among children reps";
            }
        }
        check(rep, "inheritance", ok, detail);
    }

    // Covering and parent-child representative distance.
    {
        bool cov_ok = true, pc_ok = true;
        std::string cov_detail, pc_detail;
        for (int v = 0; v < m; ++v) {
            if (!tree.is_leaf(v)) {
                long double radius = NetTree::kCoverFactor * NetTree::scale(tree.verts[v].level);
                for (PointId p : tree.points_under(v)) {
                    if (static_cast<long double>(view.distance(tree.verts[v].rep, p)) > radius) {
                        cov_ok = false;
                        cov_detail = "covering fails at vertex " + std::to_string(v);
                    }
                }
                for (int c : tree.verts[v].children) {
                    long double bound = 2.0L * NetTree::scale(tree.verts[v].level);
                    if (static_cast<long double>(
                            view.distance(tree.verts[v].rep, tree.verts[c].rep)) > bound) {
                        pc_ok = false;
                        pc_detail = "rep distance fails at edge " + std::to_string(v) + "->" +
                                    std::to_string(c);
                    }
                }
            }
        }
        check(rep, "covering", cov_ok, cov_detail);
        check(rep, "parent_child_rep_distance", pc_ok, pc_detail);
    }

    // Packing.
    {
        bool ok = true;
        std::string detail;
        for (int v = 0; v < m && ok; ++v) {
            if (v == tree.root) continue;
            long double radius = NetTree::kPackFactor * NetTree::scale(tree.parent_level(v) - 1);
            std::vector<char> inside(n, 0);
            for (PointId p : tree.points_under(v)) inside[p] = 1;
            for (PointId p = 0; p < n; ++p) {
                if (inside[p]) continue;
                if (static_cast<long double>(view.distance(tree.verts[v].rep, p)) <= radius) {
                    ok = false;
                    detail = "packing fails at vertex " + std::to_string(v) + " point " +
                             std::to_string(p);
                    break;
                }
            }
        }
        check(rep, "packing", ok, detail);
    }

    // Rel == dRel after refresh.
    {
        bool ok = true;
        std::string detail;
        NetTree scratch = tree; // refresh mutates
        for (int v = 0; v < m && ok; ++v) {
            scratch.refresh_rel(v);
            std::vector<int> have;
            for (const RelEntry& e : scratch.verts[v].rel) have.push_back(e.vertex);
            std::sort(have.begin(), have.end());
            std::vector<int> want;
            long double reach = NetTree::kRelFactor * NetTree::scale(tree.verts[v].level);
            for (int w = 0; w < m; ++w) {
                if (tree.verts[w].level <= tree.verts[v].level &&
                    tree.verts[v].level < tree.parent_level(w) &&
                    static_cast<long double>(
                        view.distance(tree.verts[v].rep, tree.verts[w].rep)) <= reach)
                    want.push_back(w);
            }
            std::sort(want.begin(), want.end());
            if (have != want) {
                ok = false;
                detail = "Rel mismatch at vertex " + std::to_string(v);
            }
        }
        check(rep, "rel_equals_drel", ok, detail);
    }

    // Per-level net properties (separation tau^(l-1)/4, covering 4 tau^l)
    // at every occupied level.
    {
        bool ok = true;
        std::string detail;
        std::vector<int> levels;
        for (int v = 0; v < m; ++v)
            if (!tree.is_leaf(v)) levels.push_back(tree.verts[v].level);
        if (tree.root >= 0 && !tree.is_leaf(tree.root)) levels.push_back(tree.verts[tree.root].level + 1);
        std::sort(levels.begin(), levels.end());
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
        for (int l : levels) {
            std::vector<PointId> net = net_at_level(tree, l);
            long double sep = NetTree::scale(l - 1) / 4.0L;
            for (size_t i = 0; i < net.size() && ok; ++i)
                for (size_t j = i + 1; j < net.size(); ++j) {
                    if (static_cast<long double>(view.distance(net[i], net[j])) < sep) {
                        ok = false;
                        detail = "net separation fails at level " + std::to_string(l);
                        break;
                    }
                }
            long double covr = 4.0L * NetTree::scale(l);
            for (PointId p = 0; p < n && ok; ++p) {
                bool covered = false;
                for (PointId c : net)
                    if (static_cast<long double>(view.distance(p, c)) <= covr) {
                        covered = true;
                        break;
                    }
                if (!covered) {
                    ok = false;
                    detail = "net covering fails at level " + std::to_string(l);
                }
            }
            if (!ok) break;
        }
        check(rep, "level_nets", ok, detail);
    }

    return rep;
}

} // namespace dn
