#include "dn/greedy.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <queue>
#include <unordered_set>

namespace dn {

namespace {

/// Order-exact representation of x * 2^shift products; comparing
/// delta * n^4 keys against alpha values must not overflow for any n.
struct ScaledValue {
    double mant = 0.0; // in [1, 2) for finite positives, 0 for zero
    long long ex = 0;
    bool inf = false;

    static ScaledValue of(double x) {
        ScaledValue s;
        if (std::isinf(x)) {
            s.inf = true;
            return s;
        }
        if (x <= 0.0) return s;
        int e;
        s.mant = std::frexp(x, &e) * 2.0; // frexp gives [0.5,1)
        s.ex = e - 1;
        return s;
    }

    ScaledValue times(const ScaledValue& o) const {
        if (inf || o.inf) return {0.0, 0, true};
        if (mant == 0.0 || o.mant == 0.0) return {};
        ScaledValue r;
        r.mant = mant * o.mant; // in [1,4)
        r.ex = ex + o.ex;
        if (r.mant >= 2.0) {
            r.mant *= 0.5;
            ++r.ex;
        }
        return r;
    }

    bool operator<(const ScaledValue& o) const {
        if (inf != o.inf) return !inf;
        if (inf) return false;
        if ((mant == 0.0) != (o.mant == 0.0)) return mant == 0.0;
        if (mant == 0.0) return false;
        if (ex != o.ex) return ex < o.ex;
        return mant < o.mant;
    }
};

struct PointEntry {
    double alpha;
    PointId pid;
    bool operator<(const PointEntry& o) const { // priority_queue: top = max alpha, min pid
        if (alpha != o.alpha) return alpha < o.alpha;
        return pid > o.pid;
    }
};

struct NodeEntry {
    ScaledValue key;
    int preorder;
    int node;
    bool operator<(const NodeEntry& o) const { // top = max key, min preorder
        if (key < o.key) return true;
        if (o.key < key) return false;
        return preorder > o.preorder;
    }
};

struct Friend {
    PointId pid;
    double dist;
};

/// Shared engine behind greedy_permutation and net_permutation. Maintains
/// per-active-point alpha/server values, per-center clusters, and the lazily
/// trimmed friends lists of section-3.1 style. Candidate discovery at a
/// center birth runs a bounded BFS over the friends graph (seeded from the
/// current server and the two-phases-ago server); the single-list scan the
/// analysis sketches can miss centers born within the last two phases.
class GreedyCore {
public:
    GreedyCore(const MetricView& view, bool audit)
        : view_(view), n_(view.size()), audit_(audit) {
        alpha_.assign(n_, kInf);
        server_.assign(n_, -1);
        active_.assign(n_, false);
        is_center_.assign(n_, false);
        creation_r_.assign(n_, 0.0);
        friends_.resize(n_);
        cluster_.resize(n_);
        hist_.resize(n_);
    }

    GreedySequence run_exact() {
        GreedySequence seq = make_seq(true);
        if (n_ == 0) return seq;
        // p_1 = point 0; alphas seeded by one full scan, as in the naive
        // algorithm.
        for (PointId q = 0; q < n_; ++q) {
            active_[q] = true;
            if (q == 0) continue;
            alpha_[q] = view_.distance(q, 0);
            server_[q] = 0;
            hist_[q].push_back({0, 0});
            cluster_[0].push_back(q);
            pq_.push({alpha_[q], q});
        }
        install_first_center(0, seq);
        while (static_cast<int>(seq.order.size()) < n_) {
            auto [pid, a] = pop_point();
            extract_center(pid, a, seq);
        }
        return seq;
    }

    GreedySequence run_net_permut(const Hst& hst) {
        GreedySequence seq = make_seq(false);
        if (n_ == 0) return seq;
        hst_ = &hst;
        ScaledValue nv = ScaledValue::of(static_cast<double>(n_));
        ScaledValue n4 = nv.times(nv).times(nv).times(nv);
        preorder_.assign(hst.size(), 0);
        compute_preorder(hst);
        // Root representative is the only active point at the start.
        PointId r0 = hst.nodes[hst.root].rep;
        active_[r0] = true;
        pq_.push({kInf, r0});
        if (!hst.is_leaf(hst.root))
            nq_.push({ScaledValue::of(hst.nodes[hst.root].delta).times(n4), preorder_[hst.root], hst.root});
        n4_ = n4;
        bool first = true;
        while (static_cast<int>(seq.order.size()) < n_) {
            // Larger of the two heap tops; points win ties so that nodes
            // with delta * n^4 == alpha stay active through the boundary.
            skip_stale();
            bool have_point = !pq_.empty();
            bool split_now = false;
            if (!nq_.empty()) {
                if (!have_point) {
                    split_now = true;
                } else {
                    ScaledValue pk = ScaledValue::of(pq_.top().alpha);
                    split_now = pk < nq_.top().key;
                }
            }
            if (split_now) {
                NodeEntry ne = nq_.top();
                nq_.pop();
                split_node(ne.node);
                continue;
            }
            auto [pid, a] = pop_point();
            if (first) {
                install_first_center(pid, seq);
                first = false;
            } else {
                extract_center(pid, a, seq);
            }
        }
        return seq;
    }

    std::string audit_message;

private:
    GreedySequence make_seq(bool exact) {
        GreedySequence s;
        s.exact = exact;
        s.n = n_;
        return s;
    }

    void compute_preorder(const Hst& hst) {
        int counter = 0;
        std::vector<int> stack = {hst.root};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            preorder_[v] = counter++;
            if (!hst.is_leaf(v)) {
                stack.push_back(hst.nodes[v].right);
                stack.push_back(hst.nodes[v].left);
            }
        }
    }

    void skip_stale() {
        while (!pq_.empty()) {
            const PointEntry& e = pq_.top();
            if (is_center_[e.pid] || e.alpha != alpha_[e.pid])
                pq_.pop();
            else
                break;
        }
    }

    std::pair<PointId, double> pop_point() {
        skip_stale();
        assert(!pq_.empty());
        PointEntry e = pq_.top();
        pq_.pop();
        return {e.pid, e.alpha};
    }

    void install_first_center(PointId p, GreedySequence& seq) {
        seq.order.push_back(p);
        seq.pick_alpha.push_back(kInf);
        seq.prev_center.push_back(p);
        is_center_[p] = true;
        creation_r_[p] = kInf;
        friends_[p].push_back({p, 0.0});
        alpha_[p] = 0.0;
        server_[p] = p;
        active_[p] = true;
        hist_[p].push_back({0, p});
        cluster_[p].push_back(p);
        phase_ = 0;
        phase_open_ = kInf;
    }

    void advance_phase(double rk) {
        if (std::isinf(phase_open_)) {
            phase_ = 1;
            phase_open_ = rk;
        } else if (rk <= phase_open_ / 2.0) {
            ++phase_;
            phase_open_ = rk;
        }
    }

    PointId server_at_phase_end(PointId q, int phase) const {
        const auto& h = hist_[q];
        PointId best = h.front().second;
        for (const auto& [ph, srv] : h) {
            if (ph <= phase)
                best = srv;
            else
                break;
        }
        return best;
    }

    void refresh_friends(PointId f, double r_cur) {
        double keep = std::min(8.0 * r_cur, 4.0 * creation_r_[f]);
        auto& lst = friends_[f];
        lst.erase(std::remove_if(lst.begin(), lst.end(),
                                 [&](const Friend& e) { return e.dist > keep; }),
                  lst.end());
    }

    /// Centers near pk reachable through the friends graph, with their
    /// distances to pk; bounded by the packing property. A friend's cached
    /// distance plus the owner's distance to pk prunes out-of-reach
    /// neighbors without oracle calls.
    std::vector<Friend> discover_candidates(PointId pk, double rk) {
        std::vector<Friend> cand;
        std::unordered_set<PointId> seen;
        std::vector<size_t> queue; // indices into cand
        double reach = 12.0 * rk;
        auto consider = [&](PointId g, double lower_bound) {
            if (g < 0 || lower_bound > reach || seen.count(g)) return;
            seen.insert(g);
            double d = view_.distance(g, pk);
            if (d <= reach) {
                cand.push_back({g, d});
                queue.push_back(cand.size() - 1);
            }
        };
        consider(server_[pk], 0.0);
        consider(server_at_phase_end(pk, phase_ - 2), 0.0);
        while (!queue.empty()) {
            size_t fi = queue.back();
            queue.pop_back();
            PointId f = cand[fi].pid;
            double df = cand[fi].dist;
            refresh_friends(f, rk);
            for (const Friend& e : friends_[f]) consider(e.pid, std::fabs(e.dist - df));
        }
        return cand;
    }

    void extract_center(PointId pk, double rk, GreedySequence& seq) {
        PointId old_server = server_[pk];
        advance_phase(rk);
        last_rk_ = rk;
        seq.order.push_back(pk);
        seq.pick_alpha.push_back(rk);
        seq.prev_center.push_back(old_server);

        is_center_[pk] = true;
        creation_r_[pk] = rk;
        std::vector<Friend> cand = discover_candidates(pk, rk);
        if (audit_) audit_candidates(pk, rk, cand);
        friends_[pk].push_back({pk, 0.0});
        for (const Friend& c : cand) {
            if (c.dist <= 4.0 * rk) friends_[pk].push_back(c);
            if (c.dist <= std::min(8.0 * rk, 4.0 * creation_r_[c.pid]))
                friends_[c.pid].push_back({pk, c.dist});
        }

        // Rescan the clusters that can contain improved points. Each
        // source's distance to pk is already known from discovery, so a
        // member whose alpha is below |d(src, pk) - alpha| cannot improve
        // and costs no oracle call.
        refresh_friends(old_server, rk);
        if (audit_) audit_scan_list(old_server, rk);
        std::unordered_map<PointId, double> cand_dist;
        cand_dist.reserve(cand.size() * 2);
        for (const Friend& c : cand) cand_dist[c.pid] = c.dist;
        cand_dist[old_server] = rk;
        std::vector<PointId> sources;
        sources.push_back(old_server);
        for (const Friend& e : friends_[old_server])
            if (e.pid != old_server) sources.push_back(e.pid);
        for (PointId src : sources) {
            auto it = cand_dist.find(src);
            double dsrc = it != cand_dist.end() ? it->second : view_.distance(src, pk);
            rescan_cluster(src, pk, dsrc);
        }

        alpha_[pk] = 0.0;
        server_[pk] = pk;
        hist_[pk].push_back({phase_, pk});
        cluster_[pk].push_back(pk);
    }

    void rescan_cluster(PointId center, PointId pk, double d_center_pk) {
        auto& members = cluster_[center];
        size_t w = 0;
        for (size_t i = 0; i < members.size(); ++i) {
            PointId q = members[i];
            if (server_[q] != center || !active_[q]) continue; // lazily dropped
            if (q == pk) continue;                             // becoming a center
            // alpha[q] = d(q, center); the triangle bound rules out most
            // members without touching the oracle.
            if (std::fabs(d_center_pk - alpha_[q]) >= alpha_[q]) {
                members[w++] = q;
                continue;
            }
            double d = view_.distance(q, pk);
            if (d < alpha_[q]) {
                alpha_[q] = d;
                server_[q] = pk;
                hist_[q].push_back({phase_, pk});
                cluster_[pk].push_back(q);
                pq_.push({d, q});
                continue; // moved away; do not keep here
            }
            members[w++] = q;
        }
        members.resize(w);
    }

    void split_node(int v) {
        const Hst& hst = *hst_;
        int a = hst.nodes[v].left, b = hst.nodes[v].right;
        if (hst.nodes[b].rep == hst.nodes[v].rep) std::swap(a, b);
        assert(hst.nodes[a].rep == hst.nodes[v].rep);
        // The inheriting child keeps the parent's alpha/server untouched;
        // only the sibling's representative needs a fresh alpha, found by
        // scanning the friends list of the serving center.
        activate_point(hst.nodes[b].rep, hst.nodes[a].rep);
        for (int child : {a, b})
            if (!hst.is_leaf(child))
                nq_.push({ScaledValue::of(hst.nodes[child].delta).times(n4_), preorder_[child], child});
    }

    void activate_point(PointId y, PointId sibling_rep) {
        assert(!active_[y]);
        active_[y] = true;
        PointId s = server_[sibling_rep];
        refresh_friends(s, last_rk_);
        double d_s = view_.distance(y, s);
        double best = d_s;
        PointId best_c = s;
        for (const Friend& e : friends_[s]) {
            if (e.pid == s) continue;
            if (std::fabs(e.dist - d_s) > best) continue; // triangle lower bound
            double d = view_.distance(y, e.pid);
            if (d < best || (d == best && e.pid < best_c)) {
                best = d;
                best_c = e.pid;
            }
        }
        alpha_[y] = best;
        server_[y] = best_c;
        hist_[y].push_back({phase_, best_c});
        cluster_[best_c].push_back(y);
        pq_.push({best, y});
    }

    void audit_candidates(PointId pk, double rk, const std::vector<Friend>& cand) {
        // Brute-force: every existing center within min(8 rk, 4 R_i) of pk
        // must have been discovered.
        std::unordered_set<PointId> got;
        for (const Friend& c : cand) got.insert(c.pid);
        for (PointId c = 0; c < n_; ++c) {
            if (!is_center_[c] || c == pk) continue;
            double d = view_.distance(c, pk);
            if (d <= std::min(8.0 * rk, 4.0 * creation_r_[c]) && !got.count(c)) {
                audit_message = "center " + std::to_string(c) + " missed at birth of " +
                                std::to_string(pk);
            }
        }
    }

    void audit_scan_list(PointId srv, double rk) {
        // The refreshed friends list of the serving center must contain
        // every center within the stated radius.
        std::unordered_set<PointId> got;
        for (const Friend& e : friends_[srv]) got.insert(e.pid);
        double reach = std::min(8.0 * rk, 4.0 * creation_r_[srv]);
        for (PointId c = 0; c < n_; ++c) {
            if (!is_center_[c]) continue;
            if (view_.distance(srv, c) <= reach && !got.count(c)) {
                audit_message = "friends list of " + std::to_string(srv) + " missing center " +
                                std::to_string(c);
            }
        }
    }

    const MetricView& view_;
    int n_;
    bool audit_;
    const Hst* hst_ = nullptr;
    ScaledValue n4_;
    double last_rk_ = kInf;

    std::vector<double> alpha_;
    std::vector<PointId> server_;
    std::vector<char> active_;
    std::vector<char> is_center_;
    std::vector<double> creation_r_;
    std::vector<std::vector<Friend>> friends_;
    std::vector<std::vector<PointId>> cluster_;
    std::vector<std::vector<std::pair<int, PointId>>> hist_;
    std::vector<int> preorder_;
    std::priority_queue<PointEntry> pq_;
    std::priority_queue<NodeEntry> nq_;
    int phase_ = 0;
    double phase_open_ = kInf;
};

} // namespace

GreedySequence greedy_permutation(const MetricView& view) {
    GreedyCore core(view, false);
    return core.run_exact();
}

GreedySequence net_permutation(const MetricView& view, const Hst& hst) {
    GreedyCore core(view, false);
    return core.run_net_permut(hst);
}

KCenterResult k_center(const GreedySequence& seq, int k) {
    if (k < 1 || k > seq.n) throw std::invalid_argument("k out of range");
    KCenterResult res;
    res.centers.assign(seq.order.begin(), seq.order.begin() + k);
    res.radius = seq.radius_after(k) * seq.coverage_factor();
    return res;
}

bool audit_friends_soundness(const MetricView& view, const Hst* hst, std::string& message) {
    GreedyCore core(view, true);
    if (hst)
        core.run_net_permut(*hst);
    else
        core.run_exact();
    message = core.audit_message;
    return message.empty();
}

} // namespace dn
