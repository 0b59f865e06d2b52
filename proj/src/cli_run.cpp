#include "dn/cli_run.hpp"

#include "dn/ann.hpp"
#include "dn/crs.hpp"
#include "dn/dim.hpp"
#include "dn/json_writer.hpp"
#include "dn/lipschitz.hpp"
#include "dn/measure.hpp"
#include "dn/wspd.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>

namespace dn {

namespace {

constexpr int kSpecRev = 1;

struct CliError : std::runtime_error {
    int code;
    CliError(int c, const std::string& m) : std::runtime_error(m), code(c) {}
};

struct Options {
    std::string command;
    std::string input;
    std::string format = "points";
    std::string queries;
    std::string dump;
    double eps = 0.1;
    uint64_t seed = 0;
    int k = 1;
    bool audit = false;
};

Options parse_args(const std::vector<std::string>& args) {
    if (args.empty()) throw CliError(2, "usage: dn <command> --input <path> [options]");
    Options opt;
    opt.command = args[0];
    for (size_t i = 1; i < args.size(); ++i) {
        const std::string& a = args[i];
        auto need = [&](const char* name) -> const std::string& {
            if (i + 1 >= args.size()) throw CliError(2, std::string(name) + " needs a value");
            return args[++i];
        };
        if (a == "--input") opt.input = need("--input");
        else if (a == "--format") opt.format = need("--format");
        else if (a == "--queries") opt.queries = need("--queries");
        else if (a == "--dump") opt.dump = need("--dump");
        else if (a == "--eps") opt.eps = std::stod(need("--eps"));
        else if (a == "--seed") opt.seed = std::stoull(need("--seed"));
        else if (a == "--k") opt.k = std::stoi(need("--k"));
        else if (a == "--audit") opt.audit = true;
        else throw CliError(2, "unknown flag: " + a);
    }
    if (opt.input.empty()) throw CliError(2, "--input is required");
    if (opt.format != "points" && opt.format != "matrix")
        throw CliError(2, "--format must be points or matrix");
    return opt;
}

LoadedPoints load_input(const Options& opt) {
    if (opt.format == "matrix") return load_matrix_file(opt.input);
    return load_points_file(opt.input);
}

std::vector<QueryPoint> load_queries(const Options& opt, const MetricView& view) {
    if (opt.queries.empty()) throw CliError(2, "--queries is required for this command");
    std::ifstream in(opt.queries);
    if (!in) throw CliError(2, "cannot open " + opt.queries);
    std::vector<QueryPoint> out;
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
        if (row.empty()) continue;
        if (view.is_euclidean()) {
            if (static_cast<int>(row.size()) != view.dim())
                throw CliError(2, opt.queries + ": line " + std::to_string(lineno) +
                                      ": expected " + std::to_string(view.dim()) +
                                      " coordinates");
            out.push_back(QueryPoint::coords(std::move(row)));
        } else {
            if (static_cast<int>(row.size()) != view.size())
                throw CliError(2, opt.queries + ": line " + std::to_string(lineno) +
                                      ": expected a distance row of length " +
                                      std::to_string(view.size()));
            out.push_back(QueryPoint::distance_row(std::move(row)));
        }
    }
    return out;
}

void cmd_build_stats(const Options& opt, const LoadedPoints& lp, JsonWriter& j) {
    const MetricView& v = lp.view;
    v.reset_distance_calls();
    NetTree t = build_net_tree(v, opt.seed);
    uint64_t calls = v.distance_calls();
    std::map<int, int> hist;
    for (int u = 0; u < t.size(); ++u)
        if (!t.is_leaf(u)) ++hist[t.verts[u].level];
    j.key("vertex_count").value(t.size());
    j.key("leaf_count").value(t.num_points());
    j.key("max_out_degree").value(t.max_out_degree());
    j.key("distance_calls").value(static_cast<long long>(calls));
    j.key("level_histogram").begin_array();
    for (auto [level, count] : hist) {
        j.begin_object();
        j.key("level").value(level);
        j.key("vertices").value(count);
        j.end_object();
    }
    j.end_array();
    if (!opt.dump.empty()) {
        std::ofstream d(opt.dump);
        d << t.to_json() << "\n";
    }
}

void cmd_ann(const Options& opt, const LoadedPoints& lp, JsonWriter& j) {
    if (!(opt.eps > 0.0)) throw CliError(1, "--eps must be positive");
    const MetricView& v = lp.view;
    auto queries = load_queries(opt, v);
    AnnIndex idx = AnnIndex::build(v, opt.seed);
    j.key("results").begin_array();
    for (const QueryPoint& q : queries) {
        PointId p = ann_query(idx, v, q, opt.eps);
        j.begin_object();
        j.key("id").value(lp.dedup.kept[p]);
        j.key("distance").value(query_distance(v, q, p));
        j.end_object();
    }
    j.end_array();
}

void cmd_wspd(const Options& opt, const LoadedPoints& lp, JsonWriter& j) {
    const MetricView& v = lp.view;
    NetTree t = build_net_tree(v, opt.seed);
    WspdPairs w = build_wspd(t, v, opt.eps);
    j.key("pair_count").value(w.size());
    if (opt.audit) {
        auto rep = verify_wspd(w, t, v);
        j.key("audit_passed").value(rep.passed);
        if (!rep.passed) j.key("violation").value(rep.violation);
    }
    if (!opt.dump.empty()) {
        std::ofstream d(opt.dump);
        for (auto [a, b] : w.pairs) {
            d << a << " " << b << " " << lp.dedup.kept[t.verts[a].rep] << " "
              << lp.dedup.kept[t.verts[b].rep] << " ";
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g",
                          v.distance(t.verts[a].rep, t.verts[b].rep));
            d << buf << "\n";
        }
    }
}

void cmd_spanner(const Options& opt, const LoadedPoints& lp, JsonWriter& j) {
    const MetricView& v = lp.view;
    WeightedGraph g = build_spanner(v, opt.eps, opt.seed);
    j.key("edge_count").value(g.edges.size());
    double total = 0;
    for (const auto& e : g.edges) total += e.w;
    j.key("total_weight").value(total);
    if (opt.audit) {
        // quadratic stretch audit via Dijkstra from every source
        int n = v.size();
        std::vector<std::vector<std::pair<int, double>>> adj(n);
        for (const auto& e : g.edges) {
            adj[e.a].push_back({e.b, e.w});
            adj[e.b].push_back({e.a, e.w});
        }
        double worst = 1.0;
        std::vector<double> dist(n);
        for (int s = 0; s < n; ++s) {
            std::fill(dist.begin(), dist.end(), kInf);
            dist[s] = 0;
            using Item = std::pair<double, int>;
            std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
            pq.push({0.0, s});
            while (!pq.empty()) {
                auto [dd, u] = pq.top();
                pq.pop();
                if (dd > dist[u]) continue;
                for (auto [w2, ww] : adj[u])
                    if (dd + ww < dist[w2]) {
                        dist[w2] = dd + ww;
                        pq.push({dist[w2], w2});
                    }
            }
            for (int u = 0; u < n; ++u)
                if (u != s) worst = std::max(worst, dist[u] / v.distance(s, u));
        }
        j.key("max_stretch").value(worst);
    }
    if (!opt.dump.empty()) {
        std::ofstream d(opt.dump);
        for (const auto& e : g.edges) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", e.w);
            d << lp.dedup.kept[e.a] << " " << lp.dedup.kept[e.b] << " " << buf << "\n";
        }
    }
}

void cmd_crs(const Options& opt, const LoadedPoints& lp, JsonWriter& j) {
    const MetricView& v = lp.view;
    CrsIndex crs = CrsIndex::build(v, opt.eps, opt.seed);
    // Queries: one pair of original point ids per line.
    std::ifstream in(opt.queries);
    if (opt.queries.empty() || !in) throw CliError(2, "--queries file with id pairs required");
    j.key("results").begin_array();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        long a, b;
        if (!(ls >> a >> b))
            throw CliError(2, opt.queries + ": line " + std::to_string(lineno) + ": expected two ids");
        if (a < 0 || b < 0 || a >= static_cast<long>(lp.dedup.canon_of.size()) ||
            b >= static_cast<long>(lp.dedup.canon_of.size()))
            throw CliError(1, "point id out of range at line " + std::to_string(lineno));
        double est = crs.query(lp.dedup.canon_of[a], lp.dedup.canon_of[b]);
        j.begin_object();
        j.key("a").value(static_cast<long long>(a));
        j.key("b").value(static_cast<long long>(b));
        j.key("estimate").value(est);
        j.end_object();
    }
    j.end_array();
}

void cmd_measure(const Options& opt, const LoadedPoints& lp, JsonWriter& j) {
    const MetricView& v = lp.view;
    NetTree t = build_net_tree(v, opt.seed);
    auto m = build_doubling_measure(t);
    j.key("gamma").value(m.gamma);
    j.key("weights").begin_array();
    for (PointId p = 0; p < v.size(); ++p) j.value(m.mu(p));
    j.end_array();
    if (v.size() >= 2) {
        auto rep = measure_doubling_ratio(v, m, 16, opt.seed);
        j.key("ratio_report").begin_object();
        j.key("max_ratio").value(rep.max_ratio);
        j.key("witness_point").value(rep.witness_point >= 0
                                         ? lp.dedup.kept[rep.witness_point]
                                         : -1);
        j.key("witness_radius").value(rep.witness_radius);
        j.key("samples").value(rep.samples);
        j.end_object();
    }
    if (!opt.dump.empty()) {
        std::ofstream d(opt.dump);
        for (PointId p = 0; p < v.size(); ++p) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", m.mu(p));
            d << lp.dedup.kept[p] << " " << buf << "\n";
        }
    }
}

/// Mapping file: "domain coords | codomain value(s)" per line.
void cmd_lipschitz(const Options& opt, JsonWriter& j) {
    std::ifstream in(opt.input);
    if (!in) throw CliError(2, "cannot open " + opt.input);
    std::vector<std::vector<double>> dom_rows, cod_rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        size_t bar = line.find('|');
        if (bar == std::string::npos)
            throw CliError(2, opt.input + ": line " + std::to_string(lineno) + ": missing '|'");
        auto parse = [&](const std::string& part) {
            std::istringstream ls(part);
            std::vector<double> row;
            double x;
            while (ls >> x) row.push_back(x);
            return row;
        };
        auto d = parse(line.substr(0, bar));
        auto c = parse(line.substr(bar + 1));
        if (d.empty() || c.empty())
            throw CliError(2, opt.input + ": line " + std::to_string(lineno) + ": empty side");
        if (!dom_rows.empty() && (d.size() != dom_rows[0].size() || c.size() != cod_rows[0].size()))
            throw CliError(2, opt.input + ": line " + std::to_string(lineno) + ": arity mismatch");
        dom_rows.push_back(std::move(d));
        cod_rows.push_back(std::move(c));
    }
    if (dom_rows.size() < 2) throw CliError(1, "need at least two mapping rows");
    int dd = static_cast<int>(dom_rows[0].size());
    int cd = static_cast<int>(cod_rows[0].size());
    std::vector<double> dflat, cflat;
    for (auto& r : dom_rows) dflat.insert(dflat.end(), r.begin(), r.end());
    for (auto& r : cod_rows) cflat.insert(cflat.end(), r.begin(), r.end());
    MetricView dom = MetricView::euclidean(std::move(dflat), dd);
    MetricView cod = MetricView::euclidean(std::move(cflat), cd);
    MappingView m = MappingView::metric_codomain(dom, cod);
    LipschitzResult approx = lipschitz_wspd(m, opt.eps, opt.seed);
    j.key("k_wspd").value(approx.constant);
    j.key("witness").begin_array().value(approx.witness_a).value(approx.witness_b).end_array();
    if (opt.audit) {
        LipschitzResult exact = lipschitz_exact(m);
        j.key("k_exact").value(exact.constant);
        j.key("exact_witness")
            .begin_array()
            .value(exact.witness_a)
            .value(exact.witness_b)
            .end_array();
    }
}

void cmd_dim(const Options& opt, const LoadedPoints& lp, JsonWriter& j) {
    auto est = estimate_dim(lp.view, opt.seed);
    j.key("lambda_T").value(est.lambda_t);
    j.key("dim_estimate").value(est.dim_estimate);
    j.key("escalation_trace").begin_array();
    for (const auto& s : est.trace) {
        j.begin_object();
        j.key("subset_size").value(s.subset_size);
        j.key("delta").value(s.delta);
        j.key("rounds").value(s.rounds_used);
        j.end_object();
    }
    j.end_array();
}

void cmd_verify(const Options& opt, const LoadedPoints& lp, JsonWriter& j) {
    const MetricView& v = lp.view;
    NetTree t = build_net_tree(v, opt.seed);
    auto rep = verify_net_tree(t, v);
    auto ax = check_metric_axioms(v, 1000, opt.seed);
    j.key("axioms_passed").value(ax.passed);
    j.key("checks").begin_array();
    for (const auto& c : rep.checks) {
        j.begin_object();
        j.key("name").value(c.name);
        j.key("passed").value(c.passed);
        if (!c.passed) j.key("detail").value(c.detail);
        j.end_object();
    }
    j.end_array();
    bool all = rep.all_passed() && ax.passed;
    if (opt.audit && v.size() >= 2) {
        WspdPairs w = build_wspd(t, v, opt.eps);
        auto wrep = verify_wspd(w, t, v);
        j.key("wspd_passed").value(wrep.passed);
        all = all && wrep.passed;
    }
    j.key("all_passed").value(all);
}

void cmd_all_nn(const Options& opt, const LoadedPoints& lp, JsonWriter& j) {
    const MetricView& v = lp.view;
    auto nn = all_nearest_neighbors(v, opt.seed);
    j.key("results").begin_array();
    for (PointId p = 0; p < v.size(); ++p) {
        j.begin_object();
        j.key("id").value(lp.dedup.kept[p]);
        j.key("nn").value(lp.dedup.kept[nn[p]]);
        j.key("distance").value(v.distance(p, nn[p]));
        j.end_object();
    }
    j.end_array();
}

void cmd_mst(const Options& opt, const LoadedPoints& lp, JsonWriter& j) {
    const MetricView& v = lp.view;
    WeightedGraph t = approx_mst(v, opt.eps, opt.seed);
    double total = 0;
    for (const auto& e : t.edges) total += e.w;
    j.key("weight").value(total);
    j.key("edges").begin_array();
    for (const auto& e : t.edges) {
        j.begin_array();
        j.value(lp.dedup.kept[e.a]);
        j.value(lp.dedup.kept[e.b]);
        j.value(e.w);
        j.end_array();
    }
    j.end_array();
}

void cmd_k_center(const Options& opt, const LoadedPoints& lp, JsonWriter& j) {
    const MetricView& v = lp.view;
    Hst h = build_coarse_hst(v, opt.seed);
    GreedySequence seq = net_permutation(v, h);
    auto res = k_center(seq, opt.k);
    j.key("k").value(opt.k);
    j.key("radius").value(res.radius);
    j.key("centers").begin_array();
    for (PointId c : res.centers) j.value(lp.dedup.kept[c]);
    j.end_array();
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        Options opt = parse_args(args);
        JsonWriter j;
        j.begin_object();
        j.key("spec_rev").value(kSpecRev);
        j.key("command").value(opt.command);
        if (opt.command == "lipschitz") {
            cmd_lipschitz(opt, j);
        } else {
            LoadedPoints lp = load_input(opt);
            j.key("n").value(lp.view.size());
            j.key("duplicates_removed").value(lp.dedup.duplicates_removed);
            if (opt.command == "build-stats") cmd_build_stats(opt, lp, j);
            else if (opt.command == "ann") cmd_ann(opt, lp, j);
            else if (opt.command == "wspd") cmd_wspd(opt, lp, j);
            else if (opt.command == "spanner") cmd_spanner(opt, lp, j);
            else if (opt.command == "crs") cmd_crs(opt, lp, j);
            else if (opt.command == "measure") cmd_measure(opt, lp, j);
            else if (opt.command == "dim") cmd_dim(opt, lp, j);
            else if (opt.command == "verify") cmd_verify(opt, lp, j);
            else if (opt.command == "all-nn") cmd_all_nn(opt, lp, j);
            else if (opt.command == "mst") cmd_mst(opt, lp, j);
            else if (opt.command == "k-center") cmd_k_center(opt, lp, j);
            else throw CliError(2, "unknown command: " + opt.command);
        }
        j.end_object();
        out << j.str() << "\n";
        return 0;
    } catch (const CliError& e) {
        err << "error: " << e.what() << "\n";
        return e.code;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const DuplicatePointsError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace dn
