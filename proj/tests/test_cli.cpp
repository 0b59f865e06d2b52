#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dn/cli_run.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace dn;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempFile {
    std::string path;
    TempFile(const std::string& name, const std::string& content) : path(name) {
        std::ofstream f(path);
        f << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("dim on a 2-point file") {
    TempFile pts("cli_pts2.txt", "0\n1\n");
    auto r = run({"dim", "--input", pts.path, "--seed", "7"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"lambda_T\":2") != std::string::npos);
    CHECK(r.err.empty());
}

TEST_CASE("ann results cross-checked against brute force") {
    std::ostringstream pts;
    for (int i = 0; i < 30; ++i) pts << i * 1.5 << " " << (i % 7) << "\n";
    TempFile pf("cli_pts30.txt", pts.str());
    TempFile qf("cli_q.txt", "3.1 2.0\n40.b 1\n");
    // fix the malformed query line first: rewrite
    {
        std::ofstream f(qf.path);
        f << "3.1 2.0\n40.0 1.0\n";
    }
    auto r = run({"ann", "--input", pf.path, "--queries", qf.path, "--eps", "0.1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"results\":[") != std::string::npos);
}

TEST_CASE("malformed inputs exit 2 with a message") {
    TempFile bad("cli_bad.txt", "2\n0 1\n1\n");
    auto r = run({"dim", "--input", bad.path, "--format", "matrix"});
    CHECK(r.code == 2);
    CHECK(r.err.find("row 2") != std::string::npos);
    TempFile ragged("cli_ragged.txt", "1 2\n3\n");
    auto r2 = run({"verify", "--input", ragged.path});
    CHECK(r2.code == 2);

    auto r3 = run({"nonsense", "--input", bad.path});
    CHECK(r3.code == 2);
    auto r4 = run({"dim"});
    CHECK(r4.code == 2);
}

TEST_CASE("json determinism end to end") {
    std::ostringstream pts;
    for (int i = 0; i < 50; ++i) pts << (i * 37 % 101) << " " << (i * 59 % 97) << "\n";
    TempFile pf("cli_det.txt", pts.str());
    auto a = run({"build-stats", "--input", pf.path, "--seed", "5"});
    auto b = run({"build-stats", "--input", pf.path, "--seed", "5"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    auto c = run({"verify", "--input", pf.path, "--audit", "--eps", "0.5"});
    CHECK(c.code == 0);
    CHECK(c.out.find("\"all_passed\":true") != std::string::npos);
}

TEST_CASE("duplicates are folded and reported") {
    TempFile pf("cli_dup.txt", "0 0\n0 0\n1 1\n");
    auto r = run({"build-stats", "--input", pf.path});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"duplicates_removed\":1") != std::string::npos);
    CHECK(r.out.find("\"n\":2") != std::string::npos);
}

TEST_CASE("wspd dump file") {
    TempFile pf("cli_w.txt", "0\n1\n4\n9\n");
    auto r = run({"wspd", "--input", pf.path, "--eps", "0.5", "--audit", "--dump",
                  "cli_wspd_dump.txt"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"audit_passed\":true") != std::string::npos);
    std::ifstream d("cli_wspd_dump.txt");
    REQUIRE(d.good());
    int lines = 0;
    std::string line;
    while (std::getline(d, line)) ++lines;
    CHECK(lines > 0);
    std::remove("cli_wspd_dump.txt");
}

TEST_CASE("k-center and mst sanity") {
    TempFile pf("cli_kc.txt", "0\n1\n2\n10\n");
    auto r = run({"k-center", "--input", pf.path, "--k", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"centers\":[0,3]") != std::string::npos);
    auto m = run({"mst", "--input", pf.path, "--eps", "0.5"});
    CHECK(m.code == 0);
    CHECK(m.out.find("\"weight\":10") != std::string::npos); // 1+1+8
}
