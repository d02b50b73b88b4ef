#include "qfidyn/commands.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace qfidyn::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    REQUIRE(it != header.end());
    return static_cast<std::size_t>(it - header.begin());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("qfidyn_cli_" + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }
    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(path_ / name) << text;
        return path_ / name;
    }

private:
    fs::path path_;
};

const std::string kSymmetries = std::string(QFIDYN_DATA_DIR) + "/two_qubit_symmetries.json";

}  // namespace

TEST_CASE("temperature grid parsing") {
    const auto lin = parse_temperature_grid("1:3:3", false);
    REQUIRE(lin.size() == 3);
    CHECK(lin[1].temperature == 2.0);
    CHECK(lin[2].beta == doctest::Approx(1.0 / 3.0));
    const auto lg = parse_temperature_grid("0.1:10:3", true);
    CHECK(lg[1].temperature == doctest::Approx(1.0));
    CHECK(lg[2].temperature == 10.0);
    CHECK(parse_temperature_grid("2:2:1", true).size() == 1);
    for (const char* bad : {"1:2", "0:1:5", "2:1:5", "1:2:0", "a:2:3", "1:2:3x", "-1:2:3"}) {
        CHECK_THROWS_AS(parse_temperature_grid(bad, true), std::invalid_argument);
    }
}

TEST_CASE("qfi: two-qubit table and limits") {
    const Run r = run({"qfi", "--field", "0.5", "--temp-grid", "0.05:5:20", "--ground-state", "--beta-free"});
    CHECK(r.code == kExitUsage);  // unknown flag

    const Run ok = run({"qfi", "--field", "0.5", "--temp-grid", "0.05:5:20", "--ground-state",
                        "--symmetries", "analytic"});
    REQUIRE(ok.code == kExitOk);
    const auto rows = csv(ok.out);
    REQUIRE(rows.size() == 22);
    const auto& header = rows[0];
    const std::size_t t = column(header, "T"), fq = column(header, "f_Q"), a14 = column(header, "bound_A1A4"),
                      depth = column(header, "depth");
    CHECK(std::stod(rows[1][t]) == 0.0);
    CHECK(std::stod(rows[1][fq]) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::stod(rows[2][fq]) > 1.99);
    CHECK(rows[2][depth] == "2");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double f = std::stod(rows[i][column(header, "F_Q")]);
        for (const char* b : {"bound_all", "bound_A1A4", "bound_A3", "bound_A1A4_literal", "bound_A3_literal"}) {
            CHECK(std::stod(rows[i][column(header, b)]) <= f + 1e-9);
        }
        CHECK(rows[i][t].find("e") != std::string::npos);
    }
    CHECK(std::stod(rows[1][a14]) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("qfi: beta = 0 row has zero F_Q") {
    const Run r = run({"qfi", "--beta", "0", "--beta", "1"});
    REQUIRE(r.code == kExitOk);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 3);
    // sorted by T: beta = 1 first, beta = 0 (T = inf) last
    CHECK(rows[2][column(rows[0], "T")] == "inf");
    CHECK(std::stod(rows[2][column(rows[0], "F_Q")]) == 0.0);
    CHECK(std::stod(rows[2][column(rows[0], "bound_trivial")]) == 0.0);
    CHECK(std::abs(std::stod(rows[1][column(rows[0], "F_Q")]) - std::stod(rows[1][column(rows[0], "bound_trivial")])) <
          1e-9);
}

TEST_CASE("qfi: JSON output and file output") {
    TempDir dir;
    const fs::path out = dir.path() / "qfi.json";
    const Run r = run({"qfi", "--beta", "inf", "--format", "json", "--out", out.string()});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.empty());
    const std::string text = slurp(out);
    CHECK(text.find("\"beta\": \"inf\"") != std::string::npos);
    CHECK(text.find("\"T\"") < text.find("\"F_Q\""));  // column order kept
    CHECK(text.find("\"depth\": 2") != std::string::npos);
}

TEST_CASE("qfi: symmetry file bound") {
    const Run r = run({"qfi", "--beta", "1", "--symmetries", kSymmetries});
    REQUIRE(r.code == kExitOk);
    const auto rows = csv(r.out);
    CHECK(std::stod(rows[1][column(rows[0], "bound_file")]) <= std::stod(rows[1][column(rows[0], "F_Q")]) + 1e-9);

    TempDir dir;
    const fs::path bad = dir.write("bad.json", R"([{"label": "sx", "terms": [{"factors": [{"site": 0, "axis": "x"}]}]}])");
    CHECK(run({"qfi", "--beta", "1", "--symmetries", bad.string()}).code == kExitVerifyFailed);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"qfi", "--preset", "ising"}).code == kExitUsage);
    CHECK(run({"qfi", "--temp-grid", "5:1:3"}).code == kExitUsage);
    CHECK(run({"qfi", "--grid-scale", "cubic"}).code == kExitUsage);
    CHECK(run({"qfi", "--beta", "-1"}).code == kExitUsage);
    CHECK(run({"qfi", "--format", "xml"}).code == kExitUsage);
    CHECK(run({"qfi", "--generator", "diagonal"}).code == kExitUsage);
    CHECK(run({"qfi", "--preset", "two-qubit", "--sites", "3"}).code == kExitUsage);
    CHECK(run({"qfi", "--preset", "xx-chain", "--sites", "3", "--generator", "antisymmetric-x"}).code == kExitUsage);
    CHECK(run({"qfi", "--preset", "xx-chain", "--symmetries", "analytic"}).code == kExitUsage);
    CHECK(run({"qfi", "--symmetries", "/nonexistent/file.json"}).code == kExitUsage);
    CHECK(run({"verify"}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("site cap and its overrides") {
    const Run big = run({"qfi", "--preset", "xx-chain", "--sites", "13", "--beta", "1"});
    CHECK(big.code == kExitUsage);
    CHECK(big.err.find("--max-sites") != std::string::npos);
    CHECK(big.err.find("QFIDYN_MAX_SITES") != std::string::npos);

    ::setenv("QFIDYN_MAX_SITES", "3", 1);
    CHECK(run({"qfi", "--preset", "xx-chain", "--sites", "4", "--beta", "1"}).code == kExitUsage);
    CHECK(run({"qfi", "--preset", "xx-chain", "--sites", "3", "--beta", "1"}).code == kExitOk);
    CHECK(run({"qfi", "--preset", "xx-chain", "--sites", "4", "--beta", "1", "--max-sites", "4"}).code == kExitOk);
    ::setenv("QFIDYN_MAX_SITES", "junk", 1);
    CHECK(run({"qfi", "--preset", "xx-chain", "--sites", "3", "--beta", "1"}).code == kExitUsage);
    ::unsetenv("QFIDYN_MAX_SITES");
}

TEST_CASE("verify") {
    TempDir dir;
    const Run ok = run({"verify", "--field", "0.5", "--symmetries", kSymmetries});
    REQUIRE(ok.code == kExitOk);
    const auto rows = csv(ok.out);
    REQUIRE(rows.size() == 5);
    const double h = 0.5;
    const double omegas[] = {-2 * (1 + h), 2 * (1 + h), 2 * (1 - h), -2 * (1 - h)};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(std::stod(rows[i + 1][column(rows[0], "omega")]) == doctest::Approx(omegas[i]).epsilon(1e-12));
        CHECK(std::stod(rows[i + 1][column(rows[0], "residual")]) < 1e-12);
        CHECK(rows[i + 1][column(rows[0], "passed")] == "yes");
        CHECK(rows[i + 1][column(rows[0], "support")] == "0 1");
    }

    const fs::path sx = dir.write("sx.json", R"({"operators": [{"label": "sx", "terms": [{"factors": [{"site": 0, "axis": "x"}]}]}]})");
    const Run chain = run({"verify", "--preset", "xx-chain", "--sites", "4", "--symmetries", sx.string()});
    CHECK(chain.code == kExitVerifyFailed);
    const auto crow = csv(chain.out);
    CHECK(std::stod(crow[1][column(crow[0], "residual")]) > 0.1);
    CHECK(crow[1][column(crow[0], "cap")] != "n/a");

    const fs::path empty = dir.write("empty.json", "");
    const Run vacuous = run({"verify", "--symmetries", empty.string()});
    CHECK(vacuous.code == kExitOk);
    CHECK(csv(vacuous.out).size() == 1);

    const fs::path broken = dir.write("broken.json", "[\n{\"label\": 1,\n");
    const Run b = run({"verify", "--symmetries", broken.string()});
    CHECK(b.code == kExitUsage);
    CHECK(b.err.find("line") != std::string::npos);

    const fs::path wrong_n = dir.write("n3.json", R"({"sites": 3, "operators": []})");
    CHECK(run({"verify", "--symmetries", wrong_n.string()}).code == kExitUsage);

    const Run js = run({"verify", "--symmetries", kSymmetries, "--format", "json"});
    CHECK(js.code == kExitOk);
    CHECK(js.out.find("\"residual\"") != std::string::npos);
}

TEST_CASE("generator from a JSON file") {
    TempDir dir;
    const fs::path gen = dir.write("gen.json", R"({"label": "anti", "terms": [
        {"coefficient": 0.5, "factors": [{"site": 0, "axis": "x"}]},
        {"coefficient": -0.5, "factors": [{"site": 1, "axis": "x"}]}]})");
    const Run a = run({"qfi", "--beta", "2", "--generator", gen.string()});
    const Run b = run({"qfi", "--beta", "2"});
    REQUIRE(a.code == kExitOk);
    CHECK(a.out == b.out);

    const fs::path nonherm = dir.write("plus.json", R"([{"factors": [{"site": 0, "axis": "+"}]}])");
    CHECK(run({"qfi", "--beta", "2", "--generator", nonherm.string()}).code == kExitUsage);
}

TEST_CASE("fig1 and fig2 outputs are deterministic") {
    TempDir d1, d2;
    const std::vector<std::string> fig1_files{"fig1_curve.csv", "fig1_heatmap_fq.csv", "fig1_heatmap_bound_low.csv",
                                              "fig1_heatmap_bound_high.csv"};
    REQUIRE(run({"fig1", "--temp-grid", "0.05:5:10", "--out", d1.path().string()}).code == kExitOk);
    REQUIRE(run({"fig1", "--temp-grid", "0.05:5:10", "--out", d2.path().string()}).code == kExitOk);
    for (const auto& f : fig1_files) {
        REQUIRE(fs::exists(d1.path() / f));
        CHECK(slurp(d1.path() / f) == slurp(d2.path() / f));
    }
    const auto curve = csv(slurp(d1.path() / "fig1_curve.csv"));
    CHECK(curve.size() == 21);
    const auto heat = csv(slurp(d1.path() / "fig1_heatmap_fq.csv"));
    CHECK(heat.size() == 1 + 20 * 10);

    const Run warn = run({"fig1", "--field", "1", "--beta", "1", "--out", d1.path().string()});
    CHECK(warn.code == kExitOk);
    CHECK(warn.err.find("warning") != std::string::npos);

    const std::vector<std::string> args{"fig2", "--sites", "5", "--temp-grid", "0.1:5:8"};
    auto a1 = args, a2 = args;
    a1.insert(a1.end(), {"--out", d1.path().string()});
    a2.insert(a2.end(), {"--out", d2.path().string()});
    const Run r1 = run(a1), r2 = run(a2);
    REQUIRE(r1.code == kExitOk);
    REQUIRE(r2.code == kExitOk);
    for (const char* f : {"fig2_response_comb.csv", "fig2_mazur.csv", "fig2_qfi_vs_T.csv", "fig2_decomposition.csv"}) {
        REQUIRE(fs::exists(d1.path() / f));
        CHECK(slurp(d1.path() / f) == slurp(d2.path() / f));
    }
    const auto mazur = csv(slurp(d1.path() / "fig2_mazur.csv"));
    for (std::size_t i = 1; i < mazur.size(); ++i) {
        CHECK(std::abs(std::stod(mazur[i][1]) - std::stod(mazur[i][2])) < 1e-10);
    }
    CHECK(r1.out.find("sum_g=") != std::string::npos);
    CHECK(run({"fig2", "--sites", "13", "--out", d1.path().string()}).code == kExitUsage);
    CHECK(run({"fig2", "--temperature", "0", "--out", d1.path().string()}).code == kExitUsage);
}
