#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Cleanup {
    fs::path dir;
    ~Cleanup() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
};

const fs::path& scratch() {
    static const fs::path p = [] {
        const fs::path d = fs::temp_directory_path() / ("ascension_cli_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        static const Cleanup c{d};
        return d;
    }();
    return p;
}

struct Run {
    int code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Run run(const std::string& args) {
    const fs::path o = scratch() / "stdout.txt", e = scratch() / "stderr.txt";
    const std::string cmd =
        std::string(ASCENSION_CLI_PATH) + " " + args + " >" + o.string() + " 2>" + e.string();
    const int st = std::system(cmd.c_str());
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, slurp(o), slurp(e)};
}

std::string dir(const std::string& name) { return (scratch() / name).string(); }

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream f(p);
    std::string line;
    while (std::getline(f, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST(Cli, WhittakerDefaultsMatchReferencePeaks) {
    const auto r = run("whittaker --assert --out " + dir("w"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto peaks = read_json(scratch() / "w" / "peaks.json");
    EXPECT_EQ(peaks["schema_version"], 1);
    const double xs[3] = {1.884, 1.922, 1.962}, os[3] = {2.488e-34, 2.499e-34, 2.510e-34};
    ASSERT_EQ(peaks["records"].size(), 3u);
    for (int k = 0; k < 3; ++k) {
        const auto& rec = peaks["records"][k];
        EXPECT_EQ(rec["tau"], k);
        EXPECT_NEAR(rec["abscissa"].get<double>(), xs[k], 0.002);
        EXPECT_NEAR(rec["ordinate"].get<double>(), os[k], 0.01 * os[k]);
        EXPECT_TRUE(fs::exists(scratch() / "w" / ("whittaker_tau" + std::to_string(k) + ".csv")));
    }
    const auto rows = read_csv(scratch() / "w" / "whittaker_tau0.csv");
    EXPECT_EQ(rows[0], (std::vector<std::string>{"y", "re_w", "im_w", "abs_w"}));
    EXPECT_EQ(rows.size(), 1002u);
}

TEST(Cli, WhittakerSingleWave) {
    const auto r = run("whittaker --tau-max 0 --out " + dir("w0"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(scratch() / "w0" / "whittaker_tau0.csv"));
    EXPECT_FALSE(fs::exists(scratch() / "w0" / "whittaker_tau1.csv"));
    EXPECT_EQ(read_json(scratch() / "w0" / "peaks.json")["records"].size(), 1u);
}

TEST(Cli, WhittakerAssertTolerances) {
    EXPECT_EQ(run("whittaker --assert --rel-tol 0.1 --out " + dir("w1")).code, 0);
    // the computed abscissae sit ~1e-3 from the rounded reference values
    const auto tight = run("whittaker --assert --abs-tol 1e-6 --out " + dir("w2"));
    EXPECT_EQ(tight.code, 1);
    EXPECT_EQ(json::parse(tight.err)["error"]["type"], "assertion");
    EXPECT_FALSE(read_json(scratch() / "w2" / "summary.json")["passed"].get<bool>());
    const auto noref = run("whittaker --assert --s1 40 --tau-max 0 --out " + dir("w3"));
    EXPECT_EQ(noref.code, 2);
    EXPECT_EQ(json::parse(noref.err)["error"]["type"], "usage");
}

TEST(Cli, FlowsAtZeroTimeReturnTheInitialVector) {
    const auto r = run("flows --t 0 --x 0.3 --y 1.7 --theta 0.4 --B 2 --out " + dir("f0"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = read_csv(scratch() / "f0" / "flows.csv");
    ASSERT_EQ(rows.size(), 5u);
    const double vx = -std::sin(0.4) * 1.7, vy = std::cos(0.4) * 1.7, sp = std::sqrt(5.0);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const auto& row = rows[k];
        EXPECT_EQ(std::stod(row[1]), 0.0);
        EXPECT_EQ(std::stod(row[2]), 0.3);
        EXPECT_EQ(std::stod(row[3]), 1.7);
        const double c = (row[0] == "hypercyclic" || row[0] == "hamiltonian") ? sp : 1.0;
        if (row[0] == "hamiltonian") {
            // through phi_B and back
            EXPECT_NEAR(std::stod(row[4]), c * vx, 1e-14);
            EXPECT_NEAR(std::stod(row[5]), c * vy, 1e-14);
        } else {
            EXPECT_EQ(std::stod(row[4]), c * vx) << row[0];
            EXPECT_EQ(std::stod(row[5]), c * vy) << row[0];
        }
    }
}

TEST(Cli, FlowsConjugacy) {
    const auto r = run("flows --assert --json-summary --B 0.5 --out " + dir("f1"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto s = json::parse(r.out);
    EXPECT_LT(s["max_conjugacy_deviation"].get<double>(), 1e-6);
    EXPECT_EQ(read_csv(scratch() / "f1" / "flows.csv").size(), 1u + 4u * 101u);
}

TEST(Cli, MeasureTransportTrend) {
    const auto r = run("measure-transport --assert --json-summary --out " + dir("m"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = read_csv(scratch() / "m" / "transport.csv");
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].back(), "rel_diff");
    for (std::size_t k = 2; k < rows.size(); ++k) EXPECT_LE(std::stod(rows[k][5]), std::stod(rows[k - 1][5]));
    const auto rep = read_json(scratch() / "m" / "transport.json");
    for (const char* key : {"s", "B", "eta0", "eps", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "rel_diff"})
        EXPECT_TRUE(rep["records"][0].contains(key)) << key;
    EXPECT_TRUE(json::parse(r.out)["rel_diff_non_increasing"].get<bool>());
}

TEST(Cli, EquidistributeHorocycleTrend) {
    const auto r = run("equidistribute --assert --out " + dir("e"));
    ASSERT_EQ(r.code, 0) << r.err;
    std::vector<double> horo;
    for (const auto& row : read_csv(scratch() / "e" / "equidistribution.csv"))
        if (row[0] == "horocyclic") horo.push_back(std::stod(row[3]));
    ASSERT_EQ(horo.size(), 3u);
    EXPECT_LE(horo[1], horo[0]);
    EXPECT_LE(horo[2], horo[1]);
}

TEST(Cli, EquidistributeNeedsCompactSurface) {
    const auto r = run("equidistribute --surface cylinder --out " + dir("e1"));
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(json::parse(r.err)["schema_version"], 1);
}

TEST(Cli, ModuleErrorsBecomeDiagnostics) {
    const auto r = run("ascend --eta0 0.7 --out " + dir("a0"));
    EXPECT_EQ(r.code, 3);
    EXPECT_EQ(json::parse(r.err)["error"]["type"], "module");
    EXPECT_NE(run("flows --bogus").code, 0);
    EXPECT_NE(run("").code, 0);
}

TEST(Cli, AscendSummary) {
    const auto r = run("ascend --s 60 --B 0.5 --eta0 0.1 --assert --json-summary --out " + dir("a"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto s = json::parse(r.out);
    EXPECT_EQ(s["steps"], 30);
    EXPECT_EQ(s["command"], "ascend");
    EXPECT_LT(s["max_rel_diff"].get<double>(), 10.0 / 60);
}

TEST(Cli, DeterministicOutputs) {
    for (const char* cmd : {"equidistribute --lengths 10,100 --B 0.5,2", "flows --B 1.5 --t 3",
                            "ascend --s 40", "measure-transport --s 50,80"}) {
        ASSERT_EQ(run(std::string(cmd) + " --out " + dir("d1")).code, 0) << cmd;
        ASSERT_EQ(run(std::string(cmd) + " --out " + dir("d2")).code, 0) << cmd;
        for (const auto& e : fs::directory_iterator(scratch() / "d1")) {
            const auto name = e.path().filename();
            if (name == "config.json") continue;  // records --out
            EXPECT_EQ(slurp(e.path()), slurp(scratch() / "d2" / name)) << cmd << " " << name;
        }
        fs::remove_all(scratch() / "d1");
        fs::remove_all(scratch() / "d2");
    }
}

TEST(Cli, ConfigRoundTripAndPrecedence) {
    ASSERT_EQ(run("flows --B 0.7 --t 1.25 --x -0.1 --y 0.9 --theta 1.1 --samples 7 --out " + dir("c1")).code, 0);
    auto first = read_json(scratch() / "c1" / "config.json");
    ASSERT_EQ(run("flows --config " + dir("c1") + "/config.json --out " + dir("c2")).code, 0);
    auto second = read_json(scratch() / "c2" / "config.json");
    EXPECT_EQ(slurp(scratch() / "c1" / "flows.csv"), slurp(scratch() / "c2" / "flows.csv"));
    first.erase("out");
    second.erase("out");
    EXPECT_EQ(first, second);
    EXPECT_EQ(first["B"], json::array({0.7}));
    // flags beat the file
    ASSERT_EQ(run("flows --config " + dir("c1") + "/config.json --t 2 --out " + dir("c3")).code, 0);
    const auto third = read_json(scratch() / "c3" / "config.json");
    EXPECT_EQ(third["t"], 2.0);
    EXPECT_EQ(third["samples"], 7);
}
