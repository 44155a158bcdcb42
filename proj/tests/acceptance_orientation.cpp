#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rotor/presets.hpp"
#include "rotor/runner.hpp"

using namespace rotor;

namespace {

void report(const char* criterion, bool ok, const std::string& detail) {
    std::printf("criterion %s: %s (%s)\n", criterion, ok ? "PASS" : "FAIL", detail.c_str());
    CHECK_MESSAGE(ok, criterion, ": ", detail);
}

/// fidelity per iteration from a convergence.csv
std::vector<double> fidelityColumn(const std::string& path) {
    std::ifstream in(path);
    REQUIRE_MESSAGE(in.good(), "cannot open ", path);
    std::string line;
    std::vector<double> f;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("iteration", 0) == 0) continue;
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ','); // iteration
        std::getline(row, cell, ','); // fidelity
        f.push_back(std::stod(cell));
    }
    return f;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

} // namespace

TEST_CASE("criteria 2 and 3: lambda study at 20 iterations") {
    const RunConfig cfg = parseConfigText(presetText("table2"));
    const auto summary = runScenario(cfg, "acceptance_out/table2");

    std::map<std::string, nlohmann::json> by_key;
    bool monotone = true;
    bool fallbacks_ok = true;
    for (const auto& run : summary["runs"]) {
        by_key[run["method"].get<std::string>() + "/" +
               std::to_string(run["lambda"].get<double>())] = run;
        monotone = monotone && run["monotonicity_violations"].get<int>() == 0;
        fallbacks_ok = fallbacks_ok && run["fallback_fraction"].get<double>() < 0.01;
    }
    report("2 (lambda study)", monotone && fallbacks_ok,
           "all six runs monotone, Lapert fallbacks < 1% of updates");

    const double kr_best = by_key.at("krotov/0.050000")["final_fidelity"].get<double>();
    const double kr_large = by_key.at("krotov/0.500000")["final_fidelity"].get<double>();
    const double lp_best = by_key.at("lapert/5000000.000000")["final_fidelity"].get<double>();
    const double lp_small = by_key.at("lapert/500.000000")["final_fidelity"].get<double>();
    const double lp_small_e = by_key.at("lapert/500.000000")["max_field_au"].get<double>();

    report("3a", kr_best >= 0.95, "Krotov lambda=5e-2 fidelity = " + fmt(kr_best));
    report("3b", kr_large <= kr_best - 0.3,
           "Krotov lambda=5e-1 fidelity = " + fmt(kr_large) + " vs " + fmt(kr_best));
    report("3c", lp_best >= 0.95, "Lapert lambda=5e6 fidelity = " + fmt(lp_best));
    report("3d", lp_small >= 0.97 && lp_small_e >= 4e-3 && lp_small_e <= 8e-3,
           "Lapert lambda=5e2 fidelity = " + fmt(lp_small) +
               ", max|E| = " + fmt(lp_small_e) + " a.u.");
}

TEST_CASE("criteria 2 and 4: convergence-shape crossover") {
    const auto kr_summary =
        runScenario(parseConfigText(presetText("orientation_krotov")),
                    "acceptance_out/orientation_krotov");
    const auto lp_summary =
        runScenario(parseConfigText(presetText("orientation_lapert")),
                    "acceptance_out/orientation_lapert");

    bool clean = true;
    for (const auto* s : {&kr_summary, &lp_summary})
        for (const auto& run : (*s)["runs"])
            clean = clean && run["monotonicity_violations"].get<int>() == 0 &&
                    run["fallback_fraction"].get<double>() < 0.01;
    report("2 (orientation pair)", clean, "both runs monotone, fallbacks < 1%");

    const std::string kr_dir = kr_summary["runs"][0]["directory"].get<std::string>();
    const std::string lp_dir = lp_summary["runs"][0]["directory"].get<std::string>();
    const auto kr = fidelityColumn(kr_dir + "/convergence.csv");
    const auto lp = fidelityColumn(lp_dir + "/convergence.csv");
    REQUIRE(kr.size() >= 21);
    REQUIRE(lp.size() >= 21);

    bool early_lead = true;
    for (int i = 1; i <= 3; ++i) early_lead = early_lead && lp[i] > kr[i];
    const bool final_lead = kr[20] > lp[20];
    report("4", early_lead && final_lead,
           "Lapert leads iterations 1-3 (" + fmt(lp[1]) + "/" + fmt(lp[2]) + "/" + fmt(lp[3]) +
               " vs " + fmt(kr[1]) + "/" + fmt(kr[2]) + "/" + fmt(kr[3]) +
               "), Krotov higher at iteration 20 (" + fmt(kr[20]) + " vs " + fmt(lp[20]) + ")");
}
