#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "rotor/presets.hpp"
#include "rotor/runner.hpp"

namespace {

rotor::RunConfig loadConfig(const std::string& config_path, const std::string& preset) {
    if (config_path.empty() == preset.empty())
        throw CLI::ValidationError("give exactly one of --config and --preset");
    if (!preset.empty()) return rotor::parseConfigText(rotor::presetText(preset));
    return rotor::parseConfigFile(config_path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rigid-rotor pulse optimization toolkit"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir;
    int threads = 1;

    auto add_config_flags = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--preset", preset, "embedded preset name (see 'presets')");
        cmd->add_option("--out", out_dir, "output directory (default: config output.directory)");
    };

    CLI::App* optimize = app.add_subcommand("optimize", "run the configured optimization(s)");
    add_config_flags(optimize);
    optimize->add_option("--threads", threads, "concurrent runs for batched configs")
        ->check(CLI::PositiveNumber);

    CLI::App* propagate =
        app.add_subcommand("propagate", "propagate the guess field without optimizing");
    add_config_flags(propagate);
    bool zero_field = false;
    propagate->add_flag("--zero-field", zero_field, "use a zero field instead of the guess");

    CLI::App* target = app.add_subcommand("target", "print target-state diagnostics");
    std::string target_type = "orientation";
    int j_f = 4, j_max = 8;
    double temperature_K = 5.0;
    target->add_option("--type", target_type, "orientation | thermal")
        ->check(CLI::IsMember({"orientation", "thermal"}));
    target->add_option("--j-f", j_f, "target subspace cutoff j_f");
    target->add_option("--j-max", j_max, "basis truncation");
    target->add_option("--temperature-K", temperature_K, "temperature (thermal)");

    CLI::App* scan = app.add_subcommand("scan-roots", "scalar update-cubic root scan");
    std::vector<double> lambdas{1e2, 1e3, 1e4, 1e5, 1e6, 1e7};
    double x_min = -1.0, x_max = 1.0, mu_max = 0.112, alpha_max = 7.825, beta_max = 4.725;
    int x_count = 201;
    std::string scan_out = "roots.csv";
    scan->add_option("--lambdas", lambdas, "lambda values");
    scan->add_option("--x-min", x_min, "lower bound of x = Im<chi|psi>");
    scan->add_option("--x-max", x_max, "upper bound of x");
    scan->add_option("--x-count", x_count, "samples in x")->check(CLI::Range(2, 1000000));
    scan->add_option("--mu-max", mu_max, "|mu|_max (a.u.)");
    scan->add_option("--alpha-max", alpha_max, "|alpha|_max (a.u.)");
    scan->add_option("--beta-max", beta_max, "|beta|_max (a.u.)");
    scan->add_option("--out", scan_out, "output CSV path");

    CLI::App* presets = app.add_subcommand("presets", "list embedded presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (optimize->parsed()) {
            const rotor::RunConfig config = loadConfig(config_path, preset);
            const std::string root = out_dir.empty() ? config.output.directory : out_dir;
            const auto summary = rotor::runScenario(config, root, threads);
            for (const auto& run : summary.at("runs"))
                std::cout << run.at("directory").get<std::string>()
                          << ": fidelity = " << run.at("final_fidelity").get<double>()
                          << ", max|E| = " << run.at("max_field_au").get<double>() << " a.u.\n";
        } else if (propagate->parsed()) {
            const rotor::RunConfig config = loadConfig(config_path, preset);
            const std::string root = out_dir.empty() ? config.output.directory : out_dir;
            const auto summary = rotor::runPropagation(config, root, zero_field);
            const auto& result = summary.at("result");
            std::cout << "fidelity = " << result.at("fidelity").get<double>() << '\n';
            if (result.contains("revival_error"))
                std::cout << "revival check: |psi(t_f) - psi(0)| = "
                          << result.at("revival_error").get<double>() << '\n';
        } else if (target->parsed()) {
            const rotor::MoleculeParams params;
            if (target_type == "orientation") {
                const rotor::Basis basis(std::max(j_max, j_f), 0);
                const Eigen::VectorXcd psi = rotor::orientationTarget(basis, j_f);
                const Eigen::MatrixXcd cos1 = rotor::cosThetaMatrix(basis).matrix;
                std::cout << "orientation target, j_f = " << j_f
                          << ", <cos theta> = " << rotor::expectation(psi, cos1) << '\n';
                for (int j = 0; j <= j_f; ++j)
                    std::printf("  |%d,0>: %+.4f\n", j, psi(basis.index(j, 0)).real());
            } else {
                const rotor::Basis basis(std::max(j_max, j_f));
                const auto target_state =
                    rotor::thermalAlignmentTarget(params, temperature_K, j_f, basis);
                std::cout << "thermal target, T = " << temperature_K << " K, j_f = " << j_f
                          << ", max <cos^2 theta_p> = " << target_state.report.achieved_max
                          << '\n';
                for (const auto& block : target_state.report.blocks)
                    std::cout << "  parity " << block.parity
                              << ": population = " << block.population
                              << ", contribution = " << block.contribution << '\n';
            }
        } else if (scan->parsed()) {
            std::vector<double> xs(x_count);
            for (int k = 0; k < x_count; ++k)
                xs[k] = x_min + (x_max - x_min) * k / (x_count - 1);
            const auto points =
                rotor::rootSensitivityScan(lambdas, xs, mu_max, alpha_max, beta_max);
            std::ofstream out(scan_out);
            if (!out) throw std::runtime_error("cannot write '" + scan_out + "'");
            out << "# units: root_au = atomic field amplitude; lambda, x dimensionless\n";
            out << "lambda,x,root_au\n";
            char buf[128];
            for (const auto& p : points) {
                std::snprintf(buf, sizeof buf, "%.15g,%.15g,%.15g\n", p.lambda, p.x, p.root);
                out << buf;
            }
            std::cout << "wrote " << points.size() << " rows to " << scan_out << '\n';
        } else if (presets->parsed()) {
            for (const auto& name : rotor::presetNames()) std::cout << name << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
