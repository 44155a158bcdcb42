#include "rotor/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace rotor {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt15(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

std::ofstream openFile(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

std::string lambdaTag(double lambda) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", lambda);
    std::string tag(buf);
    std::erase(tag, '+');
    return tag;
}

/// Streams the observable rows of a propagation into dynamics.csv and keeps
/// the post-pulse permanent-alignment samples for the summary.
class DynamicsRecorder {
public:
    DynamicsRecorder(const fs::path& path, const Basis& basis, int population_j_max,
                     int stride, double dt, double t_pulse_off)
        : basis_(&basis),
          cos1_(cosThetaMatrix(basis).matrix),
          cos2_(analyticOperator(basis, AngularFunction::Cos2Theta).matrix),
          stride_(stride),
          dt_(dt),
          t_pulse_off_(t_pulse_off),
          out_(openFile(path)) {
        for (int i = 0; i < basis.size(); ++i)
            if (basis.state(i).j <= population_j_max) pop_indices_.push_back(i);
        out_ << "# units: t_au = atomic time; expectation values and populations dimensionless\n";
        out_ << "t_au,cos_theta,cos2_perm,cos2_coh,cos2_total,jz_over_sqrt_j2";
        for (int i : pop_indices_) {
            const auto& s = basis.state(i);
            out_ << ",pop_" << s.j << '_' << s.m;
        }
        out_ << '\n';
    }

    EdgeObserver observer(int edge_offset, int total_edges) {
        return [this, edge_offset, total_edges](int edge, const Eigen::MatrixXcd& states) {
            const int global = edge_offset + edge;
            if (edge_offset > 0 && edge == 0) return; // seam edge already recorded
            if (global % stride_ != 0 && global != total_edges) return;
            record(global * dt_, states);
        };
    }

    const std::vector<double>& postPulsePerm() const { return post_perm_; }

private:
    void record(double t, const Eigen::MatrixXcd& states) {
        Eigen::VectorXd pops = states.cwiseAbs2().rowwise().sum();
        double jz = 0.0, j2 = 0.0;
        for (int i = 0; i < basis_->size(); ++i) {
            jz += pops(i) * basis_->state(i).m;
            j2 += pops(i) * basis_->state(i).j * (basis_->state(i).j + 1.0);
        }
        const Eigen::MatrixXcd rho = states * states.adjoint();
        const AlignmentSplit split = alignmentSplit(rho, *basis_, cos2_);
        const double cos1 = expectationEnsemble(states, cos1_);
        out_ << fmt15(t) << ',' << fmt15(cos1) << ',' << fmt15(split.permanent) << ','
             << fmt15(split.coherent) << ',' << fmt15(split.total()) << ','
             << fmt15(j2 > 0.0 ? jz / std::sqrt(j2) : 0.0);
        for (int i : pop_indices_) out_ << ',' << fmt15(pops(i));
        out_ << '\n';
        if (t > t_pulse_off_ * (1.0 + 1e-12)) post_perm_.push_back(split.permanent);
    }

    const Basis* basis_;
    Eigen::MatrixXcd cos1_;
    Eigen::MatrixXcd cos2_;
    std::vector<int> pop_indices_;
    int stride_;
    double dt_;
    double t_pulse_off_;
    std::ofstream out_;
    std::vector<double> post_perm_;
};

void writeConvergenceCsv(const fs::path& path, const std::vector<IterationRecord>& history) {
    std::ofstream out = openFile(path);
    out << "# units: max_field_au = atomic field amplitude; costs dimensionless; wall_seconds = s\n";
    out << "iteration,fidelity,running_cost,total_cost,delta_cost,max_field_au,"
           "fallback_events,wall_seconds\n";
    for (const auto& r : history)
        out << r.iteration << ',' << fmt15(r.fidelity) << ',' << fmt15(r.running_cost) << ','
            << fmt15(r.total_cost) << ',' << fmt15(r.delta_c) << ',' << fmt15(r.max_field) << ','
            << r.fallback_events << ',' << fmt15(r.wall_seconds) << '\n';
}

void writeFieldCsv(const fs::path& path, const TimeGrid& time, const FieldTrace& guess,
                   const FieldTrace& optimized, int channel) {
    std::ofstream out = openFile(path);
    out << "# units: t_au = atomic time; fields in atomic amplitude units\n";
    out << "t_au,guess_au,optimized_au\n";
    for (int i = 0; i <= time.n_steps; ++i)
        out << fmt15(time.edge(i)) << ',' << fmt15(guess.samples(i, channel)) << ','
            << fmt15(optimized.samples(i, channel)) << '\n';
}

/// Final propagation under a fixed field with dynamics output, plus the
/// optional field-free continuation.
Eigen::MatrixXcd propagateWithDynamics(const BuiltScenario& sc, const RunConfig& config,
                                       const FieldTrace& field, const fs::path& dynamics_path,
                                       json& summary) {
    const double dt = sc.time.dt();
    const int n_extra =
        static_cast<int>(std::lround(config.task.post_pulse_Tper * sc.t_per_au / dt));
    DynamicsRecorder recorder(dynamics_path, *sc.basis, config.output.population_j_max,
                              config.output.dynamics_stride, dt, sc.time.t_final);
    const int total_edges = sc.time.n_steps + n_extra;
    Eigen::MatrixXcd states = propagate(sc.model, sc.task->initialStates(), field, sc.time,
                                        recorder.observer(0, total_edges));
    if (n_extra > 0) {
        const TimeGrid ext(n_extra * dt, n_extra);
        states = propagate(sc.model, std::move(states), FieldTrace::zero(ext, field.channels()),
                           ext, recorder.observer(sc.time.n_steps, total_edges));
        const auto& perm = recorder.postPulsePerm();
        if (!perm.empty()) {
            const auto [lo, hi] = std::minmax_element(perm.begin(), perm.end());
            summary["post_pulse"] = {{"cos2_perm_first", perm.front()},
                                     {"cos2_perm_min", *lo},
                                     {"cos2_perm_max", *hi},
                                     {"cos2_perm_drift", *hi - *lo}};
        }
    }
    return states;
}

json runSingle(const RunConfig& config, const OptimizerRunConfig& rc, const fs::path& out_dir) {
    BuiltScenario sc = buildScenario(config);
    fs::create_directories(out_dir);

    OptimizeOptions opts;
    opts.kind = parseMethod(rc.method);
    opts.lambda = rc.lambda;
    opts.field_scale = rc.field_scale_au;
    opts.iterations = config.optimizer.iterations;
    opts.stagnation_eps = config.optimizer.stagnation_eps;
    opts.verbose = true;
    std::cout << "[" << out_dir.string() << "] " << rc.method << ", lambda = " << rc.lambda
              << ", " << opts.iterations << " iterations\n";

    const MonotonicityReport bound =
        monotonicityBoundCheck(sc.model, rc.lambda, sc.guess, sc.time);
    if (!bound.satisfied)
        std::cerr << "WARNING: lambda/S below the spectral-radius bound at "
                  << bound.violating_samples << "/" << bound.interior_samples
                  << " samples (advisory)\n";

    const OptimizeResult result = optimize(sc.model, *sc.task, sc.guess, sc.time, opts);

    writeConvergenceCsv(out_dir / "convergence.csv", result.history);
    const auto names = channelNames(config);
    for (int c = 0; c < static_cast<int>(names.size()); ++c)
        writeFieldCsv(out_dir / ("field_" + names[c] + ".csv"), sc.time, sc.guess, result.field,
                      c);

    json summary;
    summary["method"] = rc.method;
    summary["lambda"] = rc.lambda;
    summary["field_scale_au"] = rc.field_scale_au;
    const Eigen::MatrixXcd final_states =
        propagateWithDynamics(sc, config, result.field, out_dir / "dynamics.csv", summary);

    const auto& last = result.history.back();
    long fallback_total = 0;
    for (const auto& r : result.history) fallback_total += r.fallback_events;
    const long interior_updates =
        static_cast<long>(std::max<size_t>(result.history.size() - 1, 1)) *
        std::max(sc.time.n_steps - 1, 1) * config.modelChannels();

    summary["iterations_run"] = result.history.size() - 1;
    summary["stagnated"] = result.stagnated;
    summary["final_fidelity"] = last.fidelity;
    summary["final_total_cost"] = last.total_cost;
    summary["max_field_au"] = last.max_field;
    summary["monotonicity_violations"] = result.monotonicity_violations;
    summary["fallback_events"] = fallback_total;
    summary["fallback_fraction"] = static_cast<double>(fallback_total) / interior_updates;
    summary["monotonicity_bound"] = {{"max_spectral_radius_au", bound.max_spectral_radius},
                                     {"violating_samples", bound.violating_samples},
                                     {"interior_samples", bound.interior_samples},
                                     {"satisfied", bound.satisfied}};

    const Eigen::MatrixXcd cos2 = analyticOperator(*sc.basis, AngularFunction::Cos2Theta).matrix;
    const Eigen::MatrixXcd rho_end = final_states * final_states.adjoint();
    const AlignmentSplit split = alignmentSplit(rho_end, *sc.basis, cos2);
    summary["end_cos2_perm"] = split.permanent;
    summary["end_cos2_total"] = split.total();
    if (sc.thermal) {
        summary["target_max_cos2_perm"] = sc.thermal->report.achieved_max;
        summary["final_cos2_perm_at_tf"] =
            alignmentSplit(result.final_states * result.final_states.adjoint(), *sc.basis, cos2)
                .permanent;
    }

    json run_summary;
    run_summary["config"] = toJson(config);
    run_summary["result"] = summary;
    openFile(out_dir / "summary.json") << run_summary.dump(2) << '\n';
    return summary;
}

} // namespace

std::vector<std::string> channelNames(const RunConfig& config) {
    if (config.model.type == "xy") return {"x", "y"};
    return {"z"};
}

FieldTrace buildGuessField(const RunConfig& config, const TimeGrid& time, double t_per_au) {
    FieldTrace field = FieldTrace::zero(time, static_cast<int>(config.guess.channels.size()));
    for (int c = 0; c < field.channels(); ++c)
        for (const GaussianPulse& p : config.guess.channels[c]) {
            const double a = p.amplitudeAu();
            const double t0 = p.center_Tper * t_per_au;
            const double sigma = p.sigmaAu();
            for (int i = 0; i <= time.n_steps; ++i) {
                const double u = (time.edge(i) - t0) / sigma;
                field.samples(i, c) += a * std::exp(-0.5 * u * u);
            }
        }
    return field;
}

BuiltScenario buildScenario(const RunConfig& config) {
    BuiltScenario sc;
    sc.basis = std::make_shared<Basis>(config.basis.j_max, config.basis.fixed_m);
    sc.grid = std::make_shared<AngularGrid>(*sc.basis);
    if (config.model.type == "z_full")
        sc.model = hamiltonianZFull(config.molecule, sc.basis, sc.grid);
    else if (config.model.type == "z_averaged")
        sc.model = hamiltonianZAveraged(config.molecule, sc.basis, sc.grid);
    else
        sc.model = hamiltonianXY(config.molecule, sc.basis, sc.grid, config.model.phase_diff_rad);

    sc.t_per_au = config.molecule.rotationalPeriod();
    sc.time = TimeGrid(config.time_grid.t_final_Tper * sc.t_per_au, config.time_grid.n_steps);
    sc.guess = buildGuessField(config, sc.time, sc.t_per_au);

    Eigen::VectorXcd ground = Eigen::VectorXcd::Zero(sc.basis->size());
    if (config.task.type == "orientation") {
        ground(sc.basis->index(0, 0)) = 1.0;
        sc.task = std::make_unique<PureStateTask>(ground,
                                                  orientationTarget(*sc.basis, config.task.j_f));
    } else if (config.task.type == "delocalization") {
        ground(sc.basis->index(0, 0)) = 1.0;
        Eigen::VectorXcd target = Eigen::VectorXcd::Zero(sc.basis->size());
        target(sc.basis->index(config.task.target_j, config.task.target_m)) = 1.0;
        sc.task = std::make_unique<PureStateTask>(ground, target);
    } else {
        sc.thermal = thermalAlignmentTarget(config.molecule, config.task.temperature_K,
                                            config.task.j_f, *sc.basis);
        sc.task = std::make_unique<DensityTask>(
            boltzmannWeights(config.molecule, config.task.temperature_K, *sc.basis),
            sc.thermal->rho_f_diag, config.task.forward_cutoff);
    }
    return sc;
}

nlohmann::json runScenario(const RunConfig& config, const std::string& out_root, int threads) {
    const auto runs = config.optimizerRuns();
    const fs::path root(out_root);
    fs::create_directories(root);

    std::vector<fs::path> dirs;
    for (const auto& rc : runs)
        dirs.push_back(runs.size() == 1
                           ? root
                           : root / (rc.method + "_lambda_" + lambdaTag(rc.lambda)));

    std::vector<json> results(runs.size());
    std::vector<std::exception_ptr> errors(runs.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t k = next.fetch_add(1); k < runs.size(); k = next.fetch_add(1)) {
            try {
                results[k] = runSingle(config, runs[k], dirs[k]);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    if (threads <= 1 || runs.size() == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const size_t count = std::min<size_t>(threads, runs.size());
        for (size_t k = 0; k < count; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (size_t k = 0; k < runs.size(); ++k)
        if (errors[k]) std::rethrow_exception(errors[k]);

    json summary;
    summary["config"] = toJson(config);
    json run_list = json::array();
    for (size_t k = 0; k < runs.size(); ++k) {
        json entry = results[k];
        entry["directory"] = dirs[k].string();
        run_list.push_back(std::move(entry));
    }
    summary["runs"] = std::move(run_list);
    openFile(root / "summary.json") << summary.dump(2) << '\n';
    return summary;
}

nlohmann::json runPropagation(const RunConfig& config, const std::string& out_dir,
                              bool zero_field) {
    BuiltScenario sc = buildScenario(config);
    const fs::path dir(out_dir);
    fs::create_directories(dir);

    FieldTrace field =
        zero_field ? FieldTrace::zero(sc.time, config.modelChannels()) : sc.guess;
    json summary;
    summary["zero_field"] = zero_field;
    const Eigen::MatrixXcd initial = sc.task->initialStates();
    const Eigen::MatrixXcd final_states =
        propagateWithDynamics(sc, config, field, dir / "dynamics.csv", summary);
    summary["fidelity"] = sc.task->fidelity(final_states);
    if (zero_field &&
        std::abs(config.time_grid.t_final_Tper - std::round(config.time_grid.t_final_Tper)) <
            1e-12)
        summary["revival_error"] = (final_states - initial).norm();

    json out;
    out["config"] = toJson(config);
    out["result"] = summary;
    openFile(dir / "summary.json") << out.dump(2) << '\n';
    return out;
}

} // namespace rotor
