#include "rotor/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace rotor {

PureStateTask::PureStateTask(Eigen::VectorXcd initial, Eigen::VectorXcd target)
    : initial_(std::move(initial)), target_(std::move(target)) {
    if (initial_.size() == 0 || initial_.size() != target_.size())
        throw std::invalid_argument("PureStateTask: state size mismatch");
}

Eigen::MatrixXcd PureStateTask::initialStates() const { return initial_; }

Eigen::MatrixXcd PureStateTask::terminalAdjoint(const Eigen::MatrixXcd& final_states) const {
    if (final_states.cols() != 1 || final_states.rows() != target_.size())
        throw std::invalid_argument("PureStateTask: bad final state shape");
    return target_ * target_.dot(final_states.col(0));
}

double PureStateTask::fidelity(const Eigen::MatrixXcd& final_states) const {
    return std::norm(target_.dot(final_states.col(0)));
}

double PureStateTask::imagBracket(const Eigen::MatrixXcd& chi, const Eigen::MatrixXcd& psi,
                                  const Eigen::MatrixXcd& op) const {
    return chi.col(0).dot(op * psi.col(0)).imag();
}

DensityTask::DensityTask(Eigen::VectorXd rho0_diag, Eigen::VectorXd rho_f_diag,
                         double forward_cutoff)
    : rho0_diag_(std::move(rho0_diag)),
      rho_f_diag_(std::move(rho_f_diag)),
      forward_cutoff_(forward_cutoff) {
    if (rho0_diag_.size() == 0 || rho0_diag_.size() != rho_f_diag_.size())
        throw std::invalid_argument("DensityTask: weight size mismatch");
    if (rho0_diag_.minCoeff() < 0.0 || rho_f_diag_.minCoeff() < 0.0)
        throw std::invalid_argument("DensityTask: negative population");
    target_purity_ = rho_f_diag_.squaredNorm();
    if (target_purity_ <= 0.0)
        throw std::invalid_argument("DensityTask: empty target");
}

Eigen::MatrixXcd DensityTask::initialStates() const {
    return KetEnsemble::fromDiagonalWeights(rho0_diag_, forward_cutoff_).cols;
}

Eigen::MatrixXcd DensityTask::terminalAdjoint(const Eigen::MatrixXcd&) const {
    return KetEnsemble::fromDiagonalWeights(rho_f_diag_ / target_purity_, 0.0).cols;
}

double DensityTask::fidelity(const Eigen::MatrixXcd& final_states) const {
    double acc = 0.0;
    for (long l = 0; l < rho_f_diag_.size(); ++l)
        if (rho_f_diag_(l) > 0.0) acc += rho_f_diag_(l) * final_states.row(l).squaredNorm();
    return acc / target_purity_;
}

double DensityTask::imagBracket(const Eigen::MatrixXcd& chi, const Eigen::MatrixXcd& psi,
                                const Eigen::MatrixXcd& op) const {
    // Im Tr(Phi Phi^+ A Psi Psi^+) through the small cross-overlap matrices.
    const Eigen::MatrixXcd x = chi.adjoint() * (op * psi); // L x K
    const Eigen::MatrixXcd y = psi.adjoint() * chi;        // K x L
    return x.cwiseProduct(y.transpose()).sum().imag();
}

int costExponent(OptimizerKind kind) {
    return kind == OptimizerKind::Krotov ? 2 : 4;
}

namespace {

struct EdgeUpdateContext {
    const HamiltonianModel* model;
    const OptimizeOptions* opts;
    double lambda_eff; // lambda / E_s^{2n}
    double shape;
    const std::vector<double>* beta; // Im bracket per coupling
};

/// Updates the fields of one step edge in place, channel by channel; later
/// channels see the already-updated values of earlier ones.
int updateEdge(const EdgeUpdateContext& ctx, const Eigen::VectorXd& e_prev,
               Eigen::MatrixXd& samples, int edge) {
    const auto e_cur = [&](int ch) -> double& { return samples(edge, ch); };
    const auto& couplings = ctx.model->couplings;
    int fallbacks = 0;
    for (int c = 0; c < ctx.model->channels; ++c) {
        double gamma[4] = {0.0, 0.0, 0.0, 0.0};
        for (size_t p = 0; p < couplings.size(); ++p) {
            const auto& exps = couplings[p].exponents;
            const int d = exps[c];
            if (d == 0) continue;
            double mono = 1.0;
            for (int o = 0; o < ctx.model->channels; ++o)
                if (o != c) mono *= std::pow(e_cur(o), exps[o]);
            gamma[d] += mono * (*ctx.beta)[p];
        }
        const double ek = e_prev(c);
        if (ctx.opts->kind == OptimizerKind::Krotov) {
            const double grad = gamma[1] + 2.0 * gamma[2] * ek + 3.0 * gamma[3] * ek * ek;
            e_cur(c) = ek + (ctx.shape / ctx.lambda_eff) * grad;
        } else {
            CubicUpdateProblem cp;
            cp.lambda_over_s = ctx.lambda_eff / ctx.shape;
            cp.e_prev = ek;
            cp.b0 = 2.0 * gamma[1];
            cp.b1 = 4.0 * gamma[2];
            cp.b2 = 6.0 * gamma[3];
            const UpdateRootChoice choice = chooseUpdateRoot(cp);
            if (choice.fallback) ++fallbacks; // previous value kept: zero local gain
            e_cur(c) = choice.root;
        }
    }
    return fallbacks;
}

} // namespace

OptimizeResult optimize(const HamiltonianModel& model, const ControlTask& task,
                        const FieldTrace& guess, const TimeGrid& grid,
                        const OptimizeOptions& opts) {
    const int n = grid.n_steps;
    if (guess.samples.rows() != n + 1 || guess.channels() != model.channels)
        throw std::invalid_argument("optimize: guess shape does not match grid/model");
    if (!(opts.lambda > 0.0))
        throw std::invalid_argument("optimize: lambda must be positive");
    if (!(opts.field_scale > 0.0))
        throw std::invalid_argument("optimize: field_scale must be positive");
    if (opts.iterations < 0)
        throw std::invalid_argument("optimize: negative iteration count");
    for (const auto& cp : model.couplings)
        for (int e : cp.exponents)
            if (e < 0 || e > 3)
                throw std::invalid_argument("optimize: coupling degree outside [0,3]");

    const CostSpec cost{opts.lambda, costExponent(opts.kind), opts.field_scale};
    const double lambda_eff = opts.lambda / std::pow(opts.field_scale, cost.exponent2n);
    const Propagator prop(model, grid.dt());
    const Eigen::MatrixXcd initial = task.initialStates();

    OptimizeResult result;
    result.field = guess;
    result.final_states = propagate(model, initial, guess, grid);

    IterationRecord rec0;
    rec0.fidelity = task.fidelity(result.final_states);
    rec0.total_cost = rec0.fidelity;
    rec0.max_field = guess.maxAbs();
    result.history.push_back(rec0);
    if (opts.verbose)
        std::cout << "iter 0: F = " << rec0.fidelity << ", |E|max = " << rec0.max_field << '\n';

    int flat_count = 0;
    std::vector<double> beta(model.couplings.size());
    for (int iter = 1; iter <= opts.iterations; ++iter) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::vector<Eigen::MatrixXcd> chi = propagateAdjointBackward(
            model, task.terminalAdjoint(result.final_states), result.field, grid);

        const FieldTrace e_old = result.field;
        FieldTrace e_new = e_old;
        Eigen::MatrixXcd psi = initial;
        int fallbacks = 0;
        for (int i = 0; i < n; ++i) {
            const int edge = i + 1;
            if (edge < n) { // endpoint edges stay pinned (S vanishes there)
                const Eigen::MatrixXcd chi_mid = 0.5 * (chi[i] + chi[edge]);
                for (size_t p = 0; p < beta.size(); ++p)
                    beta[p] = task.imagBracket(chi_mid, psi, model.couplings[p].op.matrix);
                EdgeUpdateContext ctx{&model, &opts, lambda_eff,
                                      shapeFunction(grid.edge(edge), grid.t_final), &beta};
                fallbacks += updateEdge(ctx, e_old.samples.row(edge).transpose(),
                                        e_new.samples, edge);
            }
            prop.stepForward(psi, e_new.midValue(i));
        }

        IterationRecord rec;
        rec.iteration = iter;
        rec.fidelity = task.fidelity(psi);
        rec.running_cost = runningCost(e_new, e_old, cost, grid);
        rec.total_cost = rec.fidelity - rec.running_cost;
        rec.delta_c = rec.total_cost - result.history.back().total_cost;
        rec.max_field = e_new.maxAbs();
        rec.fallback_events = fallbacks;
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        if (rec.delta_c < -opts.monotonicity_tol) {
            ++result.monotonicity_violations;
            std::cerr << "WARNING: cost decreased by " << -rec.delta_c << " at iteration "
                      << iter << " (lambda may be below the monotonicity bound)\n";
        }

        result.field = std::move(e_new);
        result.final_states = std::move(psi);
        result.history.push_back(rec);
        if (opts.verbose)
            std::cout << "iter " << iter << ": F = " << rec.fidelity << ", C = " << rec.total_cost
                      << ", dC = " << rec.delta_c << ", |E|max = " << rec.max_field << " ("
                      << rec.wall_seconds << " s)\n";

        flat_count = std::abs(rec.delta_c) < opts.stagnation_eps ? flat_count + 1 : 0;
        if (flat_count >= opts.stagnation_window) {
            result.stagnated = true;
            break;
        }
    }
    return result;
}

MonotonicityReport monotonicityBoundCheck(const HamiltonianModel& model, double lambda,
                                          const FieldTrace& field, const TimeGrid& grid) {
    if (field.samples.rows() != grid.n_steps + 1 || field.channels() != model.channels)
        throw std::invalid_argument("monotonicityBoundCheck: field does not match grid/model");
    MonotonicityReport out;
    Eigen::MatrixXd second;
    for (int i = 1; i < grid.n_steps; ++i) {
        const Eigen::VectorXd e = field.samples.row(i).transpose();
        double radius = 0.0;
        for (int c = 0; c < model.channels; ++c) {
            second.setZero(model.grid->nTheta(), model.grid->nPhi());
            for (const auto& cp : model.couplings) {
                const int d = cp.exponents[c];
                if (d < 2) continue;
                double factor = d * (d - 1.0) * std::pow(e(c), d - 2);
                for (int o = 0; o < model.channels; ++o)
                    if (o != c) factor *= std::pow(e(o), cp.exponents[o]);
                second += factor * cp.grid_values;
            }
            radius = std::max(radius, second.cwiseAbs().maxCoeff());
        }
        out.max_spectral_radius = std::max(out.max_spectral_radius, radius);
        ++out.interior_samples;
        if (lambda / shapeFunction(grid.edge(i), grid.t_final) <= radius)
            ++out.violating_samples;
    }
    out.satisfied = out.violating_samples == 0;
    return out;
}

std::vector<RootScanPoint> rootSensitivityScan(const std::vector<double>& lambdas,
                                               const std::vector<double>& xs,
                                               double mu_max, double alpha_max,
                                               double beta_max) {
    std::vector<RootScanPoint> points;
    points.reserve(lambdas.size() * xs.size());
    for (double lambda : lambdas) {
        if (!(lambda > 0.0))
            throw std::invalid_argument("rootSensitivityScan: lambda must be positive");
        double previous = 0.0; // follow one branch continuously across the scan
        for (double x : xs) {
            CubicUpdateProblem cp;
            cp.lambda_over_s = lambda;
            cp.e_prev = 0.0;
            cp.b0 = 2.0 * mu_max * x;
            cp.b1 = 4.0 * alpha_max * x;
            cp.b2 = 6.0 * beta_max * x;
            const double phi0 = updateSurrogateCost(cp, 0.0);
            const double tol = 1e-12 * std::max(1.0, std::abs(phi0));
            double chosen = 0.0;
            double best_distance = std::numeric_limits<double>::infinity();
            for (double r : cubicUpdateRoots(cp)) {
                if (updateSurrogateCost(cp, r) > phi0 + tol) continue;
                if (std::abs(r - previous) < best_distance) {
                    best_distance = std::abs(r - previous);
                    chosen = r;
                }
            }
            previous = chosen;
            points.push_back({lambda, x, chosen});
        }
    }
    return points;
}

} // namespace rotor
