#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "rotor/cubic.hpp"
#include "rotor/dynamics.hpp"
#include "rotor/observables.hpp"

namespace rotor {

/// Terminal-cost interface shared by the pure-state and density problems.
/// States are carried as column batches so that a mixed state propagates as
/// an ensemble of kets.
class ControlTask {
public:
    virtual ~ControlTask() = default;
    /// Initial state columns at t = 0.
    virtual Eigen::MatrixXcd initialStates() const = 0;
    /// Adjoint columns at t = t_f, normalized so that the first variation of
    /// the fidelity is 2 Im bracket(chi, dH, psi) dE dt.
    virtual Eigen::MatrixXcd terminalAdjoint(const Eigen::MatrixXcd& final_states) const = 0;
    virtual double fidelity(const Eigen::MatrixXcd& final_states) const = 0;
    /// Im of the adjoint bracket of a Hermitian operator between the chi and
    /// psi column batches.
    virtual double imagBracket(const Eigen::MatrixXcd& chi, const Eigen::MatrixXcd& psi,
                               const Eigen::MatrixXcd& op) const = 0;
};

/// Maximizes |<target|psi(t_f)>|^2.
class PureStateTask : public ControlTask {
public:
    PureStateTask(Eigen::VectorXcd initial, Eigen::VectorXcd target);

    Eigen::MatrixXcd initialStates() const override;
    Eigen::MatrixXcd terminalAdjoint(const Eigen::MatrixXcd& final_states) const override;
    double fidelity(const Eigen::MatrixXcd& final_states) const override;
    double imagBracket(const Eigen::MatrixXcd& chi, const Eigen::MatrixXcd& psi,
                       const Eigen::MatrixXcd& op) const override;

private:
    Eigen::VectorXcd initial_;
    Eigen::VectorXcd target_;
};

/// Maximizes Tr(rho_f rho(t_f)) / Tr(rho_f^2) for diagonal rho_0 and rho_f.
/// Initial weights below forward_cutoff are dropped from the ensemble.
class DensityTask : public ControlTask {
public:
    DensityTask(Eigen::VectorXd rho0_diag, Eigen::VectorXd rho_f_diag,
                double forward_cutoff = 1e-12);

    Eigen::MatrixXcd initialStates() const override;
    Eigen::MatrixXcd terminalAdjoint(const Eigen::MatrixXcd& final_states) const override;
    double fidelity(const Eigen::MatrixXcd& final_states) const override;
    double imagBracket(const Eigen::MatrixXcd& chi, const Eigen::MatrixXcd& psi,
                       const Eigen::MatrixXcd& op) const override;

    double targetPurity() const { return target_purity_; }

private:
    Eigen::VectorXd rho0_diag_;
    Eigen::VectorXd rho_f_diag_;
    double forward_cutoff_;
    double target_purity_; // Tr(rho_f^2)
};

enum class OptimizerKind {
    Krotov, // quadratic running cost, explicit linear update
    Lapert, // quartic running cost, cubic-root update
};

int costExponent(OptimizerKind kind); // 2 or 4

struct OptimizeOptions {
    OptimizerKind kind = OptimizerKind::Krotov;
    double lambda = 1.0;
    double field_scale = 1.0; // cost reference amplitude E_s (a.u.); the
                              // effective penalty weight is lambda / E_s^{2n}
    int iterations = 20;
    double stagnation_eps = 1e-7;  // |delta C| threshold
    int stagnation_window = 3;     // consecutive iterations below threshold
    double monotonicity_tol = 1e-10;
    bool verbose = false;
};

struct IterationRecord {
    int iteration = 0;
    double fidelity = 0.0;
    double running_cost = 0.0;
    double total_cost = 0.0; // fidelity - running cost vs previous field
    double delta_c = 0.0;
    double max_field = 0.0;
    int fallback_events = 0; // edges where no admissible cubic root was found
    double wall_seconds = 0.0;
};

struct OptimizeResult {
    FieldTrace field;
    Eigen::MatrixXcd final_states;
    std::vector<IterationRecord> history; // entry 0 = the guess field
    bool stagnated = false;
    int monotonicity_violations = 0;
};

/// Monotonically convergent sweep: backward adjoint propagation under the
/// previous field, then a forward pass that updates each field edge from the
/// freshly propagated state before stepping across it (immediate feedback).
/// Endpoint samples are pinned since the cost shape S(t) vanishes there.
OptimizeResult optimize(const HamiltonianModel& model, const ControlTask& task,
                        const FieldTrace& guess, const TimeGrid& grid,
                        const OptimizeOptions& opts);

/// Sufficient condition for monotonicity of the explicit quadratic update:
/// lambda / S(t) above the spectral radius of d^2 H / dE^2 along the field at
/// every interior sample.  The interaction is a multiplication operator, so
/// the radius is the sup of |d^2 V / dE^2| over the angular grid.  Advisory
/// only; practical runs often violate it and still converge.
struct MonotonicityReport {
    double max_spectral_radius = 0.0;
    int violating_samples = 0;
    int interior_samples = 0;
    bool satisfied = true;
};
MonotonicityReport monotonicityBoundCheck(const HamiltonianModel& model, double lambda,
                                          const FieldTrace& field, const TimeGrid& grid);

/// Accepted root of the scalar quartic-cost update cubic
///   4 lambda E^3 - 6 beta_max x E^2 - 4 alpha_max x E - 2 mu_max x = 0
/// (previous field 0, S = 1) as a function of the overlap x = Im<chi|psi>,
/// using the same cost-decrease rule as the optimizer; maps how violently
/// the update reacts to the gradient at small lambda.
struct RootScanPoint {
    double lambda = 0.0;
    double x = 0.0;
    double root = 0.0;
};
std::vector<RootScanPoint> rootSensitivityScan(const std::vector<double>& lambdas,
                                               const std::vector<double>& xs,
                                               double mu_max, double alpha_max,
                                               double beta_max);

} // namespace rotor
