#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "rotor/model.hpp"

namespace rotor {

/// Uniform time grid over [0, t_final] (a.u.); fields are sampled at the
/// n_steps+1 step edges, the propagator evaluates them at step midpoints.
struct TimeGrid {
    double t_final = 0.0;
    int n_steps = 0;

    TimeGrid() = default;
    TimeGrid(double t_final_, int n_steps_);
    double dt() const { return t_final / n_steps; }
    double edge(int i) const { return t_final * i / n_steps; }
    double mid(int i) const { return t_final * (i + 0.5) / n_steps; }
};

/// Real control amplitudes sampled at step edges, one column per channel.
struct FieldTrace {
    Eigen::MatrixXd samples; // (n_steps+1) x channels

    static FieldTrace zero(const TimeGrid& grid, int channels);
    int channels() const { return static_cast<int>(samples.cols()); }
    Eigen::VectorXd midValue(int step) const {
        return 0.5 * (samples.row(step) + samples.row(step + 1)).transpose();
    }
    double maxAbs() const { return samples.size() ? samples.cwiseAbs().maxCoeff() : 0.0; }
};

/// Strang split-operator stepper
///   exp(-i H0 dt/2) exp(-i V(t_mid) dt) exp(-i H0 dt/2),
/// with the interaction exponential applied as a diagonal multiplication
/// operator on the angular grid.  Operates on batches of state columns.
class Propagator {
public:
    Propagator(const HamiltonianModel& model, double dt);

    double dt() const { return dt_; }
    void stepForward(Eigen::MatrixXcd& states, const Eigen::VectorXd& field_mid) const;
    /// Exact adjoint of stepForward with the same field.
    void stepBackward(Eigen::MatrixXcd& states, const Eigen::VectorXd& field_mid) const;

private:
    void applyStep(Eigen::MatrixXcd& states, const Eigen::VectorXd& field_mid, double sign) const;

    const HamiltonianModel* model_;
    double dt_;
    Eigen::VectorXcd half_phase_fwd_;
    Eigen::VectorXcd half_phase_bwd_;
};

using EdgeObserver = std::function<void(int edge, const Eigen::MatrixXcd& states)>;

/// Propagates state columns across the whole grid; the observer (if any) is
/// called at every step edge including 0 and n_steps.
Eigen::MatrixXcd propagate(const HamiltonianModel& model, Eigen::MatrixXcd states,
                           const FieldTrace& field, const TimeGrid& grid,
                           const EdgeObserver& observer = nullptr);

/// Backward propagation of an adjoint terminal condition under the same
/// field; returns the states at every edge (index i = state at t_i).
std::vector<Eigen::MatrixXcd> propagateAdjointBackward(const HamiltonianModel& model,
                                                       Eigen::MatrixXcd terminal,
                                                       const FieldTrace& field,
                                                       const TimeGrid& grid);

/// Density matrix as a weighted sum of kets, rho = cols * cols^dagger, with
/// sqrt(weight) folded into each column.  Unitary propagation of the columns
/// preserves Hermiticity, trace and spectrum of rho by construction.
struct KetEnsemble {
    Eigen::MatrixXcd cols;

    static KetEnsemble fromDensity(const Eigen::MatrixXcd& rho, double weight_cutoff = 1e-14);
    static KetEnsemble fromDiagonalWeights(const Eigen::VectorXd& weights, double weight_cutoff = 0.0);
    Eigen::MatrixXcd toDensity() const { return cols * cols.adjoint(); }
    double trace() const { return cols.squaredNorm(); }
};

/// rho(t) = U rho0 U^dagger via ensemble propagation.
Eigen::MatrixXcd propagateDensity(const HamiltonianModel& model, const Eigen::MatrixXcd& rho0,
                                  const FieldTrace& field, const TimeGrid& grid,
                                  const EdgeObserver& observer = nullptr);

} // namespace rotor
