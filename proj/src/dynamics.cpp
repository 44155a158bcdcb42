#include "rotor/dynamics.hpp"

#include <stdexcept>

namespace rotor {

using cd = std::complex<double>;

TimeGrid::TimeGrid(double t_final_, int n_steps_) : t_final(t_final_), n_steps(n_steps_) {
    if (t_final <= 0.0) throw std::invalid_argument("TimeGrid: t_final must be positive");
    if (n_steps < 2) throw std::invalid_argument("TimeGrid: need at least 2 steps");
}

FieldTrace FieldTrace::zero(const TimeGrid& grid, int channels) {
    FieldTrace f;
    f.samples = Eigen::MatrixXd::Zero(grid.n_steps + 1, channels);
    return f;
}

Propagator::Propagator(const HamiltonianModel& model, double dt)
    : model_(&model), dt_(dt) {
    if (dt <= 0.0) throw std::invalid_argument("Propagator: dt must be positive");
    const auto& h0 = model.h0_diag;
    half_phase_fwd_.resize(h0.size());
    half_phase_bwd_.resize(h0.size());
    for (long i = 0; i < h0.size(); ++i) {
        half_phase_fwd_(i) = std::polar(1.0, -0.5 * h0(i) * dt);
        half_phase_bwd_(i) = std::conj(half_phase_fwd_(i));
    }
}

void Propagator::applyStep(Eigen::MatrixXcd& states, const Eigen::VectorXd& field_mid,
                           double sign) const {
    const auto& half = (sign > 0) ? half_phase_fwd_ : half_phase_bwd_;
    states.array().colwise() *= half.array();

    const auto& grid = *model_->grid;
    const Eigen::MatrixXd V = model_->gridPotential(field_mid);
    Eigen::MatrixXcd phase(V.rows(), V.cols());
    for (long b = 0; b < V.cols(); ++b)
        for (long a = 0; a < V.rows(); ++a)
            phase(a, b) = std::polar(1.0, -sign * V(a, b) * dt_);

    const int n = model_->basis->size();
    Eigen::MatrixXcd g = grid.synthesize(states);
    grid.applyPointwise(g, phase, n);
    states = grid.analyze(g, n);

    states.array().colwise() *= half.array();
}

void Propagator::stepForward(Eigen::MatrixXcd& states, const Eigen::VectorXd& field_mid) const {
    applyStep(states, field_mid, +1.0);
}

void Propagator::stepBackward(Eigen::MatrixXcd& states, const Eigen::VectorXd& field_mid) const {
    applyStep(states, field_mid, -1.0);
}

Eigen::MatrixXcd propagate(const HamiltonianModel& model, Eigen::MatrixXcd states,
                           const FieldTrace& field, const TimeGrid& grid,
                           const EdgeObserver& observer) {
    if (field.samples.rows() != grid.n_steps + 1)
        throw std::invalid_argument("propagate: field trace does not match time grid");
    if (!field.samples.allFinite())
        throw std::runtime_error("propagate: non-finite field trace");
    Propagator prop(model, grid.dt());
    if (observer) observer(0, states);
    for (int i = 0; i < grid.n_steps; ++i) {
        prop.stepForward(states, field.midValue(i));
        if (observer) observer(i + 1, states);
    }
    if (!states.allFinite())
        throw std::runtime_error("propagate: propagation produced a non-finite state");
    return states;
}

std::vector<Eigen::MatrixXcd> propagateAdjointBackward(const HamiltonianModel& model,
                                                       Eigen::MatrixXcd terminal,
                                                       const FieldTrace& field,
                                                       const TimeGrid& grid) {
    if (field.samples.rows() != grid.n_steps + 1)
        throw std::invalid_argument("propagateAdjointBackward: field trace does not match time grid");
    Propagator prop(model, grid.dt());
    std::vector<Eigen::MatrixXcd> edges(grid.n_steps + 1);
    edges[grid.n_steps] = terminal;
    for (int i = grid.n_steps - 1; i >= 0; --i) {
        prop.stepBackward(terminal, field.midValue(i));
        edges[i] = terminal;
    }
    if (!terminal.allFinite())
        throw std::runtime_error("propagateAdjointBackward: non-finite adjoint state");
    return edges;
}

KetEnsemble KetEnsemble::fromDensity(const Eigen::MatrixXcd& rho, double weight_cutoff) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("KetEnsemble::fromDensity: eigendecomposition failed");
    std::vector<long> keep;
    for (long k = 0; k < es.eigenvalues().size(); ++k)
        if (es.eigenvalues()(k) > weight_cutoff) keep.push_back(k);
    KetEnsemble e;
    e.cols.resize(rho.rows(), static_cast<long>(keep.size()));
    for (size_t c = 0; c < keep.size(); ++c)
        e.cols.col(static_cast<long>(c)) =
            es.eigenvectors().col(keep[c]) * std::sqrt(es.eigenvalues()(keep[c]));
    return e;
}

KetEnsemble KetEnsemble::fromDiagonalWeights(const Eigen::VectorXd& weights, double weight_cutoff) {
    std::vector<long> keep;
    for (long i = 0; i < weights.size(); ++i)
        if (weights(i) > weight_cutoff) keep.push_back(i);
    KetEnsemble e;
    e.cols = Eigen::MatrixXcd::Zero(weights.size(), static_cast<long>(keep.size()));
    for (size_t c = 0; c < keep.size(); ++c)
        e.cols(keep[c], static_cast<long>(c)) = std::sqrt(weights(keep[c]));
    return e;
}

Eigen::MatrixXcd propagateDensity(const HamiltonianModel& model, const Eigen::MatrixXcd& rho0,
                                  const FieldTrace& field, const TimeGrid& grid,
                                  const EdgeObserver& observer) {
    KetEnsemble e = KetEnsemble::fromDensity(rho0);
    e.cols = propagate(model, std::move(e.cols), field, grid, observer);
    return e.toDensity();
}

} // namespace rotor
