#include "rotor/model.hpp"

#include <numeric>
#include <stdexcept>

namespace rotor {

int Coupling::totalDegree() const {
    return std::accumulate(exponents.begin(), exponents.end(), 0);
}

namespace {

double monomial(const std::vector<int>& exponents, const Eigen::VectorXd& field) {
    double v = 1.0;
    for (size_t c = 0; c < exponents.size(); ++c)
        for (int p = 0; p < exponents[c]; ++p) v *= field(static_cast<long>(c));
    return v;
}

void checkField(const HamiltonianModel& model, const Eigen::VectorXd& field) {
    if (field.size() != model.channels)
        throw std::invalid_argument("HamiltonianModel: field value count does not match channels");
}

// coeff * f, built by quadrature with an analytic cross-check at
// construction time would be redundant; quadrature is the primary route and
// tests compare it against analyticOperator().
Coupling makeCoupling(std::vector<int> exponents, double coeff, AngularFunction f,
                      const Basis& basis, const AngularGrid& grid) {
    AngularOperator op = multiplicationOperator(basis, grid, f);
    op.matrix *= coeff;
    Eigen::MatrixXd gv = grid.evaluate(f) * coeff;
    return {std::move(exponents), std::move(op), std::move(gv)};
}

void mergeInto(std::vector<Coupling>& couplings, Coupling c) {
    for (auto& existing : couplings) {
        if (existing.exponents == c.exponents) {
            existing.op.matrix += c.op.matrix;
            existing.op.label += "+" + c.op.label;
            existing.grid_values += c.grid_values;
            return;
        }
    }
    couplings.push_back(std::move(c));
}

} // namespace

Eigen::MatrixXcd HamiltonianModel::evaluate(const Eigen::VectorXd& field_values) const {
    checkField(*this, field_values);
    Eigen::MatrixXcd H = h0_diag.cast<std::complex<double>>().asDiagonal();
    for (const auto& c : couplings) H += c.op.matrix * monomial(c.exponents, field_values);
    return H;
}

Eigen::MatrixXcd HamiltonianModel::derivative(int channel, const Eigen::VectorXd& field_values) const {
    checkField(*this, field_values);
    if (channel < 0 || channel >= channels)
        throw std::out_of_range("HamiltonianModel::derivative: channel index out of range");
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(basis->size(), basis->size());
    for (const auto& c : couplings) {
        const int p = c.exponents[channel];
        if (p == 0) continue;
        auto reduced = c.exponents;
        reduced[channel] = p - 1;
        D += c.op.matrix * (p * monomial(reduced, field_values));
    }
    return D;
}

Eigen::MatrixXcd HamiltonianModel::secondDerivative(int channel, const Eigen::VectorXd& field_values) const {
    checkField(*this, field_values);
    if (channel < 0 || channel >= channels)
        throw std::out_of_range("HamiltonianModel::secondDerivative: channel index out of range");
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(basis->size(), basis->size());
    for (const auto& c : couplings) {
        const int p = c.exponents[channel];
        if (p < 2) continue;
        auto reduced = c.exponents;
        reduced[channel] = p - 2;
        D += c.op.matrix * (p * (p - 1.0) * monomial(reduced, field_values));
    }
    return D;
}

Eigen::MatrixXd HamiltonianModel::gridPotential(const Eigen::VectorXd& field_values) const {
    checkField(*this, field_values);
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(grid->nTheta(), grid->nPhi());
    for (const auto& c : couplings) V += c.grid_values * monomial(c.exponents, field_values);
    return V;
}

HamiltonianModel hamiltonianZFull(const MoleculeParams& params,
                                  std::shared_ptr<const Basis> basis,
                                  std::shared_ptr<const AngularGrid> grid) {
    HamiltonianModel m;
    m.basis = basis;
    m.grid = grid;
    m.channels = 1;
    m.h0_diag = (params.rotationalConstant() * jSquaredMatrix(*basis).matrix.diagonal()).real();
    mergeInto(m.couplings, makeCoupling({1}, -params.mu0, AngularFunction::CosTheta, *basis, *grid));
    mergeInto(m.couplings, makeCoupling({2}, -0.5 * params.deltaAlpha(), AngularFunction::Cos2Theta, *basis, *grid));
    mergeInto(m.couplings, makeCoupling({2}, -0.5 * params.alpha_perp, AngularFunction::Identity, *basis, *grid));
    mergeInto(m.couplings, makeCoupling({3}, -(params.beta_par - 3.0 * params.beta_perp) / 6.0,
                                        AngularFunction::Cos3Theta, *basis, *grid));
    mergeInto(m.couplings, makeCoupling({3}, -0.5 * params.beta_perp, AngularFunction::CosTheta, *basis, *grid));
    return m;
}

HamiltonianModel hamiltonianZAveraged(const MoleculeParams& params,
                                      std::shared_ptr<const Basis> basis,
                                      std::shared_ptr<const AngularGrid> grid) {
    HamiltonianModel m;
    m.basis = basis;
    m.grid = grid;
    m.channels = 1;
    m.h0_diag = (params.rotationalConstant() * jSquaredMatrix(*basis).matrix.diagonal()).real();
    mergeInto(m.couplings, makeCoupling({2}, -0.25 * params.deltaAlpha(), AngularFunction::Cos2Theta, *basis, *grid));
    mergeInto(m.couplings, makeCoupling({2}, -0.25 * params.alpha_perp, AngularFunction::Identity, *basis, *grid));
    mergeInto(m.couplings, makeCoupling({3}, -(params.beta_par - 3.0 * params.beta_perp) / 8.0,
                                        AngularFunction::Cos3Theta, *basis, *grid));
    mergeInto(m.couplings, makeCoupling({3}, -3.0 * params.beta_perp / 8.0, AngularFunction::CosTheta, *basis, *grid));
    return m;
}

HamiltonianModel hamiltonianXY(const MoleculeParams& params,
                               std::shared_ptr<const Basis> basis,
                               std::shared_ptr<const AngularGrid> grid,
                               double phase_diff) {
    if (basis->fixedM())
        throw std::invalid_argument("hamiltonianXY: requires the full basis");
    HamiltonianModel m;
    m.basis = basis;
    m.grid = grid;
    m.channels = 2;
    m.h0_diag = (params.rotationalConstant() * jSquaredMatrix(*basis).matrix.diagonal()).real();
    mergeInto(m.couplings, makeCoupling({2, 0}, -0.25 * params.deltaAlpha(), AngularFunction::Cos2ThetaX, *basis, *grid));
    mergeInto(m.couplings, makeCoupling({2, 0}, -0.25 * params.alpha_perp, AngularFunction::Identity, *basis, *grid));
    mergeInto(m.couplings, makeCoupling({0, 2}, -0.25 * params.deltaAlpha(), AngularFunction::Cos2ThetaY, *basis, *grid));
    mergeInto(m.couplings, makeCoupling({0, 2}, -0.25 * params.alpha_perp, AngularFunction::Identity, *basis, *grid));
    mergeInto(m.couplings, makeCoupling({1, 1}, -0.5 * params.deltaAlpha() * std::cos(phase_diff),
                                        AngularFunction::CosThetaXCosThetaY, *basis, *grid));
    return m;
}

} // namespace rotor
