#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "rotor/angular.hpp"
#include "rotor/basis.hpp"
#include "rotor/units.hpp"

namespace rotor {

/// Molecular constants; B is given in cm^-1, everything else in a.u.
struct MoleculeParams {
    double B_cm1 = 1.9312;
    double mu0 = 0.112;
    double alpha_par = 15.65;
    double alpha_perp = 11.73;
    double beta_par = 28.35;
    double beta_perp = 6.64;

    double rotationalConstant() const { return units::cm1_to_hartree(B_cm1); }
    double deltaAlpha() const { return alpha_par - alpha_perp; }
    /// Full revival time pi/B of the spectrum B j(j+1), in a.u.
    double rotationalPeriod() const { return M_PI / rotationalConstant(); }
};

/// One term H_p * prod_c E_c^{p_c} of the interaction polynomial.
struct Coupling {
    std::vector<int> exponents;    // per control channel
    AngularOperator op;            // coefficient already folded in
    Eigen::MatrixXd grid_values;   // same function on the angular grid
    int totalDegree() const;
};

/// H(E) = H0 + sum_p H_p * (field monomial of degree p).  H0 = B J^2 is
/// diagonal in |j,m>; every coupling is a multiplication operator in
/// (theta, phi), so the full interaction is diagonal on the angular grid.
struct HamiltonianModel {
    std::shared_ptr<const Basis> basis;
    std::shared_ptr<const AngularGrid> grid;
    Eigen::VectorXd h0_diag;
    std::vector<Coupling> couplings;
    int channels = 1;

    Eigen::MatrixXcd evaluate(const Eigen::VectorXd& field_values) const;
    Eigen::MatrixXcd derivative(int channel, const Eigen::VectorXd& field_values) const;
    Eigen::MatrixXcd secondDerivative(int channel, const Eigen::VectorXd& field_values) const;
    /// Interaction part as a diagonal function on the angular grid.
    Eigen::MatrixXd gridPotential(const Eigen::VectorXd& field_values) const;
};

/// Eq.-style z-polarized model with the carrier-resolved couplings:
/// degree 1 dipole, degree 2 polarizability, degree 3 hyperpolarizability.
HamiltonianModel hamiltonianZFull(const MoleculeParams& params,
                                  std::shared_ptr<const Basis> basis,
                                  std::shared_ptr<const AngularGrid> grid);

/// Cycle-averaged z-polarized model (envelope control, no dipole term).
HamiltonianModel hamiltonianZAveraged(const MoleculeParams& params,
                                      std::shared_ptr<const Basis> basis,
                                      std::shared_ptr<const AngularGrid> grid);

/// Elliptic (x,y) model with two envelope channels and the cross term
/// weighted by cos(phase_diff); hyperpolarizability omitted.
HamiltonianModel hamiltonianXY(const MoleculeParams& params,
                               std::shared_ptr<const Basis> basis,
                               std::shared_ptr<const AngularGrid> grid,
                               double phase_diff);

} // namespace rotor
