#pragma once

#include <Eigen/Dense>

#include "rotor/basis.hpp"
#include "rotor/dynamics.hpp"

namespace rotor {

/// Running-cost parameters: the integrand is
/// lambda ((E - E_ref) / E_s)^{2n} / S(t) with S(t) = sin^2(pi t / t_f).
/// E_s is the reference amplitude that makes the penalized field deviation
/// dimensionless, so the same lambda scale stays meaningful across exponents.
struct CostSpec {
    double lambda = 1.0;
    int exponent2n = 2;       // 2 for Krotov, 4 for Lapert
    double field_scale = 1.0; // E_s (a.u.)
};

inline double shapeFunction(double t, double t_final) {
    const double s = std::sin(M_PI * t / t_final);
    return s * s;
}

/// <psi|A|psi>; checks that the imaginary residue is negligible.
double expectation(const Eigen::VectorXcd& psi, const Eigen::MatrixXcd& op);
/// Tr(rho A) for a density matrix.
double expectationDensity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& op);
/// Tr(rho A) for rho = cols cols^dagger.
double expectationEnsemble(const Eigen::MatrixXcd& cols, const Eigen::MatrixXcd& op);

/// <J_z>/sqrt(<J^2>); throws when <J^2> = 0.
double jzOrientationMeasure(const Eigen::VectorXcd& psi, const Basis& basis);

struct AlignmentSplit {
    double permanent = 0.0; // j-diagonal part
    double coherent = 0.0;  // j-off-diagonal part
    double total() const { return permanent + coherent; }
};

/// Splits Tr(rho cos^2 theta) into permanent (j-diagonal) and coherent
/// contributions; cos2 must be the cos^2 theta matrix in the same basis.
AlignmentSplit alignmentSplit(const Eigen::MatrixXcd& rho, const Basis& basis,
                              const Eigen::MatrixXcd& cos2);

/// |<target|psi>|^2.
double fidelityPure(const Eigen::VectorXcd& psi, const Eigen::VectorXcd& target);
/// Tr(rho_f rho) / Tr(rho_f^2); equals 1 at rho = rho_f and stays in [0,1]
/// for states isospectral to the target.
double fidelityDensity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& rho_f);

/// Trapezoidal integral of lambda (E - E_ref)^{2n} / S(t), summed over
/// channels.  Endpoint samples are excluded: fields are pinned to the
/// reference there and S vanishes.
double runningCost(const FieldTrace& field, const FieldTrace& reference,
                   const CostSpec& spec, const TimeGrid& grid);

} // namespace rotor
