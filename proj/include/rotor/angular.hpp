#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rotor/basis.hpp"

namespace rotor {

/// Dense Hermitian matrix of an angular multiplication operator in a
/// truncated |j,m> basis.
struct AngularOperator {
    std::string label;
    Eigen::MatrixXcd matrix;
};

/// The angular functions appearing in the field couplings.  All are
/// polynomials of degree <= 3 in the direction cosines
/// (cos_theta, cos_theta_x = sin(theta)cos(phi), cos_theta_y = sin(theta)sin(phi)).
enum class AngularFunction {
    Identity,
    CosTheta,
    Cos2Theta,
    Cos3Theta,
    CosThetaX,
    CosThetaY,
    Cos2ThetaX,
    Cos2ThetaY,
    CosThetaXCosThetaY,
};

std::string angularFunctionLabel(AngularFunction f);
int angularFunctionDegree(AngularFunction f);
bool angularFunctionPhiIndependent(AngularFunction f);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gaussLegendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Pseudospectral angular grid: Gauss-Legendre nodes in cos(theta) and a
/// uniform azimuthal grid, together with the spherical-harmonic synthesis
/// transform and its quadrature adjoint.
///
/// For a fixed-m basis the azimuthal direction is absent (the interactions
/// are phi-independent) and all transforms are real.
class AngularGrid {
public:
    /// n_theta/n_phi of 0 select the defaults 2(j_max+4) and 4(j_max+1).
    explicit AngularGrid(const Basis& basis, int n_theta = 0, int n_phi = 0);

    const Basis& basis() const { return basis_; }
    int nTheta() const { return n_theta_; }
    int nPhi() const { return n_phi_; }
    int nPoints() const { return n_theta_ * n_phi_; }
    double cosThetaNode(int a) const { return x_[a]; }
    double thetaWeight(int a) const { return w_[a]; }
    double phiNode(int b) const;

    /// Values of an angular function on the grid, shaped n_theta x n_phi.
    Eigen::MatrixXd evaluate(AngularFunction f) const;

    /// Batched synthesis of K states given as basis-coefficient columns.
    /// Fixed-m layout: (n_theta x K).  Full layout: (n_theta*K x n_phi) with
    /// row index k*n_theta + a.
    Eigen::MatrixXcd synthesize(const Eigen::MatrixXcd& coeffs) const;

    /// Quadrature adjoint of synthesize(); exact inverse on band-limited data.
    Eigen::MatrixXcd analyze(const Eigen::MatrixXcd& grid_values, int n_states) const;

    /// Single-state transforms with a flat point index g = a*n_phi + b.
    Eigen::VectorXcd toGrid(const Eigen::VectorXcd& coeffs) const;
    Eigen::VectorXcd fromGrid(const Eigen::VectorXcd& grid_values) const;

    /// Multiplies grid data (in synthesize() layout) in place by a complex
    /// diagonal factor given as an n_theta x n_phi table.
    void applyPointwise(Eigen::MatrixXcd& grid_values,
                        const Eigen::MatrixXcd& factor, int n_states) const;

private:
    Basis basis_;
    int n_theta_;
    int n_phi_;
    std::vector<double> x_; // cos(theta) nodes
    std::vector<double> w_;
    // fixed-m: real synthesis matrix (n_theta x N) and its quadrature adjoint
    Eigen::MatrixXd synth_;
    Eigen::MatrixXd adjoint_;
    // full basis: per-m Legendre blocks and azimuthal phase table
    std::vector<Eigen::MatrixXd> p_block_;       // n_theta x (j_max+1-|m|)
    Eigen::MatrixXcd phases_;                    // (2 j_max + 1) x n_phi
};

/// Analytic tridiagonal-in-j matrix of cos(theta); zero diagonal.
AngularOperator cosThetaMatrix(const Basis& basis);
/// Analytic matrices of the transverse direction cosines (full basis only).
AngularOperator cosThetaXMatrix(const Basis& basis);
AngularOperator cosThetaYMatrix(const Basis& basis);
/// Diagonal matrix with entries j(j+1).
AngularOperator jSquaredMatrix(const Basis& basis);
AngularOperator identityOperator(const Basis& basis);

/// Exact construction by quadrature on the grid.
AngularOperator multiplicationOperator(const Basis& basis, const AngularGrid& grid,
                                       AngularFunction f);

/// Analytic construction: degree-p functions are assembled as products of
/// degree-1 operators at padded truncation j_max + p, then truncated.  This
/// reproduces the matrix elements of the untruncated operator restricted to
/// the model space.
AngularOperator analyticOperator(const Basis& basis, AngularFunction f);

} // namespace rotor
