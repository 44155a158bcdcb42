#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rotor/model.hpp"

namespace rotor {

/// Pure state maximizing <cos_theta> in the m = 0 subspace with j <= j_f:
/// top eigenvector of the restricted cos_theta, all coefficients >= 0.
Eigen::VectorXcd orientationTarget(const Basis& basis, int j_f);

/// Diagonal Boltzmann weights exp(-B j(j+1)/kB T)/Z over the basis;
/// T = 0 returns the pure ground state.  Throws for negative T.
Eigen::VectorXd boltzmannWeights(const MoleculeParams& params, double temperature_K,
                                 const Basis& basis);

/// j-diagonal projection of cos^2 theta, zero outside j <= j_f.
AngularOperator diagonalProjectionCos2(const Basis& basis, int j_f);

struct ThermalTargetReport {
    Eigen::VectorXd chi_ascending;    // eigenvalues of cos^2 theta_p on H_{j_f}
    Eigen::VectorXd omega_ascending;  // populations paired with them
    double achieved_max = 0.0;        // sum chi_k omega_k under the pairing
    struct ParityBlock {
        int parity = 0;          // j mod 2
        double population = 0.0; // trace of restricted rho0 in the block
        double contribution = 0.0;
    };
    std::vector<ParityBlock> blocks;
};

struct ThermalTarget {
    Eigen::VectorXd rho_f_diag; // diagonal target density over the full basis
    ThermalTargetReport report;
};

/// Target density maximizing the permanent alignment <cos^2 theta_p>
/// reachable from the Boltzmann state: within H_{j_f}, populations and
/// eigenvalues of cos^2 theta_p are paired ascending-to-ascending per
/// j-parity block.  At T = 0 the single unit population is paired with the
/// global maximum over H_{j_f} (the quoted zero-temperature bound).
ThermalTarget thermalAlignmentTarget(const MoleculeParams& params, double temperature_K,
                                     int j_f, const Basis& basis);

} // namespace rotor
