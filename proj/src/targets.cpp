#include "rotor/targets.hpp"

#include <algorithm>
#include <stdexcept>

namespace rotor {

Eigen::VectorXcd orientationTarget(const Basis& basis, int j_f) {
    if (j_f < 0 || j_f > basis.jMax())
        throw std::invalid_argument("orientationTarget: j_f out of range");
    if (basis.fixedM() && *basis.fixedM() != 0)
        throw std::invalid_argument("orientationTarget: needs the m = 0 states");
    const int d = j_f + 1;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d, d);
    for (int j = 0; j + 1 < d; ++j) {
        const double a = (j + 1.0) / std::sqrt((2.0 * j + 1) * (2.0 * j + 3));
        C(j, j + 1) = C(j + 1, j) = a;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    Eigen::VectorXd v = es.eigenvectors().col(d - 1); // largest eigenvalue
    if (v.sum() < 0) v = -v;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(basis.size());
    for (int j = 0; j <= j_f; ++j) psi(basis.index(j, 0)) = v(j);
    return psi;
}

Eigen::VectorXd boltzmannWeights(const MoleculeParams& params, double temperature_K,
                                 const Basis& basis) {
    if (temperature_K < 0.0)
        throw std::invalid_argument("boltzmannWeights: negative temperature");
    const int n = basis.size();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    if (temperature_K == 0.0) {
        w(basis.index(0, 0)) = 1.0;
        return w;
    }
    const double beta = 1.0 / units::kelvin_to_hartree(temperature_K);
    const double B = params.rotationalConstant();
    for (int i = 0; i < n; ++i) {
        const double j = basis.state(i).j;
        w(i) = std::exp(-B * j * (j + 1.0) * beta);
    }
    w /= w.sum();
    return w;
}

AngularOperator diagonalProjectionCos2(const Basis& basis, int j_f) {
    if (j_f > basis.jMax())
        throw std::invalid_argument("diagonalProjectionCos2: j_f out of range");
    AngularOperator cos2 = analyticOperator(basis, AngularFunction::Cos2Theta);
    const int n = basis.size();
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        if (basis.state(i).j <= j_f) M(i, i) = cos2.matrix(i, i).real();
    return {"cos2_theta_p", std::move(M)};
}

ThermalTarget thermalAlignmentTarget(const MoleculeParams& params, double temperature_K,
                                     int j_f, const Basis& basis) {
    if (j_f > basis.jMax())
        throw std::invalid_argument("thermalAlignmentTarget: j_f out of range");
    const Eigen::VectorXd w0 = boltzmannWeights(params, temperature_K, basis);
    const AngularOperator proj = diagonalProjectionCos2(basis, j_f);

    // states of H_{j_f}, with deterministic ordering keys
    struct Entry {
        int index; // basis index
        double chi;
        int j, m;
    };
    std::vector<Entry> subspace;
    for (int i = 0; i < basis.size(); ++i) {
        const auto [j, m] = basis.state(i);
        if (j <= j_f) subspace.push_back({i, proj.matrix(i, i).real(), j, m});
    }

    ThermalTarget out;
    out.rho_f_diag = Eigen::VectorXd::Zero(basis.size());
    auto chiLess = [](const Entry& a, const Entry& b) {
        if (a.chi != b.chi) return a.chi < b.chi;
        if (a.m != b.m) return a.m < b.m;
        return a.j < b.j;
    };

    if (temperature_K == 0.0) {
        // Single populated state: paired with the global maximum of
        // cos^2 theta_p over H_{j_f} (the quoted T = 0 bound).
        auto it = std::max_element(subspace.begin(), subspace.end(), chiLess);
        out.rho_f_diag(it->index) = 1.0;
        out.report.achieved_max = it->chi;
        out.report.chi_ascending.resize(1);
        out.report.chi_ascending(0) = it->chi;
        out.report.omega_ascending.resize(1);
        out.report.omega_ascending(0) = 1.0;
        out.report.blocks.push_back({it->j % 2, 1.0, it->chi});
        return out;
    }

    std::vector<double> all_chi, all_omega;
    for (int parity = 0; parity <= 1; ++parity) {
        std::vector<Entry> block;
        for (const auto& e : subspace)
            if (e.j % 2 == parity) block.push_back(e);
        if (block.empty()) continue;
        std::sort(block.begin(), block.end(), chiLess);

        std::vector<Entry> popsorted = block;
        std::sort(popsorted.begin(), popsorted.end(), [&](const Entry& a, const Entry& b) {
            if (w0(a.index) != w0(b.index)) return w0(a.index) < w0(b.index);
            if (a.m != b.m) return a.m < b.m;
            return a.j < b.j;
        });

        ThermalTargetReport::ParityBlock pb;
        pb.parity = parity;
        for (size_t k = 0; k < block.size(); ++k) {
            const double omega = w0(popsorted[k].index);
            out.rho_f_diag(block[k].index) += omega;
            pb.population += omega;
            pb.contribution += omega * block[k].chi;
            all_chi.push_back(block[k].chi);
            all_omega.push_back(omega);
        }
        out.report.achieved_max += pb.contribution;
        out.report.blocks.push_back(pb);
    }

    std::vector<size_t> order(all_chi.size());
    for (size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return all_chi[a] < all_chi[b]; });
    out.report.chi_ascending.resize(static_cast<long>(order.size()));
    out.report.omega_ascending.resize(static_cast<long>(order.size()));
    for (size_t k = 0; k < order.size(); ++k) {
        out.report.chi_ascending(static_cast<long>(k)) = all_chi[order[k]];
        out.report.omega_ascending(static_cast<long>(k)) = all_omega[order[k]];
    }
    return out;
}

} // namespace rotor
