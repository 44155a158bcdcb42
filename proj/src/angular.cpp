#include "rotor/angular.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace rotor {

using cd = std::complex<double>;

std::string angularFunctionLabel(AngularFunction f) {
    switch (f) {
        case AngularFunction::Identity: return "1";
        case AngularFunction::CosTheta: return "cos_theta";
        case AngularFunction::Cos2Theta: return "cos2_theta";
        case AngularFunction::Cos3Theta: return "cos3_theta";
        case AngularFunction::CosThetaX: return "cos_theta_x";
        case AngularFunction::CosThetaY: return "cos_theta_y";
        case AngularFunction::Cos2ThetaX: return "cos2_theta_x";
        case AngularFunction::Cos2ThetaY: return "cos2_theta_y";
        case AngularFunction::CosThetaXCosThetaY: return "cos_theta_x_cos_theta_y";
    }
    return "?";
}

int angularFunctionDegree(AngularFunction f) {
    switch (f) {
        case AngularFunction::Identity: return 0;
        case AngularFunction::CosTheta:
        case AngularFunction::CosThetaX:
        case AngularFunction::CosThetaY: return 1;
        case AngularFunction::Cos2Theta:
        case AngularFunction::Cos2ThetaX:
        case AngularFunction::Cos2ThetaY:
        case AngularFunction::CosThetaXCosThetaY: return 2;
        case AngularFunction::Cos3Theta: return 3;
    }
    return 0;
}

bool angularFunctionPhiIndependent(AngularFunction f) {
    switch (f) {
        case AngularFunction::Identity:
        case AngularFunction::CosTheta:
        case AngularFunction::Cos2Theta:
        case AngularFunction::Cos3Theta: return true;
        default: return false;
    }
}

void gaussLegendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw std::invalid_argument("gaussLegendre: n must be positive");
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev-based initial guess, Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

namespace {

// Theta part of Y_jm: Y_jm(theta, phi) = thetaPart(j,m,theta) * exp(i m phi).
double thetaPart(int j, int m, double theta) {
    if (m >= 0) return std::sph_legendre(j, m, theta);
    double v = std::sph_legendre(j, -m, theta);
    return (m % 2 == 0) ? v : -v;
}

// A * B with A real, B complex, using two real GEMMs.
Eigen::MatrixXcd realTimesComplex(const Eigen::MatrixXd& A, const Eigen::MatrixXcd& B) {
    Eigen::MatrixXcd C(A.rows(), B.cols());
    C.real() = A * B.real();
    C.imag() = A * B.imag();
    return C;
}

} // namespace

AngularGrid::AngularGrid(const Basis& basis, int n_theta, int n_phi)
    : basis_(basis) {
    const int j_max = basis.jMax();
    const bool fixed = basis.fixedM().has_value();
    n_theta_ = (n_theta > 0) ? n_theta : 2 * (j_max + 4);
    n_phi_ = fixed ? 1 : ((n_phi > 0) ? n_phi : 4 * (j_max + 1));
    if (n_theta_ < j_max + 3)
        throw std::invalid_argument("AngularGrid: degenerate grid, need n_theta >= j_max + 3");
    if (!fixed && n_phi_ < 2 * j_max + 3)
        throw std::invalid_argument("AngularGrid: degenerate grid, need n_phi >= 2 j_max + 3");

    gaussLegendre(n_theta_, x_, w_);

    const int n = basis_.size();
    if (fixed) {
        const int m = *basis_.fixedM();
        synth_.resize(n_theta_, n);
        for (int a = 0; a < n_theta_; ++a) {
            const double theta = std::acos(x_[a]);
            for (int i = 0; i < n; ++i)
                synth_(a, i) = std::sqrt(2.0 * M_PI) * thetaPart(basis_.state(i).j, m, theta);
        }
        adjoint_ = synth_.transpose() * Eigen::Map<const Eigen::VectorXd>(w_.data(), n_theta_).asDiagonal();
    } else {
        p_block_.resize(2 * j_max + 1);
        for (int m = -j_max; m <= j_max; ++m) {
            const int nj = basis_.blockSize(m);
            Eigen::MatrixXd P(n_theta_, nj);
            for (int a = 0; a < n_theta_; ++a) {
                const double theta = std::acos(x_[a]);
                for (int c = 0; c < nj; ++c)
                    P(a, c) = thetaPart(std::abs(m) + c, m, theta);
            }
            p_block_[m + j_max] = std::move(P);
        }
        phases_.resize(2 * j_max + 1, n_phi_);
        for (int m = -j_max; m <= j_max; ++m)
            for (int b = 0; b < n_phi_; ++b)
                phases_(m + j_max, b) = std::polar(1.0, m * phiNode(b));
    }
}

double AngularGrid::phiNode(int b) const { return 2.0 * M_PI * b / n_phi_; }

Eigen::MatrixXd AngularGrid::evaluate(AngularFunction f) const {
    const bool fixed = basis_.fixedM().has_value();
    if (fixed && !angularFunctionPhiIndependent(f))
        throw std::invalid_argument("AngularGrid::evaluate: phi-dependent function on a fixed-m grid");
    Eigen::MatrixXd v(n_theta_, n_phi_);
    for (int a = 0; a < n_theta_; ++a) {
        const double x = x_[a];
        const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
        for (int b = 0; b < n_phi_; ++b) {
            const double cx = s * std::cos(phiNode(b));
            const double cy = s * std::sin(phiNode(b));
            double val = 0.0;
            switch (f) {
                case AngularFunction::Identity: val = 1.0; break;
                case AngularFunction::CosTheta: val = x; break;
                case AngularFunction::Cos2Theta: val = x * x; break;
                case AngularFunction::Cos3Theta: val = x * x * x; break;
                case AngularFunction::CosThetaX: val = cx; break;
                case AngularFunction::CosThetaY: val = cy; break;
                case AngularFunction::Cos2ThetaX: val = cx * cx; break;
                case AngularFunction::Cos2ThetaY: val = cy * cy; break;
                case AngularFunction::CosThetaXCosThetaY: val = cx * cy; break;
            }
            v(a, b) = val;
        }
    }
    return v;
}

Eigen::MatrixXcd AngularGrid::synthesize(const Eigen::MatrixXcd& coeffs) const {
    const int n = basis_.size();
    if (coeffs.rows() != n)
        throw std::invalid_argument("AngularGrid::synthesize: dimension mismatch");
    const int K = static_cast<int>(coeffs.cols());
    if (basis_.fixedM()) return realTimesComplex(synth_, coeffs);

    const int j_max = basis_.jMax();
    const int n_m = 2 * j_max + 1;
    Eigen::MatrixXcd T(static_cast<long>(n_theta_) * K, n_m);
    for (int mi = 0; mi < n_m; ++mi) {
        const int m = mi - j_max;
        Eigen::Map<Eigen::MatrixXcd> G(T.col(mi).data(), n_theta_, K);
        G = realTimesComplex(p_block_[mi], coeffs.middleRows(basis_.blockBegin(m), basis_.blockSize(m)));
    }
    return T * phases_;
}

Eigen::MatrixXcd AngularGrid::analyze(const Eigen::MatrixXcd& grid_values, int n_states) const {
    const int n = basis_.size();
    if (n_states != n)
        throw std::invalid_argument("AngularGrid::analyze: dimension mismatch");
    const Eigen::Map<const Eigen::VectorXd> w(w_.data(), n_theta_);
    if (basis_.fixedM()) {
        if (grid_values.rows() != n_theta_)
            throw std::invalid_argument("AngularGrid::analyze: dimension mismatch");
        return realTimesComplex(adjoint_, grid_values);
    }
    const int j_max = basis_.jMax();
    const int n_m = 2 * j_max + 1;
    const int K = static_cast<int>(grid_values.rows() / n_theta_);
    Eigen::MatrixXcd T = grid_values * phases_.adjoint() * (2.0 * M_PI / n_phi_);
    Eigen::MatrixXcd coeffs(n, K);
    for (int mi = 0; mi < n_m; ++mi) {
        const int m = mi - j_max;
        Eigen::Map<const Eigen::MatrixXcd> G(T.col(mi).data(), n_theta_, K);
        coeffs.middleRows(basis_.blockBegin(m), basis_.blockSize(m)) =
            realTimesComplex(p_block_[mi].transpose() * w.asDiagonal(), G);
    }
    return coeffs;
}

Eigen::VectorXcd AngularGrid::toGrid(const Eigen::VectorXcd& coeffs) const {
    Eigen::MatrixXcd g = synthesize(coeffs);
    if (basis_.fixedM()) return g.col(0);
    Eigen::VectorXcd flat(n_theta_ * n_phi_);
    for (int a = 0; a < n_theta_; ++a)
        for (int b = 0; b < n_phi_; ++b) flat(a * n_phi_ + b) = g(a, b);
    return flat;
}

Eigen::VectorXcd AngularGrid::fromGrid(const Eigen::VectorXcd& grid_values) const {
    if (grid_values.size() != static_cast<long>(n_theta_) * n_phi_)
        throw std::invalid_argument("AngularGrid::fromGrid: dimension mismatch");
    if (basis_.fixedM()) return analyze(grid_values, basis_.size()).col(0);
    Eigen::MatrixXcd g(n_theta_, n_phi_);
    for (int a = 0; a < n_theta_; ++a)
        for (int b = 0; b < n_phi_; ++b) g(a, b) = grid_values(a * n_phi_ + b);
    return analyze(g, basis_.size()).col(0);
}

void AngularGrid::applyPointwise(Eigen::MatrixXcd& grid_values,
                                 const Eigen::MatrixXcd& factor, int n_states) const {
    (void)n_states;
    if (basis_.fixedM()) {
        grid_values.array().colwise() *= factor.col(0).array();
        return;
    }
    const int K = static_cast<int>(grid_values.rows() / n_theta_);
    for (int b = 0; b < n_phi_; ++b)
        for (int k = 0; k < K; ++k)
            grid_values.col(b).segment(static_cast<long>(k) * n_theta_, n_theta_).array() *=
                factor.col(b).array();
}

namespace {

void addEntry(Eigen::MatrixXcd& M, const Basis& basis, int j1, int m1, int j2, int m2, cd v) {
    if (basis.contains(j1, m1) && basis.contains(j2, m2))
        M(basis.index(j1, m1), basis.index(j2, m2)) += v;
}

} // namespace

AngularOperator cosThetaMatrix(const Basis& basis) {
    const int n = basis.size();
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const auto [j, m] = basis.state(i);
        const double a = std::sqrt((double)((j + 1) * (j + 1) - m * m) /
                                   ((2.0 * j + 1) * (2.0 * j + 3)));
        addEntry(M, basis, j + 1, m, j, m, a);
        addEntry(M, basis, j, m, j + 1, m, a);
    }
    // each allowed pair is visited once from its lower-j side
    return {angularFunctionLabel(AngularFunction::CosTheta), std::move(M)};
}

AngularOperator cosThetaXMatrix(const Basis& basis) {
    if (basis.fixedM())
        throw std::invalid_argument("cosThetaXMatrix: requires the full basis");
    const int n = basis.size();
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const auto [j, m] = basis.state(i);
        const double s_up = std::sqrt((j + m + 1.0) * (j + m + 2.0) / ((2.0 * j + 1) * (2.0 * j + 3)));
        const double s_dn = (j > 0) ? std::sqrt((j - m) * (j - m - 1.0) / ((2.0 * j - 1) * (2.0 * j + 1))) : 0.0;
        const double t_up = std::sqrt((j - m + 1.0) * (j - m + 2.0) / ((2.0 * j + 1) * (2.0 * j + 3)));
        const double t_dn = (j > 0) ? std::sqrt((j + m) * (j + m - 1.0) / ((2.0 * j - 1) * (2.0 * j + 1))) : 0.0;
        addEntry(M, basis, j + 1, m + 1, j, m, -0.5 * s_up);
        addEntry(M, basis, j - 1, m + 1, j, m, 0.5 * s_dn);
        addEntry(M, basis, j + 1, m - 1, j, m, 0.5 * t_up);
        addEntry(M, basis, j - 1, m - 1, j, m, -0.5 * t_dn);
    }
    return {angularFunctionLabel(AngularFunction::CosThetaX), std::move(M)};
}

AngularOperator cosThetaYMatrix(const Basis& basis) {
    if (basis.fixedM())
        throw std::invalid_argument("cosThetaYMatrix: requires the full basis");
    const int n = basis.size();
    const cd ih(0.0, 0.5);
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const auto [j, m] = basis.state(i);
        const double s_up = std::sqrt((j + m + 1.0) * (j + m + 2.0) / ((2.0 * j + 1) * (2.0 * j + 3)));
        const double s_dn = (j > 0) ? std::sqrt((j - m) * (j - m - 1.0) / ((2.0 * j - 1) * (2.0 * j + 1))) : 0.0;
        const double t_up = std::sqrt((j - m + 1.0) * (j - m + 2.0) / ((2.0 * j + 1) * (2.0 * j + 3)));
        const double t_dn = (j > 0) ? std::sqrt((j + m) * (j + m - 1.0) / ((2.0 * j - 1) * (2.0 * j + 1))) : 0.0;
        addEntry(M, basis, j + 1, m + 1, j, m, ih * s_up);
        addEntry(M, basis, j - 1, m + 1, j, m, -ih * s_dn);
        addEntry(M, basis, j + 1, m - 1, j, m, ih * t_up);
        addEntry(M, basis, j - 1, m - 1, j, m, -ih * t_dn);
    }
    return {angularFunctionLabel(AngularFunction::CosThetaY), std::move(M)};
}

AngularOperator jSquaredMatrix(const Basis& basis) {
    const int n = basis.size();
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const double j = basis.state(i).j;
        M(i, i) = j * (j + 1.0);
    }
    return {"J^2", std::move(M)};
}

AngularOperator identityOperator(const Basis& basis) {
    return {angularFunctionLabel(AngularFunction::Identity),
            Eigen::MatrixXcd::Identity(basis.size(), basis.size())};
}

AngularOperator multiplicationOperator(const Basis& basis, const AngularGrid& grid,
                                       AngularFunction f) {
    const int n = basis.size();
    Eigen::MatrixXcd S = grid.synthesize(Eigen::MatrixXcd::Identity(n, n));
    grid.applyPointwise(S, grid.evaluate(f).cast<cd>(), n);
    return {angularFunctionLabel(f), grid.analyze(S, n)};
}

AngularOperator analyticOperator(const Basis& basis, AngularFunction f) {
    enum class Factor { Z, X, Y };
    std::vector<Factor> factors;
    switch (f) {
        case AngularFunction::Identity: return identityOperator(basis);
        case AngularFunction::CosTheta: factors = {Factor::Z}; break;
        case AngularFunction::Cos2Theta: factors = {Factor::Z, Factor::Z}; break;
        case AngularFunction::Cos3Theta: factors = {Factor::Z, Factor::Z, Factor::Z}; break;
        case AngularFunction::CosThetaX: factors = {Factor::X}; break;
        case AngularFunction::CosThetaY: factors = {Factor::Y}; break;
        case AngularFunction::Cos2ThetaX: factors = {Factor::X, Factor::X}; break;
        case AngularFunction::Cos2ThetaY: factors = {Factor::Y, Factor::Y}; break;
        case AngularFunction::CosThetaXCosThetaY: factors = {Factor::X, Factor::Y}; break;
    }
    if (basis.fixedM() && !angularFunctionPhiIndependent(f))
        throw std::invalid_argument("analyticOperator: phi-dependent function on a fixed-m basis");

    const int pad = static_cast<int>(factors.size());
    Basis padded(basis.jMax() + pad, basis.fixedM());
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(padded.size(), padded.size());
    for (Factor fac : factors) {
        switch (fac) {
            case Factor::Z: P = cosThetaMatrix(padded).matrix * P; break;
            case Factor::X: P = cosThetaXMatrix(padded).matrix * P; break;
            case Factor::Y: P = cosThetaYMatrix(padded).matrix * P; break;
        }
    }
    const int n = basis.size();
    Eigen::MatrixXcd M(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const auto [jr, mr] = basis.state(r);
            const auto [jc, mc] = basis.state(c);
            M(r, c) = P(padded.index(jr, mr), padded.index(jc, mc));
        }
    return {angularFunctionLabel(f), std::move(M)};
}

} // namespace rotor
