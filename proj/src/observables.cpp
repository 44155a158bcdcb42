#include "rotor/observables.hpp"

#include <stdexcept>

namespace rotor {

namespace {

double realWithCheck(std::complex<double> v, const char* what) {
    if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real())))
        throw std::runtime_error(std::string(what) + ": non-negligible imaginary residue");
    return v.real();
}

} // namespace

double expectation(const Eigen::VectorXcd& psi, const Eigen::MatrixXcd& op) {
    if (psi.size() != op.rows() || op.rows() != op.cols())
        throw std::invalid_argument("expectation: dimension mismatch");
    return realWithCheck(psi.dot(op * psi), "expectation");
}

double expectationDensity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& op) {
    if (rho.rows() != op.rows() || rho.cols() != op.cols())
        throw std::invalid_argument("expectationDensity: dimension mismatch");
    return realWithCheck((rho * op).trace(), "expectationDensity");
}

double expectationEnsemble(const Eigen::MatrixXcd& cols, const Eigen::MatrixXcd& op) {
    if (cols.rows() != op.rows())
        throw std::invalid_argument("expectationEnsemble: dimension mismatch");
    std::complex<double> acc = 0.0;
    for (long k = 0; k < cols.cols(); ++k) acc += cols.col(k).dot(op * cols.col(k));
    return realWithCheck(acc, "expectationEnsemble");
}

double jzOrientationMeasure(const Eigen::VectorXcd& psi, const Basis& basis) {
    double jz = 0.0, j2 = 0.0;
    for (int i = 0; i < basis.size(); ++i) {
        const double p = std::norm(psi(i));
        jz += p * basis.state(i).m;
        j2 += p * basis.state(i).j * (basis.state(i).j + 1.0);
    }
    if (j2 <= 0.0)
        throw std::domain_error("jzOrientationMeasure: undefined for <J^2> = 0");
    return jz / std::sqrt(j2);
}

AlignmentSplit alignmentSplit(const Eigen::MatrixXcd& rho, const Basis& basis,
                              const Eigen::MatrixXcd& cos2) {
    if (rho.rows() != basis.size() || cos2.rows() != basis.size())
        throw std::invalid_argument("alignmentSplit: dimension mismatch");
    std::complex<double> perm = 0.0, coh = 0.0;
    for (int r = 0; r < basis.size(); ++r)
        for (int c = 0; c < basis.size(); ++c) {
            const std::complex<double> term = rho(c, r) * cos2(r, c);
            if (basis.state(r).j == basis.state(c).j)
                perm += term;
            else
                coh += term;
        }
    AlignmentSplit s;
    s.permanent = realWithCheck(perm, "alignmentSplit");
    s.coherent = realWithCheck(coh, "alignmentSplit");
    return s;
}

double fidelityPure(const Eigen::VectorXcd& psi, const Eigen::VectorXcd& target) {
    if (psi.size() != target.size())
        throw std::invalid_argument("fidelityPure: dimension mismatch");
    return std::norm(target.dot(psi));
}

double fidelityDensity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& rho_f) {
    if (rho.rows() != rho_f.rows() || rho.cols() != rho_f.cols())
        throw std::invalid_argument("fidelityDensity: dimension mismatch");
    const double denom = realWithCheck((rho_f * rho_f).trace(), "fidelityDensity");
    return realWithCheck((rho_f * rho).trace(), "fidelityDensity") / denom;
}

double runningCost(const FieldTrace& field, const FieldTrace& reference,
                   const CostSpec& spec, const TimeGrid& grid) {
    if (field.samples.rows() != reference.samples.rows() ||
        field.samples.cols() != reference.samples.cols())
        throw std::invalid_argument("runningCost: trace shapes differ");
    if (!field.samples.allFinite())
        throw std::runtime_error("runningCost: non-finite field");
    const int half_exp = spec.exponent2n / 2;
    double acc = 0.0;
    for (int i = 1; i < grid.n_steps; ++i) {
        const double s = shapeFunction(grid.edge(i), grid.t_final);
        for (int c = 0; c < field.channels(); ++c) {
            const double d = (field.samples(i, c) - reference.samples(i, c)) / spec.field_scale;
            double p = d * d;
            for (int e = 1; e < half_exp; ++e) p *= d * d;
            acc += p / s;
        }
    }
    return spec.lambda * acc * grid.dt();
}

} // namespace rotor
