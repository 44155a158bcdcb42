#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>

#include "rotor/model.hpp"

using namespace rotor;

namespace {

struct Built {
    std::shared_ptr<Basis> basis;
    std::shared_ptr<AngularGrid> grid;
};

Built makeSpace(int j_max, std::optional<int> fixed_m) {
    Built b;
    b.basis = std::make_shared<Basis>(j_max, fixed_m);
    b.grid = std::make_shared<AngularGrid>(*b.basis);
    return b;
}

} // namespace

TEST_CASE("molecular constants and derived scales") {
    const MoleculeParams p;
    CHECK(p.rotationalConstant() == doctest::Approx(8.7997e-6).epsilon(1e-4));
    CHECK(p.rotationalPeriod() == doctest::Approx(3.5701e5).epsilon(1e-4));
    CHECK(p.deltaAlpha() == doctest::Approx(3.92).epsilon(1e-12));
}

TEST_CASE("carrier-resolved z model: dipole, polarizability, hyperpolarizability terms") {
    auto [basis, grid] = makeSpace(6, 0);
    const MoleculeParams p;
    const HamiltonianModel model = hamiltonianZFull(p, basis, grid);
    REQUIRE(model.channels == 1);

    const Eigen::MatrixXcd cos1 = analyticOperator(*basis, AngularFunction::CosTheta).matrix;
    const Eigen::MatrixXcd cos2 = analyticOperator(*basis, AngularFunction::Cos2Theta).matrix;
    const Eigen::MatrixXcd cos3 = analyticOperator(*basis, AngularFunction::Cos3Theta).matrix;
    const Eigen::MatrixXcd one =
        Eigen::MatrixXcd::Identity(basis->size(), basis->size());

    const double e = 5.3e-3;
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(basis->size(), basis->size());
    for (int i = 0; i < basis->size(); ++i) {
        const int j = basis->state(i).j;
        expected(i, i) = p.rotationalConstant() * j * (j + 1.0);
    }
    expected += -p.mu0 * cos1 * e;
    expected += -0.5 * (p.deltaAlpha() * cos2 + p.alpha_perp * one) * e * e;
    expected += -(1.0 / 6.0) *
                ((p.beta_par - 3.0 * p.beta_perp) * cos3 + 3.0 * p.beta_perp * cos1) * e * e * e;

    Eigen::VectorXd field(1);
    field << e;
    CHECK((model.evaluate(field) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("cycle-averaged z model has no dipole term and halved weights") {
    auto [basis, grid] = makeSpace(6, 0);
    const MoleculeParams p;
    const HamiltonianModel model = hamiltonianZAveraged(p, basis, grid);

    const Eigen::MatrixXcd cos1 = analyticOperator(*basis, AngularFunction::CosTheta).matrix;
    const Eigen::MatrixXcd cos2 = analyticOperator(*basis, AngularFunction::Cos2Theta).matrix;
    const Eigen::MatrixXcd cos3 = analyticOperator(*basis, AngularFunction::Cos3Theta).matrix;
    const Eigen::MatrixXcd one =
        Eigen::MatrixXcd::Identity(basis->size(), basis->size());

    // derivative at E = 0 vanishes: no first-order coupling survives averaging
    Eigen::VectorXd zero(1);
    zero << 0.0;
    CHECK(model.derivative(0, zero).cwiseAbs().maxCoeff() < 1e-14);

    const double e = 4.0e-3;
    Eigen::VectorXd field(1);
    field << e;
    Eigen::MatrixXcd expected = model.evaluate(zero); // H0
    expected += -0.25 * (p.deltaAlpha() * cos2 + p.alpha_perp * one) * e * e;
    expected += -0.125 *
                ((p.beta_par - 3.0 * p.beta_perp) * cos3 + 3.0 * p.beta_perp * cos1) * e * e * e;
    CHECK((model.evaluate(field) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("elliptic xy model: two channels and phase-weighted cross term") {
    auto [basis, grid] = makeSpace(4, std::nullopt);
    const MoleculeParams p;
    const double phase = M_PI / 4.0;
    const HamiltonianModel model = hamiltonianXY(p, basis, grid, phase);
    REQUIRE(model.channels == 2);

    const Eigen::MatrixXcd c2x = analyticOperator(*basis, AngularFunction::Cos2ThetaX).matrix;
    const Eigen::MatrixXcd c2y = analyticOperator(*basis, AngularFunction::Cos2ThetaY).matrix;
    const Eigen::MatrixXcd cxy =
        analyticOperator(*basis, AngularFunction::CosThetaXCosThetaY).matrix;
    const Eigen::MatrixXcd one =
        Eigen::MatrixXcd::Identity(basis->size(), basis->size());

    const double ex = 3.0e-3, ey = 2.0e-3;
    Eigen::VectorXd field(2), zero(2);
    field << ex, ey;
    zero << 0.0, 0.0;
    Eigen::MatrixXcd expected = model.evaluate(zero);
    expected += -0.25 * p.deltaAlpha() * (c2x * ex * ex + c2y * ey * ey);
    expected += -0.25 * p.deltaAlpha() * 2.0 * std::cos(phase) * cxy * ex * ey;
    expected += -0.25 * p.alpha_perp * one * (ex * ex + ey * ey);
    CHECK((model.evaluate(field) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("field derivatives agree with central finite differences") {
    auto [basis, grid] = makeSpace(5, 0);
    const HamiltonianModel model = hamiltonianZFull(MoleculeParams{}, basis, grid);
    Eigen::VectorXd e(1);
    e << 2.7e-3;
    const double h = 1e-6;
    Eigen::VectorXd ep = e, em = e;
    ep(0) += h;
    em(0) -= h;
    const Eigen::MatrixXcd fd1 = (model.evaluate(ep) - model.evaluate(em)) / (2.0 * h);
    CHECK((model.derivative(0, e) - fd1).cwiseAbs().maxCoeff() < 1e-8);
    const Eigen::MatrixXcd fd2 =
        (model.evaluate(ep) - 2.0 * model.evaluate(e) + model.evaluate(em)) / (h * h);
    CHECK((model.secondDerivative(0, e) - fd2).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("grid potential matches the dense interaction") {
    auto [basis, grid] = makeSpace(5, 0);
    const HamiltonianModel model = hamiltonianZFull(MoleculeParams{}, basis, grid);
    Eigen::VectorXd e(1), zero(1);
    e << 5.0e-3;
    zero << 0.0;
    // multiplication by the grid potential, pulled back to the basis, equals
    // the dense interaction matrix
    const Eigen::MatrixXd v = model.gridPotential(e);
    Eigen::MatrixXcd dense(basis->size(), basis->size());
    for (int col = 0; col < basis->size(); ++col) {
        Eigen::VectorXcd unit = Eigen::VectorXcd::Zero(basis->size());
        unit(col) = 1.0;
        Eigen::VectorXcd on_grid = grid->toGrid(unit);
        for (int a = 0; a < grid->nTheta(); ++a)
            for (int b = 0; b < grid->nPhi(); ++b) on_grid(a * grid->nPhi() + b) *= v(a, b);
        dense.col(col) = grid->fromGrid(on_grid);
    }
    const Eigen::MatrixXcd interaction = model.evaluate(e) - model.evaluate(zero);
    CHECK((dense - interaction).cwiseAbs().maxCoeff() < 1e-12);
}
