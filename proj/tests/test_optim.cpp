#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>
#include <random>

#include "rotor/cubic.hpp"
#include "rotor/optimizer.hpp"

using namespace rotor;

namespace {

struct Scene {
    std::shared_ptr<Basis> basis;
    std::shared_ptr<AngularGrid> grid;
    HamiltonianModel model;
    TimeGrid time;
    FieldTrace guess;
    std::unique_ptr<PureStateTask> task;
};

/// Small z-polarized orientation problem that runs in milliseconds.
Scene makeScene(int n_steps = 256) {
    Scene s;
    s.basis = std::make_shared<Basis>(8, 0);
    s.grid = std::make_shared<AngularGrid>(*s.basis);
    s.model = hamiltonianZFull(MoleculeParams{}, s.basis, s.grid);
    s.time = TimeGrid(MoleculeParams{}.rotationalPeriod(), n_steps);
    s.guess = FieldTrace::zero(s.time, 1);
    const double t0 = 0.2 * s.time.t_final, sigma = 2529.0;
    for (int i = 0; i <= n_steps; ++i)
        s.guess.samples(i, 0) =
            5.338e-3 * std::exp(-0.5 * std::pow((s.time.edge(i) - t0) / sigma, 2));

    Eigen::VectorXcd ground = Eigen::VectorXcd::Zero(s.basis->size());
    ground(0) = 1.0;
    Eigen::VectorXcd target = Eigen::VectorXcd::Zero(s.basis->size());
    target(s.basis->index(1, 0)) = 1.0;
    s.task = std::make_unique<PureStateTask>(ground, target);
    return s;
}

std::vector<double> companionRoots(const Cubic& c) {
    Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
    comp(1, 0) = comp(2, 1) = 1.0;
    comp(0, 2) = -c.c0 / c.c3;
    comp(1, 2) = -c.c1 / c.c3;
    comp(2, 2) = -c.c2 / c.c3;
    Eigen::EigenSolver<Eigen::Matrix3d> es(comp);
    std::vector<double> roots;
    for (int k = 0; k < 3; ++k)
        if (std::abs(es.eigenvalues()(k).imag()) < 1e-8 * (1.0 + std::abs(es.eigenvalues()(k))))
            roots.push_back(es.eigenvalues()(k).real());
    std::sort(roots.begin(), roots.end());
    return roots;
}

} // namespace

TEST_CASE("closed-form cubic roots match the companion-matrix oracle") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 500; ++trial) {
        Cubic c{u(rng), u(rng), u(rng), u(rng)};
        if (std::abs(c.c3) < 1e-2) c.c3 = std::copysign(1e-2, c.c3 == 0 ? 1.0 : c.c3);
        auto mine = realCubicRoots(c);
        auto oracle = companionRoots(c);
        std::sort(mine.begin(), mine.end());
        REQUIRE(mine.size() == oracle.size());
        const double scale = std::max({1.0, std::abs(oracle.front()), std::abs(oracle.back())});
        for (size_t k = 0; k < mine.size(); ++k)
            CHECK(std::abs(mine[k] - oracle[k]) < 1e-9 * scale);
        for (double r : mine)
            CHECK(std::abs(c.eval(r)) <
                  1e-12 * std::max(1.0, std::abs(c.c3) * std::abs(r * r * r)));
    }

    // triple root and biased cases
    auto triple = realCubicRoots({1.0, -3.0, 3.0, -1.0}); // (e-1)^3
    REQUIRE(!triple.empty());
    for (double r : triple) CHECK(r == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("update cubic: residual polish and ordering around the previous field") {
    CubicUpdateProblem p;
    p.lambda_over_s = 2.0e3;
    p.e_prev = 1.0e-3;
    p.b0 = 4.0e-4;
    p.b1 = 3.0e-2;
    p.b2 = 0.5;
    const Cubic c = assembleUpdateCubic(p);
    const auto roots = cubicUpdateRoots(p);
    REQUIRE(!roots.empty());
    for (size_t k = 1; k < roots.size(); ++k)
        CHECK(std::abs(roots[k - 1] - p.e_prev) <= std::abs(roots[k] - p.e_prev) + 1e-15);
    for (double r : roots) CHECK(std::abs(c.eval(r)) < 1e-12 * std::max(1.0, std::abs(r)));
}

TEST_CASE("both updates collapse onto the previous field as lambda grows") {
    const Scene s = makeScene(128);
    for (OptimizerKind kind : {OptimizerKind::Krotov, OptimizerKind::Lapert}) {
        OptimizeOptions opts;
        opts.kind = kind;
        opts.lambda = kind == OptimizerKind::Krotov ? 1e8 : 1e30;
        opts.iterations = 1;
        const OptimizeResult res = optimize(s.model, *s.task, s.guess, s.time, opts);
        CHECK((res.field.samples - s.guess.samples).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("for weak gradients the quartic step is the cube root of the quadratic one") {
    const Scene s = makeScene(256);
    // lambdas large enough that both steps leave the trajectory unchanged;
    // with immediate feedback, unequal step sizes would decorrelate the runs
    OptimizeOptions kr;
    kr.kind = OptimizerKind::Krotov;
    kr.lambda = 1e8;
    kr.iterations = 1;
    OptimizeOptions lp;
    lp.kind = OptimizerKind::Lapert;
    lp.lambda = 1e30;
    lp.iterations = 1;
    const Eigen::VectorXd d_kr =
        optimize(s.model, *s.task, s.guess, s.time, kr).field.samples.col(0) -
        s.guess.samples.col(0);
    const Eigen::VectorXd d_lp =
        optimize(s.model, *s.task, s.guess, s.time, lp).field.samples.col(0) -
        s.guess.samples.col(0);
    // stationarity: 2 (lambda/S) dE_kr = gradient and 4 (lambda/S) dE_lp^3 =
    // 2 gradient, so dE_lp^3 should correlate perfectly with dE_kr
    Eigen::VectorXd cube = d_lp.array().cube();
    const double corr = cube.dot(d_kr) / (cube.norm() * d_kr.norm());
    CHECK(corr > 0.99);
}

TEST_CASE("optimization: monotone growth, endpoint pinning and history bookkeeping") {
    const Scene s = makeScene(512);
    for (OptimizerKind kind : {OptimizerKind::Krotov, OptimizerKind::Lapert}) {
        OptimizeOptions opts;
        opts.kind = kind;
        // lambdas large enough that the immediate-feedback updates stay in
        // the monotone regime at this fairly coarse time step
        opts.lambda = kind == OptimizerKind::Krotov ? 100.0 : 1e9;
        opts.iterations = 8;
        const OptimizeResult res = optimize(s.model, *s.task, s.guess, s.time, opts);

        REQUIRE(static_cast<int>(res.history.size()) == opts.iterations + 1);
        CHECK(res.monotonicity_violations == 0);
        CHECK(res.history.back().fidelity > res.history.front().fidelity);
        for (size_t k = 1; k < res.history.size(); ++k)
            CHECK(res.history[k].delta_c >= -opts.monotonicity_tol);

        // endpoint samples stay exactly at the guess
        CHECK(res.field.samples(0, 0) == s.guess.samples(0, 0));
        CHECK(res.field.samples(s.time.n_steps, 0) == s.guess.samples(s.time.n_steps, 0));
    }
}

TEST_CASE("the field-scale reparameterization shifts lambda by E_s^{2n}") {
    const Scene s = makeScene(256);
    OptimizeOptions a;
    a.kind = OptimizerKind::Krotov;
    a.lambda = 50.0;
    a.iterations = 3;
    OptimizeOptions b = a;
    b.lambda = 50.0 * 4.0; // lambda/Es^2 identical
    b.field_scale = 2.0;
    const auto ra = optimize(s.model, *s.task, s.guess, s.time, a);
    const auto rb = optimize(s.model, *s.task, s.guess, s.time, b);
    CHECK((ra.field.samples - rb.field.samples).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(ra.history.back().fidelity == doctest::Approx(rb.history.back().fidelity));
}

TEST_CASE("gradient identity: predicted first-order gain matches finite differences") {
    // Exact gradient of the discrete split-operator map: with U_i =
    // K exp(-i v(m_i) dt) K and K the half free step (diagonal in the basis),
    // dF/dm_i = 2 dt Im<chi_{i+1}| K (v' e^{-i v dt} applied pointwise) K |psi_i>
    // and each edge sample feels half of its two adjacent midpoints.
    const Scene s = makeScene(256);
    const double dt = s.time.dt();
    const Eigen::MatrixXcd psi0 = s.task->initialStates();

    const Eigen::MatrixXcd psiT = propagate(s.model, psi0, s.guess, s.time);
    const auto chi = propagateAdjointBackward(s.model, s.task->terminalAdjoint(psiT),
                                              s.guess, s.time);
    const Propagator prop(s.model, dt);

    Eigen::VectorXcd khalf(s.basis->size());
    for (int k = 0; k < s.basis->size(); ++k)
        khalf(k) = std::exp(std::complex<double>(0.0, -0.5 * dt * s.model.h0_diag(k)));
    const auto flat = [](const Eigen::MatrixXd& m) {
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()));
    };

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(s.time.n_steps + 1);
    Eigen::MatrixXcd psi = psi0;
    for (int i = 0; i < s.time.n_steps; ++i) {
        const Eigen::VectorXd e_mid = s.guess.midValue(i);
        // pointwise interaction and its field derivative; the five-point
        // Richardson difference is exact for the degree-3 polynomial in E
        const double h = 1e-3;
        const Eigen::VectorXd v = flat(s.model.gridPotential(e_mid));
        const Eigen::VectorXd vp =
            (4.0 / 3.0) / (2.0 * h) *
                flat(s.model.gridPotential(e_mid.array() + h) -
                     s.model.gridPotential(e_mid.array() - h)) -
            (1.0 / 3.0) / (4.0 * h) *
                flat(s.model.gridPotential(e_mid.array() + 2 * h) -
                     s.model.gridPotential(e_mid.array() - 2 * h));
        Eigen::VectorXcd pg = s.grid->toGrid(khalf.cwiseProduct(psi.col(0)));
        for (int q = 0; q < pg.size(); ++q)
            pg(q) *= std::exp(std::complex<double>(0.0, -dt * v(q))) * vp(q);
        const Eigen::VectorXcd d = khalf.cwiseProduct(s.grid->fromGrid(pg));
        const double g = 2.0 * dt * chi[i + 1].col(0).dot(d).imag();
        grad(i) += 0.5 * g;
        grad(i + 1) += 0.5 * g;
        prop.stepForward(psi, e_mid);
    }

    std::mt19937 rng(3);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd delta(s.time.n_steps + 1);
        for (int i = 0; i <= s.time.n_steps; ++i) delta(i) = gauss(rng);
        delta *= 1e-6 / delta.norm();

        FieldTrace up = s.guess, down = s.guess;
        up.samples.col(0) += delta;
        down.samples.col(0) -= delta;
        const double f_up = s.task->fidelity(propagate(s.model, psi0, up, s.time));
        const double f_down = s.task->fidelity(propagate(s.model, psi0, down, s.time));
        const double fd = (f_up - f_down) / 2.0;
        const double predicted = grad.dot(delta);
        CHECK(std::abs(fd - predicted) < 1e-5 * std::abs(fd));
    }
}

TEST_CASE("monotonicity bound check flags small lambda and passes large lambda") {
    const Scene s = makeScene(128);
    const MonotonicityReport tight =
        monotonicityBoundCheck(s.model, 1e4, s.guess, s.time);
    CHECK(tight.satisfied);
    CHECK(tight.violating_samples == 0);
    CHECK(tight.interior_samples == s.time.n_steps - 1);

    const MonotonicityReport loose =
        monotonicityBoundCheck(s.model, 5e-2, s.guess, s.time);
    CHECK_FALSE(loose.satisfied);
    CHECK(loose.violating_samples > 0);
    CHECK(loose.max_spectral_radius > 0.0);
}

TEST_CASE("root sensitivity decreases with lambda") {
    std::vector<double> xs;
    for (int k = 0; k <= 200; ++k) xs.push_back(-1.0 + 0.01 * k);
    const std::vector<double> lambdas{1e2, 1e4, 1e7};
    const auto points = rootSensitivityScan(lambdas, xs, 0.112, 7.825, 4.725);
    REQUIRE(points.size() == lambdas.size() * xs.size());

    std::vector<double> max_slope;
    for (size_t l = 0; l < lambdas.size(); ++l) {
        double worst = 0.0;
        for (size_t k = 1; k < xs.size(); ++k) {
            const auto& a = points[l * xs.size() + k - 1];
            const auto& b = points[l * xs.size() + k];
            worst = std::max(worst, std::abs(b.root - a.root) / (b.x - a.x));
        }
        max_slope.push_back(worst);
    }
    CHECK(max_slope[0] > max_slope[1]);
    CHECK(max_slope[1] > max_slope[2]);
}
