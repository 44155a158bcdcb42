#include "rotor/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rotor {

namespace {

void polish(const Cubic& c, double& e) {
    for (int it = 0; it < 8; ++it) {
        const double f = c.eval(e);
        const double df = c.deriv(e);
        if (df == 0.0) break;
        const double step = f / df;
        e -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(e))) break;
    }
}

} // namespace

std::vector<double> realCubicRoots(const Cubic& c) {
    if (c.c3 == 0.0 || !std::isfinite(c.c3) || !std::isfinite(c.c2) ||
        !std::isfinite(c.c1) || !std::isfinite(c.c0))
        throw std::invalid_argument("realCubicRoots: invalid coefficients");

    const double a = c.c2 / c.c3;
    const double b = c.c1 / c.c3;
    const double d = c.c0 / c.c3;
    const double shift = -a / 3.0;
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + d;

    std::vector<double> roots;
    const double disc = -4.0 * p * p * p - 27.0 * q * q;
    if (disc > 0.0) {
        // three distinct real roots (requires p < 0)
        const double r = 2.0 * std::sqrt(-p / 3.0);
        double arg = 3.0 * q / (p * r);
        arg = std::clamp(arg, -1.0, 1.0);
        const double phi = std::acos(arg);
        for (int k = 0; k < 3; ++k)
            roots.push_back(shift + r * std::cos((phi - 2.0 * M_PI * k) / 3.0));
    } else if (p == 0.0 && q == 0.0) {
        roots.push_back(shift);
    } else {
        const double h = std::sqrt(std::max(0.0, q * q / 4.0 + p * p * p / 27.0));
        const double t = std::cbrt(-q / 2.0 + h) + std::cbrt(-q / 2.0 - h);
        roots.push_back(shift + t);
        if (disc == 0.0) {
            // double root at -t/2 in depressed coordinates
            roots.push_back(shift - t / 2.0);
        }
    }
    for (double& e : roots) polish(c, e);
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double x, double y) {
                                return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
                            }),
                roots.end());
    return roots;
}

Cubic assembleUpdateCubic(const CubicUpdateProblem& p) {
    if (!(p.lambda_over_s > 0.0))
        throw std::invalid_argument("assembleUpdateCubic: lambda/S must be positive");
    const double L = 4.0 * p.lambda_over_s;
    const double ek = p.e_prev;
    Cubic c;
    c.c3 = L;
    c.c2 = -3.0 * L * ek - p.b2;
    c.c1 = 3.0 * L * ek * ek - p.b1;
    c.c0 = -L * ek * ek * ek - p.b0;
    return c;
}

std::vector<double> cubicUpdateRoots(const CubicUpdateProblem& p) {
    if (!(p.lambda_over_s > 0.0))
        throw std::invalid_argument("cubicUpdateRoots: lambda/S must be positive");
    // Solve in the step variable d = E - e_prev: the absolute-field cubic
    // cancels catastrophically around e_prev when lambda/S is large, while
    // the shifted form keeps full relative precision on small steps.
    const double ek = p.e_prev;
    Cubic shifted;
    shifted.c3 = 4.0 * p.lambda_over_s;
    shifted.c2 = -p.b2;
    shifted.c1 = -(2.0 * p.b2 * ek + p.b1);
    shifted.c0 = -((p.b2 * ek + p.b1) * ek + p.b0);
    std::vector<double> roots = realCubicRoots(shifted);
    for (double& r : roots) r += ek;
    std::sort(roots.begin(), roots.end(), [&](double x, double y) {
        const double dx = std::abs(x - p.e_prev), dy = std::abs(y - p.e_prev);
        if (dx != dy) return dx < dy;
        return std::abs(x) < std::abs(y);
    });
    return roots;
}

double updateSurrogateCost(const CubicUpdateProblem& p, double e) {
    const double de = e - p.e_prev;
    return p.lambda_over_s * de * de * de * de -
           ((p.b2 / 3.0 * e + p.b1 / 2.0) * e + p.b0) * e;
}

UpdateRootChoice chooseUpdateRoot(const CubicUpdateProblem& p) {
    const double phi_prev = updateSurrogateCost(p, p.e_prev);
    const double tol = 1e-12 * std::max(1.0, std::abs(phi_prev));
    for (double r : cubicUpdateRoots(p))
        if (updateSurrogateCost(p, r) <= phi_prev + tol) return {r, false};
    return {p.e_prev, true};
}

} // namespace rotor
