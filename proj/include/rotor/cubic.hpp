#pragma once

#include <vector>

namespace rotor {

/// c3 E^3 + c2 E^2 + c1 E + c0.
struct Cubic {
    double c3 = 0.0, c2 = 0.0, c1 = 0.0, c0 = 0.0;
    double eval(double e) const { return ((c3 * e + c2) * e + c1) * e + c0; }
    double deriv(double e) const { return (3.0 * c3 * e + 2.0 * c2) * e + c1; }
};

/// All real roots (1 to 3), closed-form classification by the discriminant
/// followed by Newton polishing.  Requires c3 != 0.
std::vector<double> realCubicRoots(const Cubic& c);

/// Time-local field update of the quartic-cost optimizer:
///   (4 lambda / S)(E - E_prev)^3 - (b2 E^2 + b1 E + b0) = 0.
/// The positive leading coefficient guarantees a real solution.
struct CubicUpdateProblem {
    double lambda_over_s = 1.0; // lambda / S(t), > 0
    double e_prev = 0.0;
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
};

Cubic assembleUpdateCubic(const CubicUpdateProblem& p);

/// Real roots ordered by |root - e_prev| ascending (ties toward smaller
/// |root|), each polished to a relative residual below 1e-12.
std::vector<double> cubicUpdateRoots(const CubicUpdateProblem& p);

/// Local surrogate cost whose stationary points are the update-cubic roots:
///   (lambda/S)(e - e_prev)^4 - (b2/3 e^2 + b1/2 e + b0) e.
double updateSurrogateCost(const CubicUpdateProblem& p, double e);

/// Root the optimizer accepts: the closest-to-previous root that does not
/// increase the surrogate cost.  When no root qualifies the previous value is
/// kept and fallback is set (zero local gain).
struct UpdateRootChoice {
    double root = 0.0;
    bool fallback = false;
};
UpdateRootChoice chooseUpdateRoot(const CubicUpdateProblem& p);

} // namespace rotor
