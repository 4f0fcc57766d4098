#pragma once

#include <vector>

namespace dampnet {

/// One sinusoidal term b·sin(c·π·t + φ).
struct SineTerm {
    double amplitude = 0.0;
    double angular_factor = 0.0;  // multiplies π·t
    double phase = 0.0;

    bool operator==(const SineTerm&) const = default;
};

/// Jump of height `delta` switched on at time `at` (right-continuous).
struct StepTerm {
    double at = 0.0;
    double delta = 0.0;

    bool operator==(const StepTerm&) const = default;
};

/// Scalar function of time
///
///     f(t) = a + Σ bₖ sin(cₖ π t + φₖ) + Σ hₘ·1[t ≥ sₘ]
///
/// Velocities λ(t), damping factors μ(t) and mean-reversion levels θ(t) all
/// use this family. The antiderivative is available in closed form, which is
/// what makes characteristic arrival times and damping masses exact.
class TimeFunction {
public:
    TimeFunction() = default;
    explicit TimeFunction(double constant, std::vector<SineTerm> terms = {},
                          std::vector<StepTerm> steps = {});

    static TimeFunction constant(double value) { return TimeFunction(value); }

    double operator()(double t) const { return eval(t); }
    double eval(double t) const;

    /// Closed-form antiderivative with Λ(0) = 0.
    double antiderivative(double t) const;

    /// ∫ₐᵇ f(s) ds. Throws DomainError when a > b.
    double integral(double a, double b) const;

    /// Solves ∫_{t_start}^{t_end} f = target for t_end. Requires f bounded
    /// below by a positive constant (see lower_bound()).
    double advance_by_integral(double t_start, double target) const;

    /// Guaranteed bounds over all t: a − Σ|bₖ| + (most negative step prefix).
    double lower_bound() const;
    double upper_bound() const;

    bool is_constant() const { return terms_.empty() && steps_.empty(); }

    double constant_part() const { return constant_; }
    const std::vector<SineTerm>& terms() const { return terms_; }
    const std::vector<StepTerm>& steps() const { return steps_; }

    bool operator==(const TimeFunction&) const = default;

private:
    double constant_ = 0.0;
    std::vector<SineTerm> terms_;
    std::vector<StepTerm> steps_;  // sorted by `at`
};

}  // namespace dampnet
