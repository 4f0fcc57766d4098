#include "dampnet/timefunc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dampnet/errors.hpp"

namespace dampnet {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TimeFunction::TimeFunction(double constant, std::vector<SineTerm> terms,
                           std::vector<StepTerm> steps)
    : constant_(constant), terms_(std::move(terms)), steps_(std::move(steps)) {
    std::stable_sort(steps_.begin(), steps_.end(),
                     [](const StepTerm& a, const StepTerm& b) { return a.at < b.at; });
}

double TimeFunction::eval(double t) const {
    double v = constant_;
    for (const auto& s : terms_) v += s.amplitude * std::sin(s.angular_factor * kPi * t + s.phase);
    for (const auto& st : steps_) {
        if (t >= st.at) v += st.delta;
    }
    return v;
}

double TimeFunction::antiderivative(double t) const {
    double v = constant_ * t;
    for (const auto& s : terms_) {
        if (s.angular_factor == 0.0) {
            v += s.amplitude * std::sin(s.phase) * t;
        } else {
            const double w = s.angular_factor * kPi;
            v -= s.amplitude / w * std::cos(w * t + s.phase);
        }
    }
    for (const auto& st : steps_) v += st.delta * std::max(0.0, t - st.at);
    return v;
}

double TimeFunction::integral(double a, double b) const {
    if (a > b) {
        std::ostringstream msg;
        msg << "integral: lower limit " << a << " exceeds upper limit " << b;
        throw DomainError(msg.str());
    }
    if (a == b) return 0.0;
    if (is_constant()) return constant_ * (b - a);
    return antiderivative(b) - antiderivative(a);
}

double TimeFunction::lower_bound() const {
    double v = constant_;
    for (const auto& s : terms_) {
        v += s.angular_factor == 0.0 ? s.amplitude * std::sin(s.phase) : -std::abs(s.amplitude);
    }
    double prefix = 0.0, lowest = 0.0;
    for (const auto& st : steps_) {
        prefix += st.delta;
        lowest = std::min(lowest, prefix);
    }
    return v + lowest;
}

double TimeFunction::upper_bound() const {
    double v = constant_;
    for (const auto& s : terms_) {
        v += s.angular_factor == 0.0 ? s.amplitude * std::sin(s.phase) : std::abs(s.amplitude);
    }
    double prefix = 0.0, highest = 0.0;
    for (const auto& st : steps_) {
        prefix += st.delta;
        highest = std::max(highest, prefix);
    }
    return v + highest;
}

double TimeFunction::advance_by_integral(double t_start, double target) const {
    if (!(target >= 0.0)) {
        std::ostringstream msg;
        msg << "advance_by_integral: target " << target << " must be non-negative";
        throw DomainError(msg.str());
    }
    if (target == 0.0) return t_start;
    if (is_constant()) {
        if (constant_ <= 0.0) throw NonInvertibleError("advance_by_integral: constant function is not positive");
        return t_start + target / constant_;
    }

    const double tol = 1e-13 * std::max(1.0, target);
    const double base = antiderivative(t_start);
    auto residual = [&](double t) { return antiderivative(t) - base - target; };

    // Bracket [lo, hi] with residual(lo) < 0 <= residual(hi).
    double lo = t_start;
    double hi;
    const double fmin = lower_bound();
    if (fmin > 0.0) {
        hi = t_start + target / fmin;
    } else {
        // No global bound: grow geometrically, sampling positivity on each
        // new segment.
        constexpr int kSamples = 64;
        double width = target / std::max(upper_bound(), 1e-300);
        hi = t_start;
        for (int grow = 0;; ++grow) {
            const double next = hi + width;
            for (int k = 1; k <= kSamples; ++k) {
                const double t = hi + width * k / kSamples;
                if (!(eval(t) > 0.0)) {
                    std::ostringstream msg;
                    msg << "advance_by_integral: function is not positive at t = " << t;
                    throw NonInvertibleError(msg.str());
                }
            }
            hi = next;
            if (residual(hi) >= 0.0) break;
            if (grow > 200) throw NonInvertibleError("advance_by_integral: bracket growth failed");
            width *= 2.0;
        }
    }

    // Newton with bisection fallback on the bracket.
    double t = lo + (hi - lo) * 0.5;
    if (fmin > 0.0) t = t_start + target / std::max(eval(t_start), fmin);
    t = std::clamp(t, lo, hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double r = residual(t);
        if (std::abs(r) <= tol) return t;
        if (r < 0.0) lo = t; else hi = t;
        const double d = eval(t);
        double next = d > 0.0 ? t - r / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == t || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            return next;
        }
        t = next;
    }
    return t;
}

}  // namespace dampnet
