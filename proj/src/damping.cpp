#include "dampnet/damping.hpp"

#include <cmath>
#include <sstream>

#include "dampnet/errors.hpp"

namespace dampnet {

DampingShape DampingShape::monomial(int degree, double coefficient) {
    if (degree < 1) throw DomainError("damping monomial degree must be >= 1");
    if (!(coefficient > 0.0)) throw DomainError("damping monomial coefficient must be > 0");
    DampingShape s;
    s.kind_ = Kind::monomial;
    s.degree_ = degree;
    s.coefficient_ = coefficient;
    return s;
}

DampingShape DampingShape::monomial(int degree) {
    const auto c = default_coefficient(degree);
    if (!c) {
        std::ostringstream msg;
        msg << "no reference coefficient for damping degree " << degree << " (known: 1..4)";
        throw DomainError(msg.str());
    }
    return monomial(degree, *c);
}

std::optional<double> DampingShape::default_coefficient(int degree) {
    switch (degree) {
        case 1: return 1.0;
        case 2: return 15.0;
        case 3: return 200.0;
        case 4: return 2500.0;
        default: return std::nullopt;
    }
}

double DampingShape::g_hat(double z) const {
    if (z < 0.0) throw DomainError("g_hat: z must be non-negative");
    if (kind_ == Kind::none) return 0.0;
    return coefficient_ * std::pow(z, degree_);
}

double DampingShape::g_hat_derivative(double z) const {
    if (kind_ == Kind::none) return 0.0;
    return coefficient_ * degree_ * std::pow(z, degree_ - 1);
}

double DampingShape::G_tilde(double z) const {
    if (kind_ == Kind::none) throw DomainError("G_tilde: undefined without damping");
    if (!(z > 0.0)) throw DomainError("G_tilde: z must be positive");
    if (degree_ == 1) return std::log(z) / coefficient_;
    const double k = 1.0 - degree_;
    return std::pow(z, k) / (coefficient_ * k);
}

double DampingShape::G_tilde_inv(double y) const {
    if (kind_ == Kind::none) throw DomainError("G_tilde_inv: undefined without damping");
    if (degree_ == 1) return std::exp(coefficient_ * y);
    if (!(y < 0.0)) {
        std::ostringstream msg;
        msg << "G_tilde_inv: " << y << " outside range (-inf, 0) for degree " << degree_;
        throw RangeError(msg.str());
    }
    const double k = 1.0 - degree_;
    return std::pow(coefficient_ * k * y, 1.0 / k);
}

std::string DampingShape::label() const {
    if (kind_ == Kind::none) return "none";
    return "n" + std::to_string(degree_);
}

// The mass forms below are G̃⁻¹(G̃(z) ± M) rearranged so that no large
// intermediate G̃ values appear:
//   n = 1:  z·exp(±C·M)
//   n ≥ 2:  z·(1 ∓ C·(n−1)·M·z^{n−1})^{−1/(n−1)}

double backward_damp_mass(const DampingShape& shape, double damping_mass, double z_end) {
    if (z_end < 0.0) throw DomainError("backward_damp: z_end must be non-negative");
    if (damping_mass < 0.0) throw DomainError("backward_damp: damping mass must be non-negative");
    if (shape.is_none() || z_end == 0.0 || damping_mass == 0.0) return z_end;
    const double c = shape.coefficient();
    if (shape.degree() == 1) return z_end * std::exp(c * damping_mass);
    const double k = shape.degree() - 1.0;
    const double base = 1.0 - c * k * damping_mass * std::pow(z_end, k);
    if (!(base > 0.0)) {
        std::ostringstream msg;
        msg << "backward damping blows up: degree " << shape.degree() << ", z_end " << z_end
            << ", damping mass " << damping_mass << " exceeds " << 1.0 / (c * k * std::pow(z_end, k));
        throw InfeasibleError(msg.str(), "", damping_mass);
    }
    return z_end * std::pow(base, -1.0 / k);
}

double forward_damp_mass(const DampingShape& shape, double damping_mass, double z_start) {
    if (z_start < 0.0) throw DomainError("forward_damp: z_start must be non-negative");
    if (damping_mass < 0.0) throw DomainError("forward_damp: damping mass must be non-negative");
    if (shape.is_none() || z_start == 0.0 || damping_mass == 0.0) return z_start;
    const double c = shape.coefficient();
    if (shape.degree() == 1) return z_start * std::exp(-c * damping_mass);
    const double k = shape.degree() - 1.0;
    return z_start * std::pow(1.0 + c * k * damping_mass * std::pow(z_start, k), -1.0 / k);
}

double backward_damp(const DampingShape& shape, const TimeFunction& mu, double t_start,
                     double t_end, double z_end) {
    if (t_start > t_end) throw DomainError("backward_damp: t_start must not exceed t_end");
    return backward_damp_mass(shape, mu.integral(t_start, t_end), z_end);
}

double forward_damp(const DampingShape& shape, const TimeFunction& mu, double t_start,
                    double t_end, double z_start) {
    if (t_start > t_end) throw DomainError("forward_damp: t_start must not exceed t_end");
    return forward_damp_mass(shape, mu.integral(t_start, t_end), z_start);
}

}  // namespace dampnet
