#pragma once

#include <optional>
#include <string>

#include "dampnet/timefunc.hpp"

namespace dampnet {

/// Nonlinear damping factor ĝ(z) = C·zⁿ (or no damping at all).
///
/// Along a characteristic the quantity obeys z′ = −μ(t)·ĝ(z). With
/// G̃ the antiderivative of 1/ĝ the solution is explicit:
///
///     G̃(z(t₂)) = G̃(z(t₁)) − ∫_{t₁}^{t₂} μ
///
///   n = 1:  G̃(z) = ln(z)/C,                G̃⁻¹(y) = exp(C·y)
///   n ≥ 2:  G̃(z) = z^{1−n} / (C·(1−n)),    G̃⁻¹(y) = (C·(1−n)·y)^{1/(1−n)}, y < 0
class DampingShape {
public:
    enum class Kind { none, monomial };

    DampingShape() = default;

    static DampingShape none() { return {}; }
    static DampingShape monomial(int degree, double coefficient);
    /// Monomial with the normalized coefficient of the reference experiment
    /// (C₁..C₄ = 1, 15, 200, 2500; ∫₀^{0.1} C zⁿ dz = 1/200).
    static DampingShape monomial(int degree);

    /// Reference coefficient for degree 1..4, nullopt otherwise.
    static std::optional<double> default_coefficient(int degree);

    Kind kind() const { return kind_; }
    int degree() const { return degree_; }
    double coefficient() const { return coefficient_; }
    bool is_none() const { return kind_ == Kind::none; }

    double g_hat(double z) const;
    /// dĝ/dz, used for the explicit damping substep bound.
    double g_hat_derivative(double z) const;

    double G_tilde(double z) const;
    double G_tilde_inv(double y) const;

    /// Short label such as "none" or "n2".
    std::string label() const;

    bool operator==(const DampingShape&) const = default;

private:
    Kind kind_ = Kind::none;
    int degree_ = 0;
    double coefficient_ = 0.0;
};

/// Upstream quantity z(t_start) that the damping ODE carries to z_end at
/// t_end. Throws InfeasibleError when the backward solution blows up.
double backward_damp(const DampingShape& shape, const TimeFunction& mu, double t_start,
                     double t_end, double z_end);

/// Same as above with the damping mass ∫μ precomputed.
double backward_damp_mass(const DampingShape& shape, double damping_mass, double z_end);

/// Downstream quantity z(t_end) starting from z_start at t_start.
double forward_damp(const DampingShape& shape, const TimeFunction& mu, double t_start,
                    double t_end, double z_start);

double forward_damp_mass(const DampingShape& shape, double damping_mass, double z_start);

}  // namespace dampnet
