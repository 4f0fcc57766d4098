#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dampnet/errors.hpp"
#include "dampnet/pde.hpp"
#include "scenarios.hpp"

using namespace dampnet;
using scenarios::sine;

namespace {

std::vector<std::vector<double>> zeros(const TreeNetwork& net, double dx) {
    std::vector<std::vector<double>> z;
    for (const auto& a : net.arcs()) z.emplace_back(static_cast<std::size_t>(std::llround(a.length / dx)), 0.0);
    return z;
}

double bump(double t) { return t > 0.2 && t < 0.6 ? std::pow(std::sin((t - 0.2) / 0.4 * std::numbers::pi), 2) : 0.0; }

InflowSeries sampled(const std::function<double(double)>& f, double T, double dt = 1e-4) {
    std::vector<double> t, v;
    for (double s = 0; s <= T + 2 * dt; s += dt) {
        t.push_back(s);
        v.push_back(f(s));
    }
    return {t, v};
}

}  // namespace

TEST_CASE("grid construction") {
    const auto arc = scenarios::arc("1", "a", "b", sine(14, 1, 2), sine(1, 0.2, 1));
    const auto g = make_arc_grid(arc, 1.0 / 200, 0.0, 2.5);
    CHECK(g.cells == 200);
    CHECK(g.times.back() >= 2.5);
    double lo = 1e9, hi = 0;
    for (std::size_t j = 0; j < g.steps(); ++j) {
        const double dt = g.times[j + 1] - g.times[j];
        lo = std::min(lo, dt);
        hi = std::max(hi, dt);
        CHECK(std::abs(dt * arc.velocity(g.times[j]) / g.dx - 1.0) < 1e-12);
    }
    CHECK(lo >= 1.0 / (15 * 200) * (1 - 1e-12));
    CHECK(hi <= 1.0 / (13 * 200) * (1 + 1e-12));
    CHECK_THROWS_AS(make_arc_grid(arc, 0.3, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(make_arc_grid(arc, 0.0, 0.0, 1.0), DomainError);
}

TEST_CASE("undamped transport is an exact shift") {
    const auto arc = scenarios::arc("1", "a", "b", sine(3, 1, 2), TimeFunction::constant(0));
    const auto g = make_arc_grid(arc, 0.01, 0.0, 2.0);
    ArcState s{std::vector<double>(g.cells, 0.0)};
    std::vector<double> ghost, out;
    for (std::size_t j = 0; j < g.steps(); ++j) {
        const double f = 0.1 + bump(g.times[j]) * 1.37;
        ghost.push_back(f / arc.velocity(g.times[j]));
        step_arc(s, g, j, arc, f);
        out.push_back(s.z.back());
    }
    // a ghost value leaves the last cell after `cells` steps
    for (std::size_t j = 0; j + g.cells - 1 < out.size(); ++j) CHECK(out[j + g.cells - 1] == ghost[j]);
}

TEST_CASE("step_arc errors") {
    auto arc = scenarios::arc("1", "a", "b", TimeFunction::constant(1), TimeFunction::constant(1),
                              DampingShape::monomial(1, 1000.0));
    const auto g = make_arc_grid(arc, 0.01, 0.0, 1.0);
    ArcState s{std::vector<double>(g.cells, 0.5)};
    CHECK_THROWS_AS(step_arc(s, g, 0, arc, -1.0), DomainError);
    CHECK_THROWS_AS(step_arc(s, g, 0, arc, 0.5), NumericsError);
}

TEST_CASE("1-1 network without damping delays a bump by the travel time") {
    const auto net = scenarios::one_one(TimeFunction::constant(2), TimeFunction::constant(4),
                                        TimeFunction::constant(0), DampingShape::none());
    const double dx = 1.0 / 400;
    const auto sim = simulate_network(net, sampled(bump, 2.0, 1.0 / 4000), FixedAlpha({1.0}), zeros(net, dx), 0.0, 2.0, dx);
    const auto supply = sim.supply(net, 2);
    double err = 0;
    for (std::size_t i = 0; i < supply.times.size(); ++i) {
        err = std::max(err, std::abs(supply.values[i] - bump(supply.times[i] - 0.75)));
    }
    CHECK(err < 0.02);
}

TEST_CASE("linear damping on a unit arc converges to F/e at first order") {
    auto error_at = [](double dx) {
        TreeNetwork one({{"v0", NodeKind::source}, {"v1", NodeKind::demand}},
                        {scenarios::arc("1", "v0", "v1", TimeFunction::constant(1), TimeFunction::constant(1),
                                        DampingShape::monomial(1, 1.0))});
        one.require_valid();
        const double F = 0.8;
        const auto sim = simulate_network(one, InflowSeries({0.0, 10.0}, {F, F}), FixedAlpha({}), zeros(one, dx),
                                          0.0, 3.0, dx);
        return std::abs(sim.arcs[0].outflow.back() - F * std::exp(-1.0));
    };
    const double e1 = error_at(1.0 / 100), e2 = error_at(1.0 / 200);
    CHECK(e1 < 5e-3);
    CHECK(e1 / e2 > 1.8);
    CHECK(e1 / e2 < 2.2);
}

TEST_CASE("symmetric split of a constant inflow") {
    const auto shape = DampingShape::monomial(2);
    TreeNetwork net({{"v0", NodeKind::source}, {"v1", NodeKind::junction}, {"v2", NodeKind::demand},
                     {"v3", NodeKind::demand}},
                    {scenarios::arc("1", "v0", "v1", TimeFunction::constant(2), TimeFunction::constant(1), shape),
                     scenarios::arc("2", "v1", "v2", TimeFunction::constant(2), TimeFunction::constant(1), shape),
                     scenarios::arc("3", "v1", "v3", TimeFunction::constant(2), TimeFunction::constant(1), shape)});
    net.require_valid();
    const double F = 0.3, dx = 1.0 / 400;
    const auto sim = simulate_network(net, InflowSeries({0.0, 10.0}, {2 * F, 2 * F}), FixedAlpha({0.5, 0.5}),
                                      zeros(net, dx), 0.0, 3.0, dx, {true, 0});
    // density 2F/2 enters arc 1, is damped for 1/2 time unit, halved, damped again
    const auto one = TimeFunction::constant(1);
    const double z1 = forward_damp(shape, one, 0, 0.5, F);
    const double z2 = forward_damp(shape, one, 0, 0.5, z1 / 2);
    for (NodeIndex d : {2, 3}) CHECK(std::abs(sim.supply(net, d).values.back() - 2 * z2) < 2e-3);

    // conservation at every coupling instant
    const auto& parent = sim.arcs[0];
    for (std::size_t j = 0; j < sim.arcs[1].inflow.size(); j += 17) {
        const double t = sim.arcs[1].grid.times[j];
        CHECK(std::abs(sim.arcs[1].inflow[j] + sim.arcs[2].inflow[j] - interpolate(parent.grid.times, parent.outflow, t)) <
              1e-12);
    }
    CHECK(sim.alphas.size() == sim.arcs[1].inflow.size() + sim.arcs[2].inflow.size());
}

TEST_CASE("interpolation and inflow series") {
    const std::vector<double> t{0, 1, 3}, v{0, 2, 6};
    CHECK(interpolate(t, v, 0.5) == doctest::Approx(1.0));
    CHECK(interpolate(t, v, 2.0) == doctest::Approx(4.0));
    CHECK(interpolate(t, v, 3.0) == doctest::Approx(6.0));
    CHECK_THROWS_AS(interpolate(t, v, 3.5), NumericsError);
    const InflowSeries s(t, v);
    CHECK(s.at(1, 1.0) == 2.0);
    CHECK(s.at(7, 2.0) == doctest::Approx(4.0));
}

TEST_CASE("field dump and wrong shapes") {
    const auto net = scenarios::one_one(TimeFunction::constant(1), TimeFunction::constant(1),
                                        TimeFunction::constant(0), DampingShape::none());
    const auto sim = simulate_network(net, InflowSeries({0.0, 5.0}, {1.0, 1.0}), FixedAlpha({1.0}), zeros(net, 0.1),
                                      0.0, 1.0, 0.1, {false, 5});
    CHECK(sim.arcs[0].field.size() == 3);
    CHECK(sim.arcs[0].field_steps == std::vector<std::size_t>{0, 5, 10});
    CHECK(sim.alphas.empty());
    CHECK_THROWS_AS(simulate_network(net, InflowSeries({0.0, 5.0}, {1.0, 1.0}), FixedAlpha({0.5, 0.5}),
                                     zeros(net, 0.1), 0.0, 1.0, 0.1),
                    NumericsError);
    CHECK_THROWS_AS(simulate_network(net, InflowSeries({0.0, 5.0}, {1.0, 1.0}), FixedAlpha({1.0}), zeros(net, 0.2),
                                     0.0, 1.0, 0.1),
                    NumericsError);
}
