#include <doctest.h>

#include <cmath>

#include "dampnet/errors.hpp"
#include "dampnet/experiment.hpp"
#include "scenarios.hpp"

using namespace dampnet;

namespace {

bool same(const SeriesStats& a, const SeriesStats& b) {
    return a.times == b.times && a.mean == b.mean && a.std_error == b.std_error;
}

}  // namespace

TEST_CASE("objective estimate") {
    DemandPath d{0.0, 0.01, std::vector<double>(101, 0.5)};
    std::vector<double> t, v;
    for (int i = 0; i <= 50; ++i) {
        t.push_back(0.02 * i);
        v.push_back(0.5);
    }
    CHECK(objective_estimate(d, {t, v}).total == 0.0);
    for (auto& x : v) x += 0.1;
    const auto o = objective_estimate(d, {t, v}, std::vector<double>{0.0, 0.25, 0.5});
    CHECK(o.total == doctest::Approx(0.01 * 1.0).epsilon(1e-12));
    CHECK(o.per_window[0] == doctest::Approx(0.0025).epsilon(1e-12));
    CHECK(o.per_window[1] == doctest::Approx(0.0025).epsilon(1e-12));
    CHECK(o.per_window[2] == doctest::Approx(0.005).epsilon(1e-12));
    t.pop_back();
    v.pop_back();
    CHECK_THROWS_AS(objective_estimate(d, {t, v}), DomainError);
}

TEST_CASE("series accumulator merges like a single pass") {
    SeriesAccumulator all, left, right;
    for (int i = 0; i < 10; ++i) {
        const std::vector<std::vector<double>> s{{1.0 * i, 2.0 * i * i}, {0.5}};
        all.add(s);
        (i < 4 ? left : right).add(s);
    }
    left.merge(right);
    CHECK(left.count() == 10);
    for (std::size_t s = 0; s < 2; ++s) {
        for (std::size_t i = 0; i < all.mean(s).size(); ++i) {
            CHECK(left.mean(s)[i] == doctest::Approx(all.mean(s)[i]).epsilon(1e-14));
            CHECK(left.std_error(s)[i] == doctest::Approx(all.std_error(s)[i]).epsilon(1e-12));
        }
    }
    CHECK(all.mean(0)[0] == doctest::Approx(4.5));
    CHECK(all.std_error(1)[0] == 0.0);
}

TEST_CASE("config checks") {
    auto cfg = scenarios::paper_config();
    CHECK_NOTHROW(check_config(cfg));
    auto off_grid = cfg;
    off_grid.update_times = {0.0, 0.3575};
    CHECK_THROWS_AS(check_config(off_grid), SchemaError);
    auto late = cfg;
    late.update_times = {0.1};
    CHECK_THROWS_AS(check_config(late), SchemaError);
    auto dx = cfg;
    dx.pde_dx = 0.3;
    CHECK_THROWS_AS(check_config(dx), SchemaError);
    auto runs = cfg;
    runs.monte_carlo_runs = 0;
    CHECK_THROWS_AS(check_config(runs), SchemaError);
    auto dup = cfg;
    dup.variants.push_back(dup.variants.front());
    CHECK_THROWS_AS(check_config(dup), SchemaError);
    auto net = cfg;
    net.network.add_node({"v9", NodeKind::source});
    CHECK_THROWS_AS(check_config(net), ValidationError);
}

TEST_CASE("single runs are deterministic and damping orders the inflow") {
    const Experiment exp(scenarios::paper_config());
    CHECK(exp.variant_labels() == std::vector<std::string>{"none", "n1", "n2", "n3", "n4"});
    const auto a = exp.run_single(0);
    const auto b = exp.run_single(0);
    REQUIRE(a.variants.size() == 5);
    for (std::size_t v = 0; v < 5; ++v) {
        CHECK(a.variants[v].inflow.values == b.variants[v].inflow.values);
        CHECK(a.variants[v].supply[0].values == b.variants[v].supply[0].values);
        CHECK(a.variants[v].objective[1].total == b.variants[v].objective[1].total);
    }
    const auto& none = a.variants[0].inflow.values;
    for (std::size_t v = 1; v < 5; ++v) {
        for (std::size_t i = 0; i < none.size(); ++i) CHECK(none[i] <= a.variants[v].inflow.values[i]);
    }
    CHECK(a.demands[0].values != exp.simulate_demands(1)[0].values);
    CHECK(a.policy.update_times.size() == 7);
    for (const auto& v : a.variants) {
        for (const auto& o : v.objective) {
            CHECK(o.total >= 0.0);
            CHECK(o.per_window.size() == 7);
        }
    }
}

TEST_CASE("deterministic demands are tracked") {
    const Experiment exp(scenarios::paper_config(0.0));
    const auto r = exp.run_single(3);
    for (std::size_t k = 0; k < 2; ++k) {
        const auto& spec = exp.demands()[k];
        for (std::size_t i = 0; i < r.demands[k].size(); i += 100) {
            CHECK(std::abs(r.demands[k].values[i] - conditional_mean(spec, 0, spec.d0, r.demands[k].time(i))) < 5e-3);
        }
        for (const auto& v : r.variants) CHECK(v.objective[k].total < 0.02 * 0.02 * 2.5);
    }
}

TEST_CASE("Monte Carlo") {
    auto cfg = scenarios::paper_config();
    cfg.variants = {{"n1", DampingShape::monomial(1)}};
    cfg.workers = 1;
    const Experiment one(cfg);
    const auto e1 = one.run_monte_carlo(40);
    cfg.workers = 3;
    const Experiment three(cfg);
    const auto e3 = three.run_monte_carlo(40);
    CHECK(e1.runs == 40);
    CHECK(same(e1.demand[0], e3.demand[0]));
    CHECK(same(e1.variants[0].inflow, e3.variants[0].inflow));
    CHECK(same(e1.variants[0].supply[1], e3.variants[0].supply[1]));
    CHECK(e1.variants[0].objective_mean == e3.variants[0].objective_mean);
    CHECK(e1.variants[0].max_jump_mean_inflow < e1.variants[0].max_jump_single_inflow);

    const auto single = one.run_single(0);
    const auto e = one.run_monte_carlo(1);
    CHECK(e.demand[0].mean == single.demands[0].values);
    for (double se : e.variants[0].inflow.std_error) CHECK(se == 0.0);

    auto det = scenarios::paper_config(0.0);
    det.variants = {{"n2", DampingShape::monomial(2)}};
    const auto ed = Experiment(det).run_monte_carlo(3);
    for (double se : ed.demand[1].std_error) CHECK(se == 0.0);
    for (double se : ed.variants[0].supply[0].std_error) CHECK(se == 0.0);

    RunOptions only;
    only.only_variants = {"nope"};
    CHECK_THROWS_AS(one.run_single(0, only), SchemaError);
}

TEST_CASE("infeasible runs name the run and the variant") {
    auto cfg = scenarios::paper_config();
    cfg.variants = {{"n4", DampingShape::monomial(4)}};
    const Experiment exp(cfg);
    bool seen = false;
    for (std::size_t run = 0; run < 40 && !seen; ++run) {
        try {
            exp.run_single(run);
        } catch (const InfeasibleError& e) {
            seen = true;
            CHECK(std::string(e.what()).find("n4") != std::string::npos);
            CHECK_FALSE(e.arc_id().empty());
        }
    }
    CHECK(seen);
    try {
        exp.run_monte_carlo(40);
        FAIL("expected infeasibility");
    } catch (const InfeasibleError& e) {
        CHECK(std::string(e.what()).find("Monte Carlo run") != std::string::npos);
    }
}

TEST_CASE("zero initial data starts from an empty network") {
    auto cfg = scenarios::paper_config(0.0);
    cfg.variants = {{"none", DampingShape::none()}};
    cfg.initial_data = InitialDataMode::zero;
    const auto r = Experiment(cfg).run_single(0);
    CHECK(r.variants[0].supply[0].values.front() == 0.0);
    cfg.initial_data = InitialDataMode::warm;
    const auto w = Experiment(cfg).run_single(0);
    CHECK(w.variants[0].supply[0].values.front() == doctest::Approx(0.4).epsilon(1e-3));
}
