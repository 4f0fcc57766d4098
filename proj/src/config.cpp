#include "dampnet/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "dampnet/errors.hpp"

namespace dampnet {

namespace {

[[noreturn]] void schema_fail(const std::string& where, const std::string& what) {
    throw SchemaError(where + ": " + what);
}

void require_object(const Json& j, const std::string& where) {
    if (!j.is_object()) schema_fail(where, "expected an object");
}

void reject_unknown(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) schema_fail(where, "unknown key '" + key + "'");
    }
}

const Json& field(const Json& j, const std::string& where, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) schema_fail(where, std::string("missing key '") + key + "'");
    return *it;
}

double number(const Json& j, const std::string& where) {
    if (!j.is_number()) schema_fail(where, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) schema_fail(where, "expected a finite number");
    return v;
}

double number_or(const Json& j, const std::string& where, const char* key, double fallback) {
    const auto it = j.find(key);
    return it == j.end() ? fallback : number(*it, where + "." + key);
}

std::string string_field(const Json& j, const std::string& where, const char* key) {
    const auto& v = field(j, where, key);
    if (!v.is_string()) schema_fail(where + "." + key, "expected a string");
    return v.get<std::string>();
}

std::uint64_t unsigned_field(const Json& j, const std::string& where) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0)) {
        schema_fail(where, "expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

NodeKind node_kind(const std::string& s, const std::string& where) {
    if (s == "source") return NodeKind::source;
    if (s == "junction") return NodeKind::junction;
    if (s == "demand") return NodeKind::demand;
    schema_fail(where, "node kind must be source, junction or demand, got '" + s + "'");
}

}  // namespace

TimeFunction time_function_from_json(const Json& j, const std::string& where) {
    if (j.is_number()) return TimeFunction(number(j, where));
    require_object(j, where);
    reject_unknown(j, where, {"constant", "terms", "steps"});
    const double constant = number_or(j, where, "constant", 0.0);
    std::vector<SineTerm> terms;
    if (const auto it = j.find("terms"); it != j.end()) {
        if (!it->is_array()) schema_fail(where + ".terms", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto& t = (*it)[i];
            const std::string w = where + ".terms[" + std::to_string(i) + "]";
            require_object(t, w);
            reject_unknown(t, w, {"amplitude", "angular_factor", "phase"});
            terms.push_back({number(field(t, w, "amplitude"), w + ".amplitude"),
                             number(field(t, w, "angular_factor"), w + ".angular_factor"),
                             number_or(t, w, "phase", 0.0)});
        }
    }
    std::vector<StepTerm> steps;
    if (const auto it = j.find("steps"); it != j.end()) {
        if (!it->is_array()) schema_fail(where + ".steps", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto& s = (*it)[i];
            const std::string w = where + ".steps[" + std::to_string(i) + "]";
            require_object(s, w);
            reject_unknown(s, w, {"at", "delta"});
            steps.push_back({number(field(s, w, "at"), w + ".at"), number(field(s, w, "delta"), w + ".delta")});
        }
    }
    return TimeFunction(constant, std::move(terms), std::move(steps));
}

Json to_json(const TimeFunction& f) {
    Json j = Json::object();
    j["constant"] = f.constant_part();
    Json terms = Json::array();
    for (const auto& t : f.terms()) {
        terms.push_back({{"amplitude", t.amplitude}, {"angular_factor", t.angular_factor}, {"phase", t.phase}});
    }
    j["terms"] = terms;
    if (!f.steps().empty()) {
        Json steps = Json::array();
        for (const auto& s : f.steps()) steps.push_back({{"at", s.at}, {"delta", s.delta}});
        j["steps"] = steps;
    }
    return j;
}

DampingShape damping_from_json(const Json& j, const std::string& where) {
    require_object(j, where);
    const std::string kind = string_field(j, where, "kind");
    if (kind == "none") {
        reject_unknown(j, where, {"kind"});
        return DampingShape::none();
    }
    if (kind != "monomial") schema_fail(where, "damping kind must be 'none' or 'monomial', got '" + kind + "'");
    reject_unknown(j, where, {"kind", "degree", "coefficient"});
    const auto& deg = field(j, where, "degree");
    if (!deg.is_number_integer()) schema_fail(where + ".degree", "expected an integer");
    const int degree = deg.get<int>();
    if (degree < 1) schema_fail(where + ".degree", "must be >= 1");
    double coefficient;
    if (const auto it = j.find("coefficient"); it != j.end()) {
        coefficient = number(*it, where + ".coefficient");
    } else if (const auto c = DampingShape::default_coefficient(degree)) {
        coefficient = *c;
    } else {
        schema_fail(where, "coefficient is required for degree " + std::to_string(degree));
    }
    if (!(coefficient > 0.0)) schema_fail(where + ".coefficient", "must be > 0");
    return DampingShape::monomial(degree, coefficient);
}

Json to_json(const DampingShape& shape) {
    if (shape.is_none()) return {{"kind", "none"}};
    return {{"kind", "monomial"}, {"degree", shape.degree()}, {"coefficient", shape.coefficient()}};
}

ScenarioConfig config_from_json(const Json& j) {
    const std::string root = "scenario";
    require_object(j, root);
    reject_unknown(j, root, {"network", "demands", "numerics", "experiment"});
    ScenarioConfig cfg;

    // network
    {
        const std::string w = "network";
        const auto& net = field(j, root, "network");
        require_object(net, w);
        reject_unknown(net, w, {"nodes", "arcs"});
        const auto& nodes = field(net, w, "nodes");
        if (!nodes.is_array()) schema_fail(w + ".nodes", "expected an array");
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const std::string nw = w + ".nodes[" + std::to_string(i) + "]";
            require_object(nodes[i], nw);
            reject_unknown(nodes[i], nw, {"id", "kind"});
            cfg.network.add_node({string_field(nodes[i], nw, "id"), node_kind(string_field(nodes[i], nw, "kind"), nw)});
        }
        const auto& arcs = field(net, w, "arcs");
        if (!arcs.is_array()) schema_fail(w + ".arcs", "expected an array");
        for (std::size_t i = 0; i < arcs.size(); ++i) {
            const auto& a = arcs[i];
            const std::string aw = w + ".arcs[" + std::to_string(i) + "]";
            require_object(a, aw);
            reject_unknown(a, aw, {"id", "tail", "head", "length", "velocity", "damping_factor", "damping"});
            ArcSpec arc;
            arc.id = string_field(a, aw, "id");
            arc.tail = string_field(a, aw, "tail");
            arc.head = string_field(a, aw, "head");
            arc.length = number_or(a, aw, "length", 1.0);
            arc.velocity = time_function_from_json(field(a, aw, "velocity"), aw + ".velocity");
            if (const auto it = a.find("damping_factor"); it != a.end()) {
                arc.damping_factor = time_function_from_json(*it, aw + ".damping_factor");
            }
            if (const auto it = a.find("damping"); it != a.end()) arc.damping = damping_from_json(*it, aw + ".damping");
            cfg.network.add_arc(std::move(arc));
        }
    }

    // demands
    {
        const auto& demands = field(j, root, "demands");
        if (!demands.is_array()) schema_fail("demands", "expected an array");
        for (std::size_t i = 0; i < demands.size(); ++i) {
            const auto& d = demands[i];
            const std::string w = "demands[" + std::to_string(i) + "]";
            require_object(d, w);
            reject_unknown(d, w, {"node", "kappa", "theta", "sigma", "d0"});
            JacobiDemandSpec spec;
            spec.node_id = string_field(d, w, "node");
            spec.kappa = number(field(d, w, "kappa"), w + ".kappa");
            spec.theta = time_function_from_json(field(d, w, "theta"), w + ".theta");
            spec.sigma = number(field(d, w, "sigma"), w + ".sigma");
            spec.d0 = number(field(d, w, "d0"), w + ".d0");
            cfg.demands.push_back(std::move(spec));
        }
    }

    // numerics
    {
        const std::string w = "numerics";
        const auto& n = field(j, root, "numerics");
        require_object(n, w);
        reject_unknown(n, w, {"t0", "T", "sde_dt", "pde_dx", "initial_data"});
        cfg.t0 = number_or(n, w, "t0", 0.0);
        cfg.T = number(field(n, w, "T"), w + ".T");
        cfg.sde_dt = number(field(n, w, "sde_dt"), w + ".sde_dt");
        cfg.pde_dx = number(field(n, w, "pde_dx"), w + ".pde_dx");
        if (const auto it = n.find("initial_data"); it != n.end()) {
            if (!it->is_string()) schema_fail(w + ".initial_data", "expected a string");
            const auto mode = it->get<std::string>();
            if (mode == "warm") {
                cfg.initial_data = InitialDataMode::warm;
            } else if (mode == "zero") {
                cfg.initial_data = InitialDataMode::zero;
            } else {
                schema_fail(w + ".initial_data", "must be 'warm' or 'zero'");
            }
        }
    }

    // experiment
    {
        const std::string w = "experiment";
        Json e = Json::object();
        if (const auto it = j.find("experiment"); it != j.end()) e = *it;
        require_object(e, w);
        reject_unknown(e, w,
                       {"update_times", "equidistant_updates", "monte_carlo_runs", "master_seed", "workers",
                        "damping_variants"});
        const bool has_times = e.contains("update_times");
        const bool has_count = e.contains("equidistant_updates");
        if (has_times && has_count) schema_fail(w, "give either update_times or equidistant_updates, not both");
        if (has_times) {
            const auto& ut = e["update_times"];
            if (!ut.is_array()) schema_fail(w + ".update_times", "expected an array");
            cfg.update_times.clear();
            for (std::size_t i = 0; i < ut.size(); ++i) {
                cfg.update_times.push_back(number(ut[i], w + ".update_times[" + std::to_string(i) + "]"));
            }
        } else if (has_count) {
            const auto count = unsigned_field(e["equidistant_updates"], w + ".equidistant_updates");
            if (count < 1) schema_fail(w + ".equidistant_updates", "must be >= 1");
            if (!(cfg.sde_dt > 0.0) || !(cfg.T > cfg.t0)) schema_fail(w, "equidistant_updates needs a valid horizon");
            // Spacing (T − t0)/count, each time snapped to the SDE grid.
            cfg.update_times.clear();
            for (std::uint64_t k = 0; k < count; ++k) {
                const double raw = cfg.t0 + (cfg.T - cfg.t0) * static_cast<double>(k) / static_cast<double>(count);
                const double steps = std::round((raw - cfg.t0) / cfg.sde_dt);
                cfg.update_times.push_back(cfg.t0 + steps * cfg.sde_dt);
            }
        } else {
            cfg.update_times = {cfg.t0};
        }
        if (const auto it = e.find("monte_carlo_runs"); it != e.end()) {
            cfg.monte_carlo_runs = unsigned_field(*it, w + ".monte_carlo_runs");
        }
        if (const auto it = e.find("master_seed"); it != e.end()) cfg.master_seed = unsigned_field(*it, w + ".master_seed");
        if (const auto it = e.find("workers"); it != e.end()) {
            cfg.workers = static_cast<unsigned>(unsigned_field(*it, w + ".workers"));
        }
        if (const auto it = e.find("damping_variants"); it != e.end()) {
            if (it->is_string()) {
                if (it->get<std::string>() != "reference") schema_fail(w + ".damping_variants", "only 'reference' is a valid preset");
                cfg.variants = reference_damping_variants();
            } else {
                if (!it->is_array()) schema_fail(w + ".damping_variants", "expected an array or \"reference\"");
                for (std::size_t i = 0; i < it->size(); ++i) {
                    const auto& v = (*it)[i];
                    const std::string vw = w + ".damping_variants[" + std::to_string(i) + "]";
                    require_object(v, vw);
                    reject_unknown(v, vw, {"label", "damping"});
                    cfg.variants.push_back({string_field(v, vw, "label"), damping_from_json(field(v, vw, "damping"), vw + ".damping")});
                }
            }
        }
    }
    return cfg;
}

Json to_json(const ScenarioConfig& cfg) {
    Json nodes = Json::array();
    for (const auto& n : cfg.network.nodes()) nodes.push_back({{"id", n.id}, {"kind", to_string(n.kind)}});
    Json arcs = Json::array();
    for (const auto& a : cfg.network.arcs()) {
        arcs.push_back({{"id", a.id},
                        {"tail", a.tail},
                        {"head", a.head},
                        {"length", a.length},
                        {"velocity", to_json(a.velocity)},
                        {"damping_factor", to_json(a.damping_factor)},
                        {"damping", to_json(a.damping)}});
    }
    Json demands = Json::array();
    for (const auto& d : cfg.demands) {
        demands.push_back({{"node", d.node_id}, {"kappa", d.kappa}, {"theta", to_json(d.theta)}, {"sigma", d.sigma}, {"d0", d.d0}});
    }
    Json variants = Json::array();
    for (const auto& v : cfg.variants) variants.push_back({{"label", v.label}, {"damping", to_json(v.shape)}});

    Json experiment = {{"update_times", cfg.update_times},
                       {"monte_carlo_runs", cfg.monte_carlo_runs},
                       {"master_seed", cfg.master_seed},
                       {"workers", cfg.workers}};
    if (!cfg.variants.empty()) experiment["damping_variants"] = variants;

    return {{"network", {{"nodes", nodes}, {"arcs", arcs}}},
            {"demands", demands},
            {"numerics",
             {{"t0", cfg.t0},
              {"T", cfg.T},
              {"sde_dt", cfg.sde_dt},
              {"pde_dx", cfg.pde_dx},
              {"initial_data", cfg.initial_data == InitialDataMode::warm ? "warm" : "zero"}}},
            {"experiment", experiment}};
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read scenario file '" + path.string() + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw SchemaError("scenario file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    try {
        return config_from_json(j);
    } catch (const Json::exception& e) {
        throw SchemaError("scenario file '" + path.string() + "': " + e.what());
    }
}

std::uint64_t config_hash(const ScenarioConfig& config) {
    const std::string text = to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace dampnet
