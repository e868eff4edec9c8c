#include "tnp/run_config.hpp"

#include "tnp/rng.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tnp::io {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
    throw std::invalid_argument("key '" + key + "': " + why);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& context) {
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            throw std::invalid_argument("unknown key '" + context + item.key() + "'");
        }
    }
}

std::vector<std::size_t> size_list(const json& value, const std::string& key) {
    if (!value.is_array() || value.empty()) bad_key(key, "expected a non-empty array");
    std::vector<std::size_t> out;
    for (const auto& v : value) {
        if (!v.is_number_integer() || v.get<long long>() < 1) {
            bad_key(key, "entries must be positive integers");
        }
        out.push_back(v.get<std::size_t>());
    }
    return out;
}

void assign_seeds(std::vector<ExperimentConfig>& configs, std::uint64_t seed) {
    for (std::size_t i = 0; i < configs.size(); ++i) {
        configs[i].base_seed = derive_stream_key(seed, i);
    }
}

NnSettings parse_nn(const json& obj) {
    reject_unknown_keys(obj, {"tcl_ranks", "hidden", "epochs", "batch", "rate"}, "nn.");
    NnSettings nn;
    if (obj.contains("tcl_ranks")) nn.tcl_ranks = size_list(obj["tcl_ranks"], "nn.tcl_ranks");
    if (obj.contains("hidden")) nn.hidden = obj["hidden"].get<std::size_t>();
    if (obj.contains("epochs")) nn.epochs = obj["epochs"].get<std::size_t>();
    if (obj.contains("batch")) nn.batch = obj["batch"].get<std::size_t>();
    if (obj.contains("rate")) nn.rate = obj["rate"].get<double>();
    return nn;
}

}  // namespace

SimulationPlan plan_for_example(const std::string& name, const std::string& scale,
                                std::uint64_t seed) {
    SimulationPlan plan;
    plan.seed = seed;
    plan.configs = example_configs(name, scale);
    assign_seeds(plan.configs, seed);
    for (const auto& cfg : plan.configs) cfg.validate();
    return plan;
}

SimulationPlan parse_simulation_config(const std::string& json_text,
                                       const std::optional<std::string>& scale_override,
                                       const std::optional<std::uint64_t>& seed_override) {
    json obj;
    try {
        obj = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw std::invalid_argument("config must be a JSON object");

    if (obj.contains("experiment")) {
        reject_unknown_keys(obj, {"experiment", "scale", "seed"}, "");
        const std::string name = obj["experiment"].get<std::string>();
        const std::string scale =
            scale_override.value_or(obj.value("scale", std::string("desk")));
        const std::uint64_t seed =
            seed_override.value_or(obj.value("seed", std::uint64_t{0}));
        return plan_for_example(name, scale, seed);
    }

    reject_unknown_keys(obj,
                        {"shape", "ranks", "snr", "alpha", "delta", "n_train", "eta", "n_test",
                         "reps", "seed", "methods", "distribution", "nn"},
                        "");
    for (const char* required : {"shape", "ranks", "n_train"}) {
        if (!obj.contains(required)) {
            throw std::invalid_argument("missing required key '" + std::string(required) + "'");
        }
    }

    ExperimentConfig cfg;
    cfg.id = "custom";
    cfg.shape = Shape(size_list(obj["shape"], "shape"));
    cfg.true_ranks = size_list(obj["ranks"], "ranks");
    cfg.working_ranks = cfg.true_ranks;
    if (obj.contains("snr")) cfg.snr = obj["snr"].get<double>();
    double alpha = 0.05, delta = 0.1;
    if (obj.contains("alpha")) alpha = obj["alpha"].get<double>();
    if (obj.contains("delta")) delta = obj["delta"].get<double>();
    try {
        cfg.levels = NpLevels(alpha, delta);
    } catch (const std::invalid_argument& e) {
        bad_key("alpha/delta", e.what());
    }
    cfg.n_train_total = obj["n_train"].get<std::size_t>();
    if (obj.contains("eta")) cfg.eta = obj["eta"].get<double>();
    cfg.n_test_total = obj.contains("n_test") ? obj["n_test"].get<std::size_t>() : 6000;
    cfg.reps = obj.contains("reps") ? obj["reps"].get<std::size_t>() : 50;

    if (obj.contains("methods")) {
        if (!obj["methods"].is_array() || obj["methods"].empty()) {
            bad_key("methods", "expected a non-empty array of method names");
        }
        for (const auto& m : obj["methods"]) {
            try {
                cfg.methods.push_back(method_from_name(m.get<std::string>()));
            } catch (const std::invalid_argument& e) {
                bad_key("methods", e.what());
            }
        }
    } else {
        cfg.methods = all_methods();
    }

    if (obj.contains("distribution")) {
        const std::string dist = obj["distribution"].get<std::string>();
        if (dist == "normal") {
            cfg.distribution = Distribution::Normal;
        } else if (dist.size() > 1 && dist[0] == 't') {
            cfg.distribution = Distribution::StudentT;
            try {
                cfg.t_dof = std::stoi(dist.substr(1));
            } catch (const std::exception&) {
                bad_key("distribution", "expected \"normal\" or \"t<dof>\" such as \"t4\"");
            }
        } else {
            bad_key("distribution", "expected \"normal\" or \"t<dof>\" such as \"t4\"");
        }
    }

    if (obj.contains("nn")) cfg.nn = parse_nn(obj["nn"]);

    SimulationPlan plan;
    plan.seed = seed_override.value_or(obj.contains("seed") ? obj["seed"].get<std::uint64_t>()
                                                            : std::uint64_t{0});
    (void)scale_override;  // scale applies to named experiments only
    plan.configs.push_back(std::move(cfg));
    assign_seeds(plan.configs, plan.seed);
    plan.configs.front().validate();
    return plan;
}

SimulationPlan load_simulation_config(const std::string& path,
                                      const std::optional<std::string>& scale_override,
                                      const std::optional<std::uint64_t>& seed_override) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_simulation_config(text.str(), scale_override, seed_override);
}

}  // namespace tnp::io
