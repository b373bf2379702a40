// Command-line experiment runner: one subcommand per experiment, flags
// overriding config-file keys, RLAB_OUT as the default output directory.
#include <CLI11.hpp>

#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rlab/experiments.hpp"

namespace {

struct FlagSpec {
    const char* flag;
    const char* key;
    const char* help;
};

const std::vector<FlagSpec> kCommonFlags = {
    {"--N", "N", "points per axis"},
    {"--dim", "dim", "spatial dimension"},
    {"--L", "L", "physical half extent"},
    {"--seed", "seed", "seed for pseudo-random fields"},
    {"--tolerance", "tolerance", "pass tolerance of the experiment"},
    {"--stability", "stability", "dilation-stability tolerance"},
    {"--level-points", "level_points", "points of the level grids"},
    {"--width", "width", "family width"},
};

const std::map<std::string, std::vector<FlagSpec>> kExtraFlags = {
    {"polar-identity",
     {{"--inner", "inner", "ring inner radius"}, {"--outer", "outer", "ring outer radius"}}},
    {"sphere-scaling", {{"--radii", "radii", "sphere radii (comma list)"}}},
    {"cone-chain", {{"--widths", "widths", "family widths (comma list)"}}},
    {"slope-sweep",
     {{"--slopes", "slopes", "cone slopes (comma list)"},
      {"--modulation", "modulation", "packet modulation on the unit cone"}}},
    {"m-chain", {{"--widths", "widths", "family widths (comma list)"}}},
    {"mf-chain",
     {{"--widths", "widths", "family widths (comma list)"},
      {"--f-values", "f_values", "Froude numbers (comma list)"},
      {"--w4", "w4", "x4 width of the trend packet"}}},
    {"product-chain",
     {{"--widths", "widths", "family widths (comma list)"},
      {"--radius-a", "radius_a", "first circle radius"},
      {"--radius-b", "radius_b", "second circle radius"}}},
    {"embedding-check",
     {{"--p", "p", "Lebesgue exponent (rational, e.g. 6/5)"},
      {"--s", "s", "Sobolev order (rational, e.g. -1/3)"},
      {"--center", "center", "profile center"},
      {"--modulation", "modulation", "profile modulation"}}},
    {"strichartz",
     {{"--equation", "equation", "rotating or wave"},
      {"--lambdas", "lambdas", "dilation factors (comma list)"},
      {"--window", "window", "time window"},
      {"--steps", "steps", "snapshot count"},
      {"--q", "q", "time exponent (rotating interpolation range)"}}},
    {"anisotropic",
     {{"--lambdas", "lambdas", "dilation factors (comma list)"},
      {"--window", "window", "time window"},
      {"--steps", "steps", "snapshot count"}}},
    {"counterexample-hyperplane",
     {{"--truncations", "truncations", "truncations (comma list)"}}},
    {"counterexample-flatness",
     {{"--scales", "scales", "R values (comma list)"},
      {"--p", "p", "data exponent"},
      {"--q", "q", "trace exponent"}}},
    {"knapp-sweep",
     {{"--deltas", "deltas", "cap widths, decreasing (comma list)"},
      {"--p-values", "p_values", "Lebesgue exponents (comma list)"},
      {"--radius", "radius", "circle radius"},
      {"--endpoint-band", "endpoint_band", "allowed endpoint slope band"}}},
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for restriction estimates and dispersive propagators"};
    app.require_subcommand(1);

    struct SubState {
        std::string config_path;
        std::string out;
        std::map<std::string, std::string> overrides;
    };
    std::map<std::string, std::shared_ptr<SubState>> states;

    for (const std::string& name : rlab::ExperimentConfig::known_experiments()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        auto state = std::make_shared<SubState>();
        states[name] = state;
        sub->add_option("--config", state->config_path, "key = value config file");
        sub->add_option("--out", state->out,
                        "output directory (default $RLAB_OUT or ./rlab_out)");
        auto add_flags = [&](const std::vector<FlagSpec>& flags) {
            for (const FlagSpec& f : flags)
                sub->add_option_function<std::string>(
                    f.flag,
                    [state, key = std::string(f.key)](const std::string& v) {
                        state->overrides[key] = v;
                    },
                    f.help);
        };
        add_flags(kCommonFlags);
        if (auto it = kExtraFlags.find(name); it != kExtraFlags.end()) add_flags(it->second);
    }

    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    const SubState& state = *states[name];

    rlab::ExperimentConfig cfg;
    cfg.experiment = name;
    try {
        if (!state.config_path.empty()) {
            cfg = rlab::load_config(state.config_path);
            if (cfg.experiment.empty()) cfg.experiment = name;
            if (cfg.experiment != name) {
                std::fprintf(stderr, "validation: config experiment '%s' does not match '%s'\n",
                             cfg.experiment.c_str(), name.c_str());
                return 2;
            }
        }
        for (const auto& [k, v] : state.overrides) cfg.kv[k] = v;
        if (!state.out.empty()) cfg.kv["out"] = state.out;
    } catch (const rlab::ValidationError& e) {
        std::fprintf(stderr, "validation: %s\n", e.what());
        return 2;
    }

    std::string error;
    const int code = rlab::run(cfg, &error);
    if (code == 0) {
        std::printf("%s: ok\n", name.c_str());
    } else {
        const char* kind = code == 2 ? "validation" : code == 3 ? "chain step" : "tail budget";
        std::fprintf(stderr, "%s: %s failure: %s\n", name.c_str(), kind, error.c_str());
    }
    return code;
}
