// bapal: batch front-end. JSON on stdout, diagnostics on stderr.
//
// exit codes: 0 ok / sat / true, 1 unsat / false, 2 resource_exhausted,
//             64 usage, 65 parse or format error

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bapal/bisim.hpp"
#include "bapal/check.hpp"
#include "bapal/closure.hpp"
#include "bapal/decide.hpp"
#include "bapal/fmp.hpp"
#include "bapal/formula.hpp"
#include "bapal/model.hpp"
#include "bapal/normalform.hpp"
#include "bapal/random.hpp"

using nlohmann::json;
using namespace bapal;

namespace {

constexpr int kOk = 0, kNo = 1, kExhausted = 2, kUsage = 64, kFormat = 65;

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string engine = "pruned";
    std::optional<std::uint64_t> hue_budget;
    double timeout = 60;
    std::size_t max_states = std::size_t{1} << 16;
    std::uint64_t seed = 0;
    std::string format = "json";
    std::vector<std::string> overrides;  // keys set by file or flag, in order

    json to_json() const {
        json j;
        j["engine"] = engine;
        j["hue_budget"] = hue_budget ? json(*hue_budget) : json(nullptr);
        j["timeout"] = timeout;
        j["max_states"] = max_states;
        j["seed"] = seed;
        j["format"] = format;
        j["overrides"] = overrides;
        return j;
    }
    void mark(const std::string& k) {
        if (std::find(overrides.begin(), overrides.end(), k) == overrides.end()) overrides.push_back(k);
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json read_json(const std::string& path) {
    try {
        return json::parse(slurp(path));
    } catch (const json::parse_error& e) {
        throw FormatError(path + ": " + e.what());
    }
}

void load_config(Config& c, const std::string& path) {
    json j = read_json(path);
    if (!j.is_object()) throw FormatError(path + ": config must be an object");
    try {
        for (const auto& [k, v] : j.items()) {
            if (k == "engine") c.engine = v.get<std::string>();
            else if (k == "hue_budget") c.hue_budget = v.is_null() ? std::nullopt : std::optional(v.get<std::uint64_t>());
            else if (k == "timeout") c.timeout = v.get<double>();
            else if (k == "max_states") c.max_states = v.get<std::size_t>();
            else if (k == "seed") c.seed = v.get<std::uint64_t>();
            else if (k == "format") c.format = v.get<std::string>();
            else throw FormatError(path + ": unknown config key '" + k + "'");
            c.mark(k);
        }
    } catch (const json::type_error& e) {
        throw FormatError(path + ": " + e.what());
    }
}

Formula read_formula(const std::string& text, const std::string& file) {
    std::string src = text;
    if (!file.empty()) src = slurp(file);
    if (src.empty()) throw CLI::ValidationError("--formula", "a formula is required (--formula or --formula-file)");
    return parse(src);
}

// Accepts a bare model or any output of this tool carrying one under "model".
Model read_model(const std::string& path) {
    json j = read_json(path);
    if (j.is_object() && j.contains("model") && !j.contains("worlds")) return model_from_json(j["model"]);
    return model_from_json(j);
}

// Text rendering: one line per top-level key; nested values stay compact JSON.
void emit(const Config& c, json out) {
    out["config"] = c.to_json();
    if (c.format == "text") {
        for (const auto& [k, v] : out.items()) {
            if (k == "config") continue;
            std::cout << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
        }
        return;
    }
    std::cout << out.dump(2) << "\n";
}

std::set<AtomId> atom_set(const std::vector<std::string>& names) {
    std::set<AtomId> out;
    for (const auto& n : names) out.insert(intern(n));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bapal: Boolean arbitrary public announcement logic toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    Config cfg;
    std::string config_path;
    if (const char* env = std::getenv("BAPAL_CONFIG")) config_path = env;

    std::optional<std::string> o_engine, o_format;
    std::optional<double> o_timeout;
    std::optional<std::size_t> o_states;
    std::optional<std::uint64_t> o_seed, o_hue;

    app.add_option("--config", config_path, "JSON config file (default: $BAPAL_CONFIG)");
    app.add_option("--format", o_format, "output format")->check(CLI::IsMember({"text", "json"}));
    app.add_option("--timeout", o_timeout, "wall-clock budget in seconds");
    app.add_option("--max-states", o_states, "cap on colours enumerated by the decision procedure");
    app.add_option("--hue-budget", o_hue, "cap on hue generators per restriction");

    std::string formula_text, formula_file, model_path, world;
    auto formula_opts = [&](CLI::App* s) {
        s->add_option("--formula,-f", formula_text, "formula text");
        s->add_option("--formula-file", formula_file, "file holding the formula");
    };

    auto* parse_cmd = app.add_subcommand("parse", "parse a formula and report its metrics");
    formula_opts(parse_cmd);

    auto* nf_cmd = app.add_subcommand("nf", "rewrite to arbitrary announcement normal form");
    formula_opts(nf_cmd);

    auto* check_cmd = app.add_subcommand("check", "model-check a formula at a world");
    formula_opts(check_cmd);
    check_cmd->add_option("--model,-m", model_path, "model JSON")->required();
    check_cmd->add_option("--world,-w", world, "world name (default: designated)");

    auto* ext_cmd = app.add_subcommand("ext", "extension of a formula in a model");
    formula_opts(ext_cmd);
    ext_cmd->add_option("--model,-m", model_path, "model JSON")->required();

    std::string kind = "full", model2_path, world2;
    std::vector<std::string> atoms;
    int depth = 1;
    auto* bisim_cmd = app.add_subcommand("bisim", "bisimilarity of two pointed models");
    bisim_cmd->add_option("--kind", kind, "full|q|n|xann")->check(CLI::IsMember({"full", "q", "n", "xann"}));
    bisim_cmd->add_option("--model,-m", model_path, "first model JSON")->required();
    bisim_cmd->add_option("--world,-w", world, "world of the first model (default: designated)");
    bisim_cmd->add_option("--model2", model2_path, "second model JSON (default: the first)");
    bisim_cmd->add_option("--world2", world2, "world of the second model (default: designated)");
    bisim_cmd->add_option("--atoms", atoms, "Q or X for kinds q and xann")->delimiter(',');
    bisim_cmd->add_option("--depth", depth, "n for kind n")->check(CLI::NonNegativeNumber);

    auto* sat_cmd = app.add_subcommand("sat", "decide satisfiability");
    formula_opts(sat_cmd);
    sat_cmd->add_option("--engine", o_engine, "pruned|faithful")->check(CLI::IsMember({"pruned", "faithful"}));
    sat_cmd->add_option("--timeout", o_timeout, "wall-clock budget in seconds");

    auto* image_cmd = app.add_subcommand("image", "pseudo-model image of a model");
    formula_opts(image_cmd);
    image_cmd->add_option("--model,-m", model_path, "model JSON")->required();

    int copies = 3, act_limit = 12;
    std::string pseudo_path;
    auto* act_cmd = app.add_subcommand("actualise", "truncated actualisation of a pseudo-model");
    act_cmd->add_option("--copies", copies, "copies of each state")->check(CLI::PositiveNumber);
    act_cmd->add_option("--act-limit", act_limit, "largest act atom index")->check(CLI::NonNegativeNumber);
    act_cmd->add_option("--pseudo", pseudo_path, "pseudo-model JSON (default: the five-state example)");

    int max_worlds = 4;
    auto* fmp_cmd = app.add_subcommand("fmp", "search small models for the fmp formula");
    fmp_cmd->add_option("--max-worlds", max_worlds, "largest model size")->check(CLI::PositiveNumber);

    std::string what = "model";
    int gen_worlds = 4, gen_atoms = 2, gen_depth = 3;
    auto* gen_cmd = app.add_subcommand("gen", "seeded random model or formula");
    gen_cmd->add_option("--seed", o_seed, "seed");
    gen_cmd->add_option("--what", what, "model|formula")->check(CLI::IsMember({"model", "formula"}));
    gen_cmd->add_option("--worlds", gen_worlds, "maximum worlds")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--atoms", gen_atoms, "maximum atoms")->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--depth", gen_depth, "formula depth")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (!config_path.empty()) load_config(cfg, config_path);
        if (o_engine) cfg.engine = *o_engine, cfg.mark("engine");
        if (o_format) cfg.format = *o_format, cfg.mark("format");
        if (o_timeout) cfg.timeout = *o_timeout, cfg.mark("timeout");
        if (o_states) cfg.max_states = *o_states, cfg.mark("max_states");
        if (o_seed) cfg.seed = *o_seed, cfg.mark("seed");
        if (o_hue) cfg.hue_budget = *o_hue, cfg.mark("hue_budget");
        if (cfg.engine != "pruned" && cfg.engine != "faithful") throw FormatError("engine must be pruned or faithful");
        if (cfg.format != "text" && cfg.format != "json") throw FormatError("format must be text or json");

        const Deadline deadline(cfg.timeout);
        const std::size_t max_classes = cfg.hue_budget ? static_cast<std::size_t>(*cfg.hue_budget) : 22;

        if (*parse_cmd) {
            Formula f = read_formula(formula_text, formula_file);
            Metrics mt = metrics(f);
            json out{{"formula", to_string(f)}, {"pretty", to_pretty(f)}, {"size", f->size},
                     {"vars", mt.vars}, {"d", mt.d}, {"D", mt.D}, {"aanf", is_aanf(f)}};
            if (is_aanf(f)) {
                ClosureTable ct = closure_formulas(f);
                out["closure"] = {{"size", ct.cl_size()}, {"fresh", fresh_count_expr(ct.cl_size(), ct.D)}};
            }
            emit(cfg, out);
            return kOk;
        }
        if (*nf_cmd) {
            Formula f = read_formula(formula_text, formula_file);
            auto [g, trace] = to_aanf(f);
            emit(cfg, {{"input", to_string(f)}, {"output", to_string(g)}, {"steps", trace.steps.size()}, {"trace", to_json(trace)}});
            return kOk;
        }
        if (*check_cmd) {
            Model m = read_model(model_path);
            Formula f = read_formula(formula_text, formula_file);
            int w = world.empty() ? m.designated.value_or(-1) : m.world_index(world);
            if (w < 0) throw FormatError("no --world given and the model has no designated world");
            Checker chk(m, &deadline, max_classes);
            bool v = chk.holds(w, f);
            emit(cfg, {{"formula", to_string(f)}, {"world", m.worlds[static_cast<std::size_t>(w)]}, {"value", v}});
            return v ? kOk : kNo;
        }
        if (*ext_cmd) {
            Model m = read_model(model_path);
            Formula f = read_formula(formula_text, formula_file);
            Checker chk(m, &deadline, max_classes);
            json ws = json::array();
            for (std::size_t i : chk.extension(f).members()) ws.push_back(m.worlds[i]);
            emit(cfg, {{"formula", to_string(f)}, {"extension", ws}});
            return kOk;
        }
        if (*bisim_cmd) {
            Model m = read_model(model_path);
            Model n = model2_path.empty() ? m : read_model(model2_path);
            auto pick = [](const Model& x, const std::string& name, const char* flag) {
                if (!name.empty()) return x.world_index(name);
                if (!x.designated) throw FormatError(std::string("no ") + flag + " given and the model has no designated world");
                return *x.designated;
            };
            int s = pick(m, world, "--world"), t = pick(n, world2, "--world2");
            if ((kind == "q" || kind == "xann") && bisim_cmd->count("--atoms") == 0)
                throw CLI::ValidationError("--atoms", "kind " + kind + " needs --atoms");
            std::optional<BisimWitness> wit;
            if (kind == "full") wit = bisimilar(m, s, n, t);
            else if (kind == "q") wit = q_bisimilar(atom_set(atoms), m, s, n, t);
            else if (kind == "n") wit = n_bisimulation(depth, m, s, n, t);
            else wit = x_announcement_bisimilar(atom_set(atoms), m, s, n, t);
            json out{{"kind", kind}, {"bisimilar", wit.has_value()}, {"witness", wit ? to_json(*wit, m, n) : json(nullptr)}};
            emit(cfg, out);
            return wit ? kOk : kNo;
        }
        if (*sat_cmd) {
            Formula f = read_formula(formula_text, formula_file);
            Budget b;
            b.seconds = cfg.timeout;
            b.max_states = cfg.max_states;
            if (cfg.hue_budget) b.max_generators = static_cast<std::size_t>(*cfg.hue_budget);
            SatVerdict v = satisfiable(f, cfg.engine == "faithful" ? Engine::Faithful : Engine::Pruned, b);
            emit(cfg, to_json(v, b));
            if (!v.detail.empty()) std::cerr << "bapal: " << v.detail << "\n";
            switch (v.outcome) {
                case Outcome::Sat: return kOk;
                case Outcome::Unsat: return kNo;
                case Outcome::ResourceExhausted: return kExhausted;
            }
            return kExhausted;
        }
        if (*image_cmd) {
            Model m = read_model(model_path);
            Formula f = to_aanf(read_formula(formula_text, formula_file)).first;
            PseudoModel p = phi_image(m, f);
            json clauses = json::array();
            for (const auto& r : validate(p)) {
                json c{{"clause", r.clause}, {"ok", r.ok}};
                if (r.state) c["state"] = p.names[static_cast<std::size_t>(*r.state)];
                if (!r.detail.empty()) c["detail"] = r.detail;
                clauses.push_back(c);
            }
            ConsistencyOptions opt;
            opt.deadline = &deadline;
            if (cfg.hue_budget) opt.max_generators = static_cast<std::size_t>(*cfg.hue_budget);
            Tri t = consistent(p, p.ct->D, opt);
            emit(cfg, {{"pseudo_model", to_json(p)}, {"clauses", clauses}, {"consistent", to_string(t)}, {"n", p.ct->D}});
            return t == Tri::True ? kOk : t == Tri::False ? kNo : kExhausted;
        }
        if (*act_cmd) {
            PseudoModel p = five_state_example();
            if (!pseudo_path.empty()) {
                json j = read_json(pseudo_path);
                // sat and image outputs nest the structure
                if (j.contains("witness") && !j.contains("worlds")) j = j["witness"];
                else if (j.contains("pseudo_model")) j = j["pseudo_model"];
                p = pseudo_model_from_json(j);
            }
            ActualiseOptions opt;
            opt.copies = copies;
            opt.act_limit = act_limit;
            if (cfg.hue_budget) opt.max_hue = static_cast<std::size_t>(*cfg.hue_budget);
            emit(cfg, {{"model", to_json(actualise(p, opt))}});
            return kOk;
        }
        if (*fmp_cmd) {
            FmpReport r = finite_search(max_worlds, &deadline);
            emit(cfg, to_json(r));
            return r.counterexample ? kNo : kOk;
        }
        if (*gen_cmd) {
            if (what == "model") {
                RandomModelSpec spec;
                spec.max_worlds = gen_worlds;
                spec.max_atoms = gen_atoms;
                emit(cfg, {{"seed", cfg.seed}, {"model", to_json(random_model(cfg.seed, spec))}});
            } else {
                Rng rng(cfg.seed);
                FormulaGenSpec spec;
                spec.atoms.clear();
                for (int i = 0; i < std::max(gen_atoms, 1); ++i) spec.atoms.push_back(default_atom_name(i));
                spec.depth = gen_depth;
                emit(cfg, {{"seed", cfg.seed}, {"formula", to_string(random_formula(rng, spec))}});
            }
            return kOk;
        }
    } catch (const ResourceExhausted& e) {
        emit(cfg, {{"outcome", "resource_exhausted"}, {"dimension", e.dimension()}, {"detail", e.what()}});
        std::cerr << "bapal: " << e.what() << "\n";
        return kExhausted;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "bapal: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "bapal: " << e.what() << "\n";
        return kFormat;
    } catch (const ModelError& e) {
        std::cerr << "bapal: " << e.what() << "\n";
        return kFormat;
    } catch (const FormatError& e) {
        std::cerr << "bapal: " << e.what() << "\n";
        return kFormat;
    } catch (const NotAanf& e) {
        std::cerr << "bapal: " << e.what() << "\n";
        return kFormat;
    } catch (const std::exception& e) {
        std::cerr << "bapal: internal error: " << e.what() << "\n";
        return 70;
    }
    return kUsage;
}
