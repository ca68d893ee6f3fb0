#include "spiked/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <iostream>

#include "spiked/errors.hpp"
#include "spiked/spectral_statistics.hpp"
#include "spiked/verification.hpp"

namespace spiked {

namespace {

constexpr int default_simulate_replicates = 1000;
constexpr std::uint64_t default_simulate_seed = 1;

json law_key(const RunConfig& c) {
    return {{"command", "tabulate-law"}, {"family", c.family}, {"k", c.k},           {"from", c.from},
            {"to", c.to},                {"step", c.step},     {"nodes", c.nodes}, {"version", artifact_version}};
}

void require_absent(const std::vector<std::filesystem::path>& paths, bool force) {
    if (force) return;
    for (const auto& p : paths)
        if (std::filesystem::exists(p)) throw OutputExistsError("refusing to overwrite " + p.string() + " (use --force)");
}

}  // namespace

json RunConfig::canonical() const {
    if (command == "tabulate-law") return law_key(*this);
    json j = {{"command", command}, {"version", artifact_version}};
    if (command == "simulate") {
        j["model"] = to_json(model_from_json(model));
        j["replicates"] = replicates_or(default_simulate_replicates);
        j["seed"] = seed_or(default_simulate_seed);
    } else if (command == "verify") {
        const SuiteOptions d;
        j["suite"] = suite;
        j["replicates"] = replicates_or(d.replicates);
        j["seed"] = seed_or(d.seed);
    } else if (command == "hypothesis-test") {
        j["model"] = to_json(model_from_json(model));
        j["alpha"] = alpha;
        j["lambda_min"] = lambda_min ? json(*lambda_min) : json();
        j["lambda_max"] = lambda_max ? json(*lambda_max) : json();
    }
    return j;
}

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    RunConfig c;
    for (const char* key : {"N", "M", "gamma", "spikes"})
        if (j.contains(key)) c.model[key] = j.at(key);
    c.command = j.value("command", std::string());
    c.family = j.value("family", c.family);
    c.k = j.value("k", c.k);
    c.from = j.value("from", c.from);
    c.to = j.value("to", c.to);
    c.step = j.value("step", c.step);
    c.nodes = j.value("nodes", c.nodes);
    if (j.contains("replicates")) c.replicates = j.at("replicates").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    c.jobs = j.value("jobs", c.jobs);
    c.out = j.value("out", c.out.string());
    c.force = j.value("force", c.force);
    if (j.contains("cache_dir")) c.cache_dir = j.at("cache_dir").get<std::string>();
    c.suite = j.value("suite", c.suite);
    c.alpha = j.value("alpha", c.alpha);
    if (j.contains("lambda_min")) c.lambda_min = j.at("lambda_min").get<double>();
    if (j.contains("lambda_max")) c.lambda_max = j.at("lambda_max").get<double>();
    return c;
}

void RunConfig::validate() const {
    if (replicates && *replicates < 1) throw UsageError("replicates must be at least 1");
    if (jobs < 1) throw UsageError("jobs must be at least 1");
    if (command == "tabulate-law") {
        parse_family(family);
        if (k < 0) throw UsageError("k must be nonnegative");
        if (!(step > 0) || !(to >= from)) throw UsageError("bad grid");
        if (nodes < 4) throw UsageError("nodes must be at least 4");
    }
    if (command == "simulate" || command == "hypothesis-test") {
        if (!model.contains("N")) throw UsageError("model needs N");
        model_from_json(model);
    }
    if (command == "verify") {
        const auto& names = suite_names();
        if (std::find(names.begin(), names.end(), suite) == names.end())
            throw UsageError("unknown suite '" + suite + "'");
    }
    if (command == "hypothesis-test" && (!lambda_min || !lambda_max))
        throw UsageError("hypothesis-test needs --lambda-min and --lambda-max");
}

CommandOutput cmd_tabulate_law(const RunConfig& config) {
    config.validate();
    const LawFamily family = parse_family(config.family);
    const std::string hash = config.hash();
    const std::filesystem::path target = config.out / ("law-" + config.family + std::to_string(config.k) + ".csv");
    require_absent({target}, config.force);
    CommandOutput out;
    std::string csv;
    std::filesystem::path cached;
    if (!config.cache_dir.empty()) {
        cached = config.cache_dir / ("law-" + hash + ".csv");
        if (std::filesystem::exists(cached)) {
            csv = read_file(cached);
            out.cache_hit = true;
        }
    }
    if (!out.cache_hit) {
        const LawTable table = tabulate_law(family, config.k, config.from, config.to, config.step, config.nodes,
                                            config.jobs);
        csv = law_table_csv(table, hash);
        if (!cached.empty()) write_file(cached, csv, true);
    }
    write_file(target, csv, config.force);
    out.files.push_back(target);
    out.report = {{"config_hash", hash}, {"cache_hit", out.cache_hit}};
    return out;
}

CommandOutput cmd_simulate(const RunConfig& config) {
    config.validate();
    const std::string hash = config.hash();
    const EnsembleRun run{model_from_json(config.model), config.replicates_or(default_simulate_replicates),
                          config.seed_or(default_simulate_seed)};
    const std::filesystem::path csv_path = config.out / "samples.csv", manifest_path = config.out / "manifest.json";
    require_absent({csv_path, manifest_path}, config.force);
    const EnsembleResult result = sample_extremes(run, config.jobs);
    write_file(csv_path, samples_csv(result, run.model, hash), config.force);
    json manifest = run_manifest(run, result, hash, config.inputs);
    manifest["samples_file"] = {{"path", csv_path.filename().string()},
                                {"fnv1a", config_hash(json(read_file(csv_path)))}};
    write_file(manifest_path, dump_json(manifest), config.force);
    CommandOutput out;
    out.files = {csv_path, manifest_path};
    out.report = manifest;
    out.status = result.failures.empty() ? exit_ok : exit_failed;
    return out;
}

CommandOutput cmd_verify(const RunConfig& config) {
    config.validate();
    SuiteOptions opt;
    opt.replicates = config.replicates_or(opt.replicates);
    opt.seed = config.seed_or(opt.seed);
    opt.jobs = config.jobs;
    const std::filesystem::path target = config.out / ("verify-" + config.suite + ".json");
    require_absent({target}, config.force);
    SuiteContext context(opt);
    const SuiteResult result = run_suite(config.suite, context);
    json report = result.to_json();
    report["config_hash"] = config.hash();
    report["version"] = artifact_version;
    report["inputs"] = config.inputs;
    write_file(target, dump_json(report), config.force);
    CommandOutput out;
    out.files = {target};
    out.report = report;
    out.status = result.passed() ? exit_ok : exit_failed;
    return out;
}

CommandOutput cmd_hypothesis_test(const RunConfig& config) {
    config.validate();
    const SpikedModel model = model_from_json(config.model);
    const std::filesystem::path target = config.out / "hypothesis-test.json";
    require_absent({target}, config.force);
    const HypothesisResult r = hypothesis_test(*config.lambda_min, *config.lambda_max, model, config.alpha);
    json report = {{"config_hash", config.hash()},
                   {"version", artifact_version},
                   {"model", to_json(model)},
                   {"alpha", config.alpha},
                   {"lambda_min", *config.lambda_min},
                   {"lambda_max", *config.lambda_max},
                   {"scaled_min", r.scaled_min},
                   {"scaled_max", r.scaled_max},
                   {"T", r.T},
                   {"reject", r.reject},
                   {"inputs", config.inputs}};
    write_file(target, dump_json(report), config.force);
    CommandOutput out;
    out.files = {target};
    out.report = report;
    out.status = r.reject ? exit_failed : exit_ok;
    return out;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Extreme eigenvalues of spiked complex Wishart matrices", "spiked-spectra"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    int replicates = 0, jobs = 1, N = 0, M = 0;
    double gamma = 0;
    std::vector<std::string> spikes;
    app.add_option("--config", config_path, "JSON config; flags override its fields")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "master seed");
    app.add_option("--replicates", replicates, "Monte Carlo replicates");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--jobs", jobs, "worker threads");
    app.add_flag("--force", "overwrite existing outputs");
    app.add_option("--N", N, "dimension");
    app.add_option("--M", M, "sample count");
    app.add_option("--gamma", gamma, "sqrt(M / N); M = ceil(gamma^2 N) when M is absent");
    app.add_option("--spike", spikes, "population spike value[:multiplicity], repeatable");

    std::string family, suite;
    int k = 0, nodes = 0;
    double from = 0, to = 0, step = 0, alpha = 0, lmin = 0, lmax = 0;
    CLI::App* tab = app.add_subcommand("tabulate-law", "tabulate a limiting CDF on a grid");
    tab->add_option("--family", family, "F (Tracy-Widom type) or G (finite GUE)");
    tab->add_option("--k", k, "rank");
    tab->add_option("--from", from);
    tab->add_option("--to", to);
    tab->add_option("--step", step);
    tab->add_option("--nodes", nodes, "quadrature nodes");
    app.add_subcommand("simulate", "sample extreme eigenvalues");
    CLI::App* ver = app.add_subcommand("verify", "run a verification suite");
    ver->add_option("suite", suite, "suite name")->required();
    CLI::App* hyp = app.add_subcommand("hypothesis-test", "test a pair of extreme eigenvalues against a model");
    hyp->add_option("--alpha", alpha);
    hyp->add_option("--lambda-min", lmin)->required();
    hyp->add_option("--lambda-max", lmax)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        json cfg = json::object();
        json inputs = json::object();
        if (!config_path.empty()) {
            const std::string text = read_file(config_path);
            try {
                cfg = json::parse(text);
            } catch (const json::parse_error& e) {
                throw UsageError(std::string("config: ") + e.what());
            }
            inputs["config"] = {{"path", config_path}, {"fnv1a", config_hash(json(text))}};
        }
        auto set = [&](const char* opt, const char* key, auto value) {
            if (app.count(opt) > 0) cfg[key] = value;
        };
        set("--seed", "seed", seed);
        set("--replicates", "replicates", replicates);
        set("--out", "out", out_dir);
        set("--jobs", "jobs", jobs);
        if (app.count("--force") > 0) cfg["force"] = true;
        set("--N", "N", N);
        set("--M", "M", M);
        set("--gamma", "gamma", gamma);
        if (!spikes.empty()) {
            json list = json::array();
            for (const std::string& s : spikes) {
                const auto colon = s.find(':');
                try {
                    const double v = std::stod(s.substr(0, colon));
                    const int m = colon == std::string::npos ? 1 : std::stoi(s.substr(colon + 1));
                    list.push_back({{"value", v}, {"multiplicity", m}});
                } catch (const std::logic_error&) {
                    throw UsageError("bad --spike '" + s + "'");
                }
            }
            cfg["spikes"] = list;
        }
        if (tab->parsed()) {
            if (tab->count("--family")) cfg["family"] = family;
            if (tab->count("--k")) cfg["k"] = k;
            if (tab->count("--from")) cfg["from"] = from;
            if (tab->count("--to")) cfg["to"] = to;
            if (tab->count("--step")) cfg["step"] = step;
            if (tab->count("--nodes")) cfg["nodes"] = nodes;
        }
        if (ver->parsed()) cfg["suite"] = suite;
        if (hyp->parsed()) {
            if (hyp->count("--alpha")) cfg["alpha"] = alpha;
            cfg["lambda_min"] = lmin;
            cfg["lambda_max"] = lmax;
        }
        RunConfig config = RunConfig::from_json(cfg);
        config.command = app.get_subcommands().front()->get_name();
        config.inputs = inputs;
        if (config.cache_dir.empty())
            if (const char* env = std::getenv("SPIKED_SPECTRA_CACHE"); env && *env) config.cache_dir = env;

        CommandOutput out;
        if (config.command == "tabulate-law")
            out = cmd_tabulate_law(config);
        else if (config.command == "simulate")
            out = cmd_simulate(config);
        else if (config.command == "verify")
            out = cmd_verify(config);
        else
            out = cmd_hypothesis_test(config);
        for (const auto& f : out.files) std::cout << f.string() << "\n";
        if (config.command == "verify" || config.command == "hypothesis-test") {
            json summary = out.report;
            summary.erase("inputs");
            std::cout << summary.dump() << "\n";
        }
        return out.status;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const json::exception& e) {
        std::cerr << "usage error: config: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_error;
    }
}

}  // namespace spiked
