// tflab: runs one named experiment from a JSON config and writes summary.json plus CSV tables.
// Exit status: 0 all assertions pass, 1 some assertion failed, 2 bad usage or config, 3 runtime error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "config.hpp"
#include "experiments.hpp"
#include "tflab/io.hpp"
#include "tflab/parallel.hpp"

int main(int argc, char** argv)
{
    using namespace tflab;
    using namespace tflab::cli;

    CLI::App app{"tflab: time-frequency operator experiments"};
    std::string experiment, config_path, out;
    unsigned threads = 0, seed = 0;
    bool emit_defaults = false;
    app.add_option("experiment", experiment, "frames | decay | twopath | compactness | psdo | mixed (default: from config)")
        ->check(CLI::IsMember(experiment_names()));
    app.add_option("--config,-c", config_path, "JSON config; omitted fields take their defaults")->check(CLI::ExistingFile);
    app.add_option("--out,-o", out, "output directory (overrides output.dir)");
    auto* threads_opt = app.add_option("--threads,-j", threads, "worker thread cap (0 = all cores)");
    auto* seed_opt = app.add_option("--seed,-s", seed, "seed for randomized checks (overrides config)");
    app.add_flag("--emit-defaults", emit_defaults, "print the annotated default config and exit");
    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (emit_defaults)
    {
        std::cout << annotated_defaults().dump(2) << '\n';
        return 0;
    }

    ExperimentConfig cfg;
    try
    {
        if (!config_path.empty())
            cfg = load_config(config_path);
        if (!experiment.empty())
            cfg.experiment = experiment;
        if (!out.empty())
            cfg.out = out;
        if (*seed_opt)
            cfg.seed = seed;
        validate(cfg);
    }
    catch (const Error& e)
    {
        std::cerr << "tflab: " << e.what() << '\n';
        return 2;
    }
    if (*threads_opt)
        set_max_threads(threads);

    // The output location is not part of the experiment's identity.
    json ident = to_json(cfg);
    ident["output"].erase("dir");
    const std::string hash = io::fnv1a_hex(ident.dump());

    Report rep;
    try
    {
        std::filesystem::create_directories(cfg.out);
        rep = run_experiment(cfg, cfg.out);
    }
    catch (const std::exception& e)
    {
        std::cerr << "tflab: " << cfg.experiment << " failed: " << e.what() << '\n';
        return 3;
    }

    const auto failures = rep.failures();
    const json summary = {{"experiment", cfg.experiment},
                          {"version", version()},
                          {"config_hash", hash},
                          {"config", ident},
                          {"results", rep.results},
                          {"assertions", rep.assertions},
                          {"failures", failures},
                          {"pass", failures.empty()},
                          {"files", rep.files}};
    {
        std::ofstream os(cfg.out + "/summary.json");
        if (!os)
        {
            std::cerr << "tflab: cannot write " << cfg.out << "/summary.json\n";
            return 3;
        }
        os << summary.dump(2) << '\n';
    }

    for (const json& a : rep.assertions)
        std::printf("%s %-32s value %s bound %s\n", a["pass"].get<bool>() ? "PASS" : "FAIL",
                    a["name"].get<std::string>().c_str(), a["value"].dump().c_str(), a["bound"].dump().c_str());
    std::printf("%s: %zu/%zu assertions passed, summary in %s/summary.json (config %s)\n", cfg.experiment.c_str(),
                rep.assertions.size() - failures.size(), rep.assertions.size(), cfg.out.c_str(), hash.c_str());
    return failures.empty() ? 0 : 1;
}
