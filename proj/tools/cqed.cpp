// cqed batch front end: one job per invocation, one CSV per job.
//
//   cqed <job> [--config FILE] [--out PATH] [--n-fock N] [--fast] [--<key> VALUE ...]
//
// Exit status: 0 ok, 2 config, 3 convergence, 4 solver, 5 I/O.

#include <CLI11.hpp>

#include <cqed/cli/config.hpp>
#include <cqed/cli/csv.hpp>
#include <cqed/cli/jobs.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

using namespace cqed;
using namespace cqed::cli;

namespace {

struct Invocation {
    std::string config;
    std::string out;
    std::optional<int> n_fock;
    bool fast = false;
    std::map<std::string, std::string> overrides;
};

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int fail(const Error& e) {
    std::cerr << "cqed: error[" << category_name(e.category()) << "]: " << e.what() << "\n";
    return exit_code(e.category());
}

int run(JobKind job, const Invocation& inv) {
    JobConfig cfg = inv.config.empty() ? parse_config("", job) : parse_config(read_file(inv.config), job);
    if (inv.fast || cfg.fast) apply_fast(cfg);
    for (const auto& [k, v] : inv.overrides) apply_override(cfg, k, v);
    if (inv.n_fock) cfg.n_fock = *inv.n_fock;
    if (!inv.out.empty()) cfg.path = inv.out;
    validate(cfg);

    const analysis::SweepResult r = run_job(cfg);
    const auto path = output_path(cfg);
    write_atomic(path, make_artifact(r, cfg).render());
    std::cerr << "cqed: wrote " << path.string() << " (" << r.rows.size() << " rows, hash " << config_hash(cfg)
              << ")\n";
    if (!r.failures.empty()) {
        const auto& f = r.failures.front();
        std::cerr << "cqed: error[" << category_name(f.category) << "]: " << r.failures.size()
                  << " point(s) failed; first at " << r.axis << " = " << f.axis_value << ": " << f.message << "\n";
        return exit_code(f.category);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cavity QED spectra, vacuum and open-system sweeps"};
    app.require_subcommand(1);

    Invocation inv;
    std::map<std::string, std::string> raw;
    std::vector<std::pair<CLI::App*, JobKind>> subs;
    for (const JobKind j : kAllJobs) {
        CLI::App* sub = app.add_subcommand(job_name(j));
        sub->add_option("--config", inv.config, "job configuration file");
        sub->add_option("--out", inv.out, "output CSV path");
        sub->add_option("--n-fock", inv.n_fock, "photon Fock cutoff");
        sub->add_flag("--fast", inv.fast, "reduced-accuracy preset");
        for (const KeySpec& k : schema()) {
            const std::string name = k.name;
            if (name == "fast") continue;
            sub->add_option("--" + name, raw[name], std::string("[") + (*k.section ? k.section : "top") + "] " + name);
        }
        subs.emplace_back(sub, j);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_code(ErrorCategory::config);
    }

    for (const auto& [sub, job] : subs) {
        if (!sub->parsed()) continue;
        for (const KeySpec& k : schema()) {
            const std::string name = k.name;
            if (name != "fast" && sub->count("--" + name) > 0) inv.overrides[name] = raw[name];
        }
        try {
            return run(job, inv);
        } catch (const Error& e) {
            return fail(e);
        } catch (const std::exception& e) {
            std::cerr << "cqed: error[solver]: " << e.what() << "\n";
            return exit_code(ErrorCategory::solver);
        }
    }
    return exit_code(ErrorCategory::config);
}
