// qcga: batch front end for designing, evaluating and comparing QC procedures.
//
//   qcga [--config F] [--seed N] [--threads N] [--out F] [--format csv|doc] <command> ...
//
// Commands: design, evaluate PROC..., compare [PROC...], list-library, critical-errors.
// QCGA_SEED and QCGA_THREADS override the config; explicit flags override both.
// Exit codes: 0 ok, 2 config/usage error, 3 parse error, 4 runtime or infeasible assay.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcga/config.hpp"
#include "qcga/error_model.hpp"
#include "qcga/errors.hpp"
#include "qcga/ga.hpp"
#include "qcga/library.hpp"
#include "qcga/report.hpp"
#include "qcga/stats.hpp"

namespace {

enum ExitCode : int { kOk = 0, kConfig = 2, kParse = 3, kRuntime = 4 };

std::optional<std::uint64_t> env_number(const char* name) {
    const char* raw = std::getenv(name);
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(raw, &used);
        if (used != std::string(raw).size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw qcga::ConfigError(name, std::string("not a non-negative integer: '") + raw + "'");
    }
}

std::vector<qcga::LibraryEntry> gather_library(const qcga::JobConfig& cfg, bool include_builtin) {
    std::vector<qcga::LibraryEntry> lib;
    if (include_builtin) lib = qcga::builtin_library();
    for (const auto& path : cfg.library_files) {
        auto extra = qcga::load_library_file(path);
        lib.insert(lib.end(), extra.begin(), extra.end());
    }
    return lib;
}

// "name = notation" or a bare notation (named after itself).
qcga::NamedProcedure named_procedure(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) return {qcga::detail::trim(text), qcga::parse_procedure(text)};
    return {qcga::detail::trim(text.substr(0, eq)), qcga::parse_procedure(text.substr(eq + 1))};
}

void emit(const std::string& text, const qcga::JobConfig& cfg) {
    if (cfg.output.path.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(cfg.output.path, std::ios::binary);
    if (!out) throw qcga::Error("cannot write " + cfg.output.path);
    out << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Genetic-algorithm design and simulation of statistical QC procedures"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> out_path;
    std::optional<std::string> format;
    app.add_option("--config", config_path, "JSON job config (all keys optional)")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Seed for GA, simulation and comparison streams");
    app.add_option("--threads", threads, "Worker thread bound (output is thread-count independent)");
    app.add_option("--out", out_path, "Output file (default: standard output)");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "doc"}));

    auto* design = app.add_subcommand("design", "Run the genetic search");
    auto* evaluate = app.add_subcommand("evaluate", "Estimate P_re, P_se, P_fr, f and f1 for procedures");
    std::vector<std::string> evaluate_procs;
    evaluate->add_option("procedure", evaluate_procs, "Procedure text, canonical or Westgard notation, or NONE")
        ->required();
    auto* compare = app.add_subcommand("compare", "Replicated paired comparison with sign tests");
    std::vector<std::string> compare_procs;
    bool no_library = false;
    compare->add_option("procedure", compare_procs, "Extra procedures, 'notation' or 'name = notation'");
    compare->add_flag("--no-library", no_library, "Leave out the built-in library");
    auto* list_library = app.add_subcommand("list-library", "Print the built-in and configured library");
    auto* critical = app.add_subcommand("critical-errors", "Print the critical random and systematic errors");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        qcga::JobConfig cfg = config_path.empty() ? qcga::parse_config("{}") : qcga::load_config(config_path);
        if (const auto env_seed = env_number("QCGA_SEED")) cfg.apply_seed(*env_seed);
        if (seed) cfg.apply_seed(*seed);
        unsigned worker_count = 1;
        if (const auto env_threads = env_number("QCGA_THREADS")) worker_count = static_cast<unsigned>(*env_threads);
        if (threads) worker_count = *threads;
        if (worker_count == 0) worker_count = 1;
        if (out_path) cfg.output.path = *out_path;
        if (format) cfg.output.format = *format == "doc" ? qcga::OutputFormat::Doc : qcga::OutputFormat::Csv;
        cfg.validate();
        cfg.ga.threads = worker_count;
        const auto fmt = cfg.output.format;

        if (*critical) {
            emit(qcga::render_critical_errors(cfg, qcga::critical_errors(cfg.assay), fmt), cfg);
        } else if (*list_library) {
            emit(qcga::render_library(cfg, gather_library(cfg, true), fmt), cfg);
        } else if (*evaluate) {
            const auto crit = qcga::critical_errors(cfg.assay);
            std::vector<qcga::EvaluationResult> results;
            for (const auto& text : evaluate_procs) results.push_back(qcga::evaluate_procedure_text(text, cfg, crit));
            emit(qcga::render_evaluation(cfg, crit, results, fmt), cfg);
        } else if (*compare) {
            if (no_library) cfg.compare.include_library = false;
            cfg.compare.procedures.insert(cfg.compare.procedures.end(), compare_procs.begin(), compare_procs.end());
            std::vector<qcga::NamedProcedure> procs;
            for (const auto& e : gather_library(cfg, cfg.compare.include_library)) procs.push_back({e.name, e.procedure});
            for (const auto& text : cfg.compare.procedures) procs.push_back(named_procedure(text));
            if (procs.size() < 2) throw qcga::ConfigError("compare.procedures", "at least two procedures required");
            const auto result = qcga::compare_procedures(procs, cfg.plan, qcga::critical_errors(cfg.assay),
                                                         cfg.compare.replicates, cfg.compare_seed(), worker_count);
            emit(qcga::render_comparison(cfg, result, fmt), cfg);
        } else if (*design) {
            const auto report = qcga::run_design(cfg.layout, cfg.plan, cfg.assay, cfg.objective, cfg.ga);
            emit(qcga::render_design(cfg, report, fmt), cfg);
        }
        return kOk;
    } catch (const qcga::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const qcga::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    } catch (const qcga::UnsupportedRule& e) {
        std::cerr << "unsupported rule: " << e.what() << "\n";
        return kParse;
    } catch (const qcga::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
}
