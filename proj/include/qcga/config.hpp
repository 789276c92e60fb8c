#pragma once

/// @file config.hpp
/// @brief Job configuration: strict JSON loading, defaults, and a canonical echo.
///
/// Every section is optional and every default is the sodium-assay application, so `{}`
/// is a complete full-scale job. Unknown keys are rejected with the offending path.
///
///     {
///       "assay":     {"sd": 0.67, "bias": 0.1, "tea": 4.0, "alpha": 0.01},
///       "objective": {"p_re_target": 0.5, "p_se_target": 1.0, "w_re": 1, "w_se": 1, "w_fr": 1},
///       "ga":        {"population": 600, "p_crossover": 1.0, "generations": 100,
///                     "mutation_schedule": [[0, 0.0], [50, 0.0005]],
///                     "crossover": "single_point", "evaluation_seeding": "per_generation",
///                     "init_seed": null, "report_best": 10, "record_replacements": false},
///       "plan":      {"measurements_per_level": 1000, "levels": 2, "per_level_per_run": 1,
///                     "history": "reset_on_rejection"},
///       "layout":    {"max_rules": 3, "optimize_levels": true, "optimize_per_level": false,
///                     "fixed_levels": 2, "fixed_per_level": 1},
///       "rng":       {"seed": 1, "multiplier": 630360016, "modulus": 2147483647},
///       "compare":   {"replicates": 21, "base_seed": null, "include_library": true,
///                     "procedures": []},
///       "library_files": [],
///       "output":    {"path": "", "format": "csv"}
///     }

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcga/error_model.hpp"
#include "qcga/errors.hpp"
#include "qcga/ga.hpp"
#include "qcga/genome.hpp"
#include "qcga/objective.hpp"
#include "qcga/rng.hpp"
#include "qcga/simulator.hpp"

namespace qcga {

enum class OutputFormat : std::uint8_t { Csv, Doc };

struct CompareConfig {
    int replicates = 21;
    std::optional<std::uint64_t> base_seed;  // unset: the job seed
    bool include_library = true;
    std::vector<std::string> procedures;     // extra entries, "notation" or "name = notation"
};

struct OutputConfig {
    std::string path;  // empty: standard output
    OutputFormat format = OutputFormat::Csv;
};

struct JobConfig {
    AssayParams assay;
    ObjectiveConfig objective;
    GaParams ga;
    SimulationPlan plan;
    GenomeLayout layout;
    std::uint64_t seed = 1;
    CompareConfig compare;
    std::vector<std::string> library_files;
    OutputConfig output;

    /// Propagates the job seed into the GA and the simulation plan.
    void apply_seed(std::uint64_t s) {
        seed = s;
        ga.seed = s;
        plan.seed = s;
    }

    [[nodiscard]] std::uint64_t compare_seed() const { return compare.base_seed.value_or(seed); }

    void validate() const {
        auto guard = [](std::string_view section, auto&& check) {
            try {
                check();
            } catch (const InvalidArgument& e) {
                throw ConfigError(std::string(section), e.what());
            }
        };
        guard("assay", [&] { assay.validate(); });
        guard("objective", [&] { objective.validate(); });
        guard("ga", [&] { ga.validate(); });
        guard("plan", [&] { plan.validate(); });
        guard("layout", [&] { layout.validate(); });
        guard("rng", [&] { plan.constants.validate(); });
        if (seed == 0 || seed % plan.constants.modulus == 0)
            throw ConfigError("rng.seed", "seed must be non-zero modulo the generator modulus");
        if (compare.replicates < 2) throw ConfigError("compare.replicates", "at least two replicates required");
    }
};

namespace detail {

using nlohmann::json;

template <class E>
struct EnumName {
    E value;
    std::string_view name;
};

inline constexpr EnumName<HistoryPolicy> kHistoryNames[] = {
    {HistoryPolicy::ResetOnRejection, "reset_on_rejection"},
    {HistoryPolicy::Persistent, "persistent"},
    {HistoryPolicy::RestoreInControl, "restore_in_control"},
};
inline constexpr EnumName<CrossoverKind> kCrossoverNames[] = {
    {CrossoverKind::SinglePoint, "single_point"},
    {CrossoverKind::TwoPoint, "two_point"},
};
inline constexpr EnumName<EvaluationSeeding> kSeedingNames[] = {
    {EvaluationSeeding::PerGeneration, "per_generation"},
    {EvaluationSeeding::Fixed, "fixed"},
    {EvaluationSeeding::PerGenome, "per_genome"},
};
inline constexpr EnumName<OutputFormat> kFormatNames[] = {
    {OutputFormat::Csv, "csv"},
    {OutputFormat::Doc, "doc"},
};

template <class E, std::size_t N>
std::string enum_name(const EnumName<E> (&table)[N], E value) {
    for (const auto& entry : table)
        if (entry.value == value) return std::string(entry.name);
    return "?";
}

template <class E, std::size_t N>
E enum_value(const EnumName<E> (&table)[N], const std::string& text, const std::string& field) {
    std::string allowed;
    for (const auto& entry : table) {
        if (entry.name == text) return entry.value;
        allowed += (allowed.empty() ? "" : ", ") + std::string(entry.name);
    }
    throw ConfigError(field, "unknown value '" + text + "' (expected one of: " + allowed + ")");
}

/// Reads the keys of one JSON object, rejecting anything not consumed.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    template <class T>
    void read(const char* key, T& out) {
        const std::string field = qualify(key);
        allowed_.emplace_back(key);
        const auto it = node_.find(key);
        if (it == node_.end()) return;
        try {
            out = it->template get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(field, std::string("wrong type: ") + e.what());
        }
    }

    template <class T>
    void read_optional(const char* key, std::optional<T>& out) {
        allowed_.emplace_back(key);
        const auto it = node_.find(key);
        if (it == node_.end() || it->is_null()) return;
        T value{};
        try {
            value = it->template get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(qualify(key), std::string("wrong type: ") + e.what());
        }
        out = value;
    }

    template <class E, std::size_t N>
    void read_enum(const char* key, const EnumName<E> (&table)[N], E& out) {
        std::optional<std::string> text;
        read_optional(key, text);
        if (text) out = enum_value(table, *text, qualify(key));
    }

    const json* child(const char* key) {
        allowed_.emplace_back(key);
        const auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    [[nodiscard]] std::string qualify(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    void finish() const {
        for (const auto& [key, _] : node_.items()) {
            bool known = false;
            for (const auto& a : allowed_) known = known || a == key;
            if (!known) throw ConfigError(qualify(key), "unknown config key");
        }
    }

private:
    const json& node_;
    std::string path_;
    std::vector<std::string> allowed_;
};

} // namespace detail

/// Builds a validated JobConfig from a parsed JSON document.
inline JobConfig config_from_json(const nlohmann::json& doc) {
    using detail::Section;
    JobConfig cfg;
    Section root(doc, "");

    auto with = [&](const char* key, auto&& body) {
        if (const auto* node = root.child(key)) {
            Section s(*node, key);
            body(s);
            s.finish();
        }
    };

    with("assay", [&](Section& s) {
        s.read("sd", cfg.assay.sd);
        s.read("bias", cfg.assay.bias);
        s.read("tea", cfg.assay.tea);
        s.read("alpha", cfg.assay.alpha);
    });
    with("objective", [&](Section& s) {
        s.read("p_re_target", cfg.objective.p_re_target);
        s.read("p_se_target", cfg.objective.p_se_target);
        s.read("w_re", cfg.objective.w_re);
        s.read("w_se", cfg.objective.w_se);
        s.read("w_fr", cfg.objective.w_fr);
    });
    with("ga", [&](Section& s) {
        s.read("population", cfg.ga.population);
        s.read("p_crossover", cfg.ga.p_crossover);
        s.read("generations", cfg.ga.generations);
        s.read_enum("crossover", detail::kCrossoverNames, cfg.ga.crossover);
        s.read_enum("evaluation_seeding", detail::kSeedingNames, cfg.ga.seeding);
        s.read_optional("init_seed", cfg.ga.init_seed);
        s.read("report_best", cfg.ga.report_best);
        s.read("record_replacements", cfg.ga.record_replacements);
        std::optional<std::vector<std::pair<int, double>>> schedule;
        s.read_optional("mutation_schedule", schedule);
        if (schedule) {
            cfg.ga.mutation_schedule.clear();
            for (const auto& [from, p] : *schedule) cfg.ga.mutation_schedule.push_back({from, p});
        }
    });
    with("plan", [&](Section& s) {
        s.read("measurements_per_level", cfg.plan.measurements_per_level);
        s.read("levels", cfg.plan.levels);
        s.read("per_level_per_run", cfg.plan.per_level_per_run);
        s.read_enum("history", detail::kHistoryNames, cfg.plan.history);
    });
    with("layout", [&](Section& s) {
        s.read("max_rules", cfg.layout.max_rules);
        s.read("optimize_levels", cfg.layout.optimize_levels);
        s.read("optimize_per_level", cfg.layout.optimize_per_level);
        s.read("fixed_levels", cfg.layout.fixed_levels);
        s.read("fixed_per_level", cfg.layout.fixed_per_level);
    });
    std::uint64_t seed = cfg.seed;
    with("rng", [&](Section& s) {
        s.read("seed", seed);
        s.read("multiplier", cfg.plan.constants.multiplier);
        s.read("modulus", cfg.plan.constants.modulus);
    });
    cfg.apply_seed(seed);
    with("compare", [&](Section& s) {
        s.read("replicates", cfg.compare.replicates);
        s.read_optional("base_seed", cfg.compare.base_seed);
        s.read("include_library", cfg.compare.include_library);
        s.read("procedures", cfg.compare.procedures);
    });
    if (const auto* files = root.child("library_files")) {
        try {
            cfg.library_files = files->get<std::vector<std::string>>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("library_files", std::string("wrong type: ") + e.what());
        }
    }
    with("output", [&](Section& s) {
        s.read("path", cfg.output.path);
        s.read_enum("format", detail::kFormatNames, cfg.output.format);
    });
    root.finish();

    cfg.validate();
    return cfg;
}

inline JobConfig parse_config(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("<file>", e.what());
    }
    return config_from_json(doc);
}

inline JobConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open config file " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

/// The complete effective configuration; loading it back yields the same job.
inline nlohmann::json config_to_json(const JobConfig& cfg) {
    using nlohmann::json;
    json schedule = json::array();
    for (const auto& step : cfg.ga.mutation_schedule) schedule.push_back({step.from_generation, step.p_mutation});
    json doc;
    doc["assay"] = {{"sd", cfg.assay.sd}, {"bias", cfg.assay.bias}, {"tea", cfg.assay.tea}, {"alpha", cfg.assay.alpha}};
    doc["objective"] = {{"p_re_target", cfg.objective.p_re_target},
                        {"p_se_target", cfg.objective.p_se_target},
                        {"w_re", cfg.objective.w_re},
                        {"w_se", cfg.objective.w_se},
                        {"w_fr", cfg.objective.w_fr}};
    doc["ga"] = {{"population", cfg.ga.population},
                 {"p_crossover", cfg.ga.p_crossover},
                 {"generations", cfg.ga.generations},
                 {"mutation_schedule", schedule},
                 {"crossover", detail::enum_name(detail::kCrossoverNames, cfg.ga.crossover)},
                 {"evaluation_seeding", detail::enum_name(detail::kSeedingNames, cfg.ga.seeding)},
                 {"init_seed", cfg.ga.init_seed ? json(*cfg.ga.init_seed) : json(nullptr)},
                 {"report_best", cfg.ga.report_best},
                 {"record_replacements", cfg.ga.record_replacements}};
    doc["plan"] = {{"measurements_per_level", cfg.plan.measurements_per_level},
                   {"levels", cfg.plan.levels},
                   {"per_level_per_run", cfg.plan.per_level_per_run},
                   {"history", detail::enum_name(detail::kHistoryNames, cfg.plan.history)}};
    doc["layout"] = {{"max_rules", cfg.layout.max_rules},
                     {"optimize_levels", cfg.layout.optimize_levels},
                     {"optimize_per_level", cfg.layout.optimize_per_level},
                     {"fixed_levels", cfg.layout.fixed_levels},
                     {"fixed_per_level", cfg.layout.fixed_per_level}};
    doc["rng"] = {{"seed", cfg.seed},
                  {"multiplier", cfg.plan.constants.multiplier},
                  {"modulus", cfg.plan.constants.modulus}};
    doc["compare"] = {{"replicates", cfg.compare.replicates},
                      {"base_seed", cfg.compare.base_seed ? json(*cfg.compare.base_seed) : json(nullptr)},
                      {"include_library", cfg.compare.include_library},
                      {"procedures", cfg.compare.procedures}};
    doc["library_files"] = cfg.library_files;
    doc["output"] = {{"path", cfg.output.path},
                     {"format", detail::enum_name(detail::kFormatNames, cfg.output.format)}};
    return doc;
}

} // namespace qcga
