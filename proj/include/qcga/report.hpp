#pragma once

/// @file report.hpp
/// @brief CSV tables and JSON report documents for every command.
///
/// Both formats embed the effective configuration, so a report reproduces itself. Nothing
/// time- or host-dependent is written: identical jobs give identical bytes.

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcga/config.hpp"
#include "qcga/error_model.hpp"
#include "qcga/ga.hpp"
#include "qcga/library.hpp"
#include "qcga/objective.hpp"
#include "qcga/simulator.hpp"
#include "qcga/stats.hpp"

namespace qcga {

struct EvaluationResult {
    std::string text;      // as given by the user
    std::string notation;  // canonical
    int levels = 0;
    int per_level = 0;
    PerformanceEstimate estimate;
    double f = 0.0;
    double f1 = 0.0;
};

inline EvaluationResult evaluate_procedure_text(std::string_view text, const JobConfig& cfg,
                                                const CriticalErrors& critical) {
    const Procedure proc = parse_procedure(text);
    EvaluationResult r;
    r.text = std::string(text);
    r.notation = canonical_notation(proc);
    r.levels = effective_levels(proc, cfg.plan);
    r.per_level = effective_per_level(proc, cfg.plan);
    r.estimate = estimate_performance(proc, cfg.plan, critical);
    r.f = fitness_f(r.estimate, cfg.objective);
    r.f1 = comparison_f1(r.estimate);
    return r;
}

namespace detail {

inline std::string fixed6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string csv_row(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + csv_field(fields[i]);
    return line + "\n";
}

// The output section is left out: where a report is written does not change its content.
inline nlohmann::json job_echo(const JobConfig& cfg) {
    nlohmann::json doc = config_to_json(cfg);
    doc.erase("output");
    return doc;
}

inline std::string csv_preamble(std::string_view command, const JobConfig& cfg) {
    return "# qcga " + std::string(command) + "\n# config " + job_echo(cfg).dump() + "\n";
}

inline nlohmann::json estimate_json(const PerformanceEstimate& e) {
    return {{"p_re", e.p_re}, {"p_se", e.p_se}, {"p_fr", e.p_fr}, {"runs", e.runs_simulated}};
}

inline nlohmann::json summary_json(const Summary& s) { return {{"mean", s.mean}, {"sd", s.sd}}; }

inline nlohmann::json critical_json(const CriticalErrors& c) {
    return {{"k_re", c.k_re}, {"delta_se", c.delta_se}};
}

inline std::string document(std::string_view command, const JobConfig& cfg, nlohmann::json body) {
    body["command"] = command;
    body["config"] = job_echo(cfg);
    return body.dump(2) + "\n";
}

} // namespace detail

inline std::string render_critical_errors(const JobConfig& cfg, const CriticalErrors& c, OutputFormat format) {
    if (format == OutputFormat::Doc)
        return detail::document("critical-errors", cfg, {{"critical_errors", detail::critical_json(c)}});
    return detail::csv_preamble("critical-errors", cfg) + detail::csv_row({"k_re", "delta_se"}) +
           detail::csv_row({detail::fixed6(c.k_re), detail::fixed6(c.delta_se)});
}

inline std::string render_evaluation(const JobConfig& cfg, const CriticalErrors& c,
                                     const std::vector<EvaluationResult>& results, OutputFormat format) {
    if (format == OutputFormat::Doc) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : results)
            rows.push_back({{"procedure", r.text},
                            {"notation", r.notation},
                            {"levels", r.levels},
                            {"per_level", r.per_level},
                            {"estimate", detail::estimate_json(r.estimate)},
                            {"f", r.f},
                            {"f1", r.f1}});
        return detail::document("evaluate", cfg,
                                {{"critical_errors", detail::critical_json(c)}, {"results", std::move(rows)}});
    }
    std::string out = detail::csv_preamble("evaluate", cfg) +
                      detail::csv_row({"procedure", "notation", "levels", "per_level", "p_re", "p_se", "p_fr", "f", "f1"});
    for (const auto& r : results)
        out += detail::csv_row({r.text, r.notation, std::to_string(r.levels), std::to_string(r.per_level),
                                detail::fixed6(r.estimate.p_re), detail::fixed6(r.estimate.p_se),
                                detail::fixed6(r.estimate.p_fr), detail::fixed6(r.f), detail::fixed6(r.f1)});
    return out;
}

inline std::string render_comparison(const JobConfig& cfg, const ComparisonResult& result, OutputFormat format) {
    if (format == OutputFormat::Doc) {
        nlohmann::json rows = nlohmann::json::array();
        int rank = 0;
        for (const auto& row : result.rows) {
            nlohmann::json reps = nlohmann::json::array();
            for (std::size_t r = 0; r < row.replicates.size(); ++r) {
                auto e = detail::estimate_json(row.replicates[r]);
                e["f1"] = row.f1[r];
                reps.push_back(std::move(e));
            }
            rows.push_back({{"rank", ++rank},
                            {"name", row.name},
                            {"notation", row.notation},
                            {"p_re", detail::summary_json(row.p_re)},
                            {"p_se", detail::summary_json(row.p_se)},
                            {"p_fr", detail::summary_json(row.p_fr)},
                            {"f1", detail::summary_json(row.f1_summary)},
                            {"sign_test_vs_top",
                             {{"p_value", row.versus_reference.p_value},
                              {"below", row.versus_reference.below},
                              {"above", row.versus_reference.above},
                              {"ties", row.versus_reference.ties},
                              {"ties_only", row.versus_reference.ties_only}}},
                            {"replicates", std::move(reps)}});
        }
        return detail::document("compare", cfg,
                                {{"critical_errors", detail::critical_json(result.critical)},
                                 {"replicates", result.replicates},
                                 {"base_seed", result.base_seed},
                                 {"design", "paired: replicate r of every procedure uses the same deviate series"},
                                 {"rows", std::move(rows)}});
    }
    std::string out = detail::csv_preamble("compare", cfg);
    out += "# replicates " + std::to_string(result.replicates) + " paired, base_seed " +
           std::to_string(result.base_seed) + "\n";
    out += detail::csv_row({"rank", "name", "notation", "p_re_mean", "p_re_sd", "p_se_mean", "p_se_sd", "p_fr_mean",
                            "p_fr_sd", "f1_mean", "f1_sd", "sign_p_vs_top", "below", "above", "ties"});
    int rank = 0;
    for (const auto& row : result.rows) {
        const auto& t = row.versus_reference;
        out += detail::csv_row({std::to_string(++rank), row.name, row.notation, detail::fixed6(row.p_re.mean),
                                detail::fixed6(row.p_re.sd), detail::fixed6(row.p_se.mean), detail::fixed6(row.p_se.sd),
                                detail::fixed6(row.p_fr.mean), detail::fixed6(row.p_fr.sd),
                                detail::fixed6(row.f1_summary.mean), detail::fixed6(row.f1_summary.sd),
                                t.ties_only ? "ties" : detail::sci(t.p_value), std::to_string(t.below),
                                std::to_string(t.above), std::to_string(t.ties)});
    }
    return out;
}

inline std::string render_design(const JobConfig& cfg, const DesignReport& report, OutputFormat format) {
    if (format == OutputFormat::Doc) {
        nlohmann::json gens = nlohmann::json::array();
        for (const auto& g : report.generations)
            gens.push_back({{"generation", g.generation},
                            {"notation", g.notation},
                            {"genome", g.genome_hex},
                            {"levels", g.levels},
                            {"per_level", g.per_level},
                            {"f", g.fitness},
                            {"estimate", detail::estimate_json(g.estimate)},
                            {"replacements", g.replacements}});
        nlohmann::json best = nlohmann::json::array();
        for (const auto& b : report.best)
            best.push_back({{"notation", b.notation},
                            {"genome", b.genome_hex},
                            {"levels", b.procedure.levels.value_or(cfg.layout.fixed_levels)},
                            {"per_level", b.procedure.per_level.value_or(cfg.layout.fixed_per_level)},
                            {"operators", b.procedure.operator_count()},
                            {"f", b.fitness},
                            {"f1", b.f1},
                            {"estimate", detail::estimate_json(b.estimate)},
                            {"first_generation", b.first_generation}});
        nlohmann::json body = {{"critical_errors", detail::critical_json(report.critical)},
                               {"seed", report.params.seed},
                               {"generations", std::move(gens)},
                               {"best", std::move(best)}};
        if (report.params.record_replacements) {
            nlohmann::json events = nlohmann::json::array();
            for (const auto& e : report.replacements)
                events.push_back({{"generation", e.generation},
                                  {"pair", e.pair},
                                  {"parent_f", e.parent_fitness},
                                  {"child_f", e.child_fitness},
                                  {"parent_operators", e.parent_operators},
                                  {"child_operators", e.child_operators},
                                  {"replaced", e.replaced},
                                  {"matching_distance", e.chosen_distance},
                                  {"alternative_distance", e.alternative_distance}});
            body["replacements"] = std::move(events);
        }
        return detail::document("design", cfg, std::move(body));
    }
    std::string out = detail::csv_preamble("design", cfg);
    out += "# critical k_re " + detail::fixed6(report.critical.k_re) + " delta_se " +
           detail::fixed6(report.critical.delta_se) + "\n# generations\n";
    out += detail::csv_row({"generation", "notation", "genome", "levels", "per_level", "f", "p_re", "p_se", "p_fr",
                            "replacements"});
    for (const auto& g : report.generations)
        out += detail::csv_row({std::to_string(g.generation), g.notation, g.genome_hex, std::to_string(g.levels),
                                std::to_string(g.per_level), detail::fixed6(g.fitness), detail::fixed6(g.estimate.p_re),
                                detail::fixed6(g.estimate.p_se), detail::fixed6(g.estimate.p_fr),
                                std::to_string(g.replacements)});
    out += "# best\n";
    out += detail::csv_row({"rank", "notation", "genome", "levels", "per_level", "operators", "f", "f1", "p_re", "p_se",
                            "p_fr", "first_generation"});
    int rank = 0;
    for (const auto& b : report.best)
        out += detail::csv_row({std::to_string(++rank), b.notation, b.genome_hex,
                                std::to_string(b.procedure.levels.value_or(cfg.layout.fixed_levels)),
                                std::to_string(b.procedure.per_level.value_or(cfg.layout.fixed_per_level)),
                                std::to_string(b.procedure.operator_count()), detail::fixed6(b.fitness),
                                detail::fixed6(b.f1), detail::fixed6(b.estimate.p_re), detail::fixed6(b.estimate.p_se),
                                detail::fixed6(b.estimate.p_fr), std::to_string(b.first_generation)});
    return out;
}

inline std::string render_library(const JobConfig& cfg, const std::vector<LibraryEntry>& lib, OutputFormat format) {
    if (format == OutputFormat::Doc) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& e : lib)
            rows.push_back({{"name", e.name},
                            {"notation", canonical_notation(e.procedure)},
                            {"source", e.source == LibrarySource::Builtin ? "builtin" : "file"},
                            {"note", e.note}});
        return detail::document("list-library", cfg, {{"entries", std::move(rows)}});
    }
    std::string out = detail::csv_preamble("list-library", cfg) + detail::csv_row({"name", "notation", "source", "note"});
    for (const auto& e : lib)
        out += detail::csv_row({e.name, canonical_notation(e.procedure),
                                e.source == LibrarySource::Builtin ? "builtin" : "file", e.note});
    return out;
}

} // namespace qcga
