#pragma once

// Random generators shared by the property tests.

#include <cstdint>

#include "qcga/genome.hpp"
#include "qcga/rng.hpp"
#include "qcga/rules.hpp"

namespace qcga::test_support {

inline Rule random_rule(RandomStream& rng) {
    Rule r;
    r.kind = static_cast<RuleKind>(rng.next_below(4));
    const int lo = min_window(r.kind);
    r.n = lo + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(kMaxWindow - lo + 1)));
    r.limit = static_cast<double>(rng.next_below(64)) / 10.0;
    return r;
}

/// A valid procedure with 0..layout.max_rules rules that fits `layout`.
inline Procedure random_procedure(RandomStream& rng, const GenomeLayout& layout) {
    Procedure p;
    const auto count = rng.next_below(static_cast<std::uint64_t>(layout.max_rules) + 1);
    for (std::uint64_t i = 0; i < count; ++i) {
        p.rules.push_back(random_rule(rng));
        if (i > 0)
            p.operators.push_back({rng.next_below(2) ? OpKind::Or : OpKind::And, static_cast<int>(rng.next_below(4))});
    }
    p.levels = layout.optimize_levels ? 1 + static_cast<int>(rng.next_below(2)) : layout.fixed_levels;
    p.per_level = layout.optimize_per_level ? 1 + static_cast<int>(rng.next_below(4)) : layout.fixed_per_level;
    return p;
}

inline Genome random_genome(RandomStream& rng, const GenomeLayout& layout) {
    std::vector<std::uint8_t> bits(genome_length(layout));
    for (auto& b : bits) b = rng.next_uniform() < 0.5 ? 0 : 1;
    return {layout, std::move(bits)};
}

} // namespace qcga::test_support
