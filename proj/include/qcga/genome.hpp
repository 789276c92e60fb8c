#pragma once

/// @file genome.hpp
/// @brief Fixed-width bit-string encoding of QC procedures.
///
/// Layout, most-significant bit first within each field:
///
///     rule slot (11 bits) x q : flag | kind(2) | n code(2) | limit code(6)
///     operator slot (3 bits) x (q-1) : kind | priority(2)
///     [level bit]             when levels are optimized: 0 -> 1 level, 1 -> 2 levels
///     [count bits(2)]         when measurements per level are optimized: u -> u+1
///
/// Every bit pattern of the right length decodes to a valid (possibly empty) procedure.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qcga/errors.hpp"
#include "qcga/rules.hpp"

namespace qcga {

inline constexpr int kRuleBits = 11;
inline constexpr int kOperatorBits = 3;
inline constexpr int kLimitCodeMax = 63;

struct GenomeLayout {
    int max_rules = 3;
    bool optimize_levels = true;
    bool optimize_per_level = false;
    int fixed_levels = 2;
    int fixed_per_level = 1;

    void validate() const {
        if (max_rules < 1) throw InvalidArgument("layout.max_rules must be >= 1");
        if (fixed_levels < 1 || fixed_levels > kMaxLevels)
            throw InvalidArgument("layout.fixed_levels must be 1 or 2");
        if (fixed_per_level < 1 || fixed_per_level > kMaxPerLevel)
            throw InvalidArgument("layout.fixed_per_level must lie in [1,4]");
    }

    friend bool operator==(const GenomeLayout&, const GenomeLayout&) = default;
};

inline std::size_t genome_length(const GenomeLayout& layout) {
    const auto q = static_cast<std::size_t>(layout.max_rules);
    return kRuleBits * q + kOperatorBits * (q - 1) + (layout.optimize_levels ? 1 : 0) +
           (layout.optimize_per_level ? 2 : 0);
}

/// Bits stored one per byte (0 or 1).
class Genome {
public:
    Genome() = default;

    Genome(GenomeLayout layout, std::vector<std::uint8_t> bits) : layout_(layout), bits_(std::move(bits)) {
        layout_.validate();
        if (bits_.size() != genome_length(layout_))
            throw InvalidArgument("genome length " + std::to_string(bits_.size()) + " does not match layout length " +
                                  std::to_string(genome_length(layout_)));
        for (auto& b : bits_) b = b ? 1 : 0;
    }

    static Genome zeros(const GenomeLayout& layout) {
        return {layout, std::vector<std::uint8_t>(genome_length(layout), 0)};
    }

    [[nodiscard]] const GenomeLayout& layout() const noexcept { return layout_; }
    [[nodiscard]] std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    [[nodiscard]] std::size_t size() const noexcept { return bits_.size(); }
    [[nodiscard]] bool bit(std::size_t i) const { return bits_.at(i) != 0; }
    void set(std::size_t i, bool value) { bits_.at(i) = value ? 1 : 0; }
    void flip(std::size_t i) { bits_.at(i) ^= 1U; }

    /// Bits as a '0'/'1' string; a convenient map key.
    [[nodiscard]] std::string bit_string() const {
        std::string s(bits_.size(), '0');
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) s[i] = '1';
        return s;
    }

    /// "0x" followed by the bits read as one unsigned number, MSB first, left-padded to
    /// whole hex digits.
    [[nodiscard]] std::string hex() const {
        static constexpr char digits[] = "0123456789abcdef";
        const std::size_t pad = (4 - bits_.size() % 4) % 4;
        std::string out = "0x";
        unsigned nibble = 0;
        std::size_t filled = pad;
        for (auto b : bits_) {
            nibble = (nibble << 1U) | b;
            if (++filled == 4) {
                out.push_back(digits[nibble]);
                nibble = 0;
                filled = 0;
            }
        }
        return out;
    }

    friend bool operator==(const Genome& a, const Genome& b) {
        return a.layout_ == b.layout_ && a.bits_ == b.bits_;
    }

private:
    GenomeLayout layout_;
    std::vector<std::uint8_t> bits_;
};

namespace detail {

inline unsigned read_field(std::span<const std::uint8_t> bits, std::size_t pos, int width) {
    unsigned v = 0;
    for (int i = 0; i < width; ++i) v = (v << 1U) | bits[pos + static_cast<std::size_t>(i)];
    return v;
}

inline void write_field(std::vector<std::uint8_t>& bits, std::size_t pos, int width, unsigned value) {
    for (int i = width - 1; i >= 0; --i) {
        bits[pos + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value & 1U);
        value >>= 1U;
    }
}

inline std::size_t rule_offset(int slot) { return static_cast<std::size_t>(slot) * kRuleBits; }

inline std::size_t operator_offset(const GenomeLayout& layout, int slot) {
    return static_cast<std::size_t>(layout.max_rules) * kRuleBits + static_cast<std::size_t>(slot) * kOperatorBits;
}

inline std::size_t tail_offset(const GenomeLayout& layout) {
    return operator_offset(layout, layout.max_rules - 1);
}

inline double limit_from_code(unsigned code) { return static_cast<double>(code) / 10.0; }

} // namespace detail

/// Decodes a genome. Operator slot i-1 joins rule slot i to the preceding included rule;
/// operator slots not joining two included rules are dropped.
inline Procedure decode(const Genome& genome) {
    const GenomeLayout& layout = genome.layout();
    if (genome.size() != genome_length(layout)) throw InvalidArgument("genome length does not match layout");
    const auto bits = genome.bits();

    Procedure proc;
    for (int slot = 0; slot < layout.max_rules; ++slot) {
        const std::size_t at = detail::rule_offset(slot);
        if (!bits[at]) continue;
        const auto kind = static_cast<RuleKind>(detail::read_field(bits, at + 1, 2));
        const int u = static_cast<int>(detail::read_field(bits, at + 3, 2));
        const int n = kind == RuleKind::SingleValue ? u + 1 : std::max(2, u + 1);
        const double limit = detail::limit_from_code(detail::read_field(bits, at + 5, 6));
        if (!proc.rules.empty()) {
            const std::size_t op_at = detail::operator_offset(layout, slot - 1);
            proc.operators.push_back({bits[op_at] ? OpKind::Or : OpKind::And,
                                      static_cast<int>(detail::read_field(bits, op_at + 1, 2))});
        }
        proc.rules.push_back({kind, n, limit});
    }

    std::size_t tail = detail::tail_offset(layout);
    if (layout.optimize_levels) {
        proc.levels = bits[tail] ? 2 : 1;
        ++tail;
    } else {
        proc.levels = layout.fixed_levels;
    }
    proc.per_level = layout.optimize_per_level ? static_cast<int>(detail::read_field(bits, tail, 2)) + 1
                                               : layout.fixed_per_level;
    return proc;
}

/// Encodes a procedure: rules fill slots 1..r with their flag set, connecting operators
/// fill operator slots 1..r-1, everything else is zero.
inline Genome encode(const Procedure& procedure, const GenomeLayout& layout) {
    layout.validate();
    if (procedure.rules.size() > static_cast<std::size_t>(layout.max_rules))
        throw InvalidArgument("procedure has more rules than the layout allows");
    if (!procedure.rules.empty() && procedure.operators.size() + 1 != procedure.rules.size())
        throw InvalidArgument("procedure needs exactly one operator between consecutive rules");

    std::vector<std::uint8_t> bits(genome_length(layout), 0);
    for (std::size_t i = 0; i < procedure.rules.size(); ++i) {
        const Rule& rule = procedure.rules[i];
        if (!within_bounds(rule)) throw InvalidArgument("rule " + to_string(rule) + " outside class bounds");
        const double tenths = rule.limit * 10.0;
        const auto code = static_cast<long>(std::lround(tenths));
        if (std::fabs(tenths - static_cast<double>(code)) > 1e-9 || code < 0 || code > kLimitCodeMax)
            throw InvalidArgument("limit " + format_limit(rule.limit) + " is not on the 0.1 grid");
        const std::size_t at = detail::rule_offset(static_cast<int>(i));
        bits[at] = 1;
        detail::write_field(bits, at + 1, 2, static_cast<unsigned>(rule.kind));
        detail::write_field(bits, at + 3, 2, static_cast<unsigned>(rule.n - 1));
        detail::write_field(bits, at + 5, 6, static_cast<unsigned>(code));
    }
    for (std::size_t i = 0; i < procedure.operators.size(); ++i) {
        const Operator& op = procedure.operators[i];
        if (op.priority < 0 || op.priority > kMaxPriority) throw InvalidArgument("operator priority out of range");
        const std::size_t at = detail::operator_offset(layout, static_cast<int>(i));
        bits[at] = op.kind == OpKind::Or ? 1 : 0;
        detail::write_field(bits, at + 1, 2, static_cast<unsigned>(op.priority));
    }

    std::size_t tail = detail::tail_offset(layout);
    const int levels = procedure.levels.value_or(layout.fixed_levels);
    const int per_level = procedure.per_level.value_or(layout.fixed_per_level);
    if (layout.optimize_levels) {
        if (levels < 1 || levels > kMaxLevels) throw InvalidArgument("levels must be 1 or 2");
        bits[tail++] = levels == 2 ? 1 : 0;
    } else if (levels != layout.fixed_levels) {
        throw InvalidArgument("procedure levels differ from the layout's fixed levels");
    }
    if (layout.optimize_per_level) {
        if (per_level < 1 || per_level > kMaxPerLevel) throw InvalidArgument("measurements per level must lie in [1,4]");
        detail::write_field(bits, tail, 2, static_cast<unsigned>(per_level - 1));
    } else if (per_level != layout.fixed_per_level) {
        throw InvalidArgument("procedure measurements per level differ from the layout's fixed value");
    }
    return {layout, std::move(bits)};
}

inline std::size_t hamming_distance(const Genome& a, const Genome& b) {
    if (a.size() != b.size()) throw InvalidArgument("hamming_distance requires equal lengths");
    std::size_t d = 0;
    const auto x = a.bits();
    const auto y = b.bits();
    for (std::size_t i = 0; i < x.size(); ++i) d += x[i] != y[i] ? 1 : 0;
    return d;
}

} // namespace qcga
