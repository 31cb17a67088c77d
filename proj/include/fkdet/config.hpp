#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fkdet/entropy_core.hpp"
#include "fkdet/group_ring.hpp"
#include "fkdet/groups.hpp"

namespace fkdet {

/// (generator name, exponent) pairs, multiplied left to right.
using Word = std::vector<std::pair<std::string, std::int64_t>>;

enum class OutputFormat { Json, Csv };

std::string_view to_string(OutputFormat f) noexcept;

struct Tolerances {
    double residual = 1e-12;
    double tail = 1e-12;
    double cauchy = 1e-8;
    double cheb_bar = 1e-6;
};

struct ChebSettings {
    int start_degree = 64;
    int max_degree = 1024;
    /// Also run the recurrence on the infinite group, truncated to this ball.
    std::optional<int> radius;
};

struct DecaySettings {
    std::optional<int> radius;
    double tail = 1e-9;
};

struct InvertSettings {
    std::optional<int> max_radius;
    bool emit_inverse = false;
};

struct PointSpec {
    enum class Kind { Zero, Homoclinic, Periodic } kind = Kind::Zero;
    int radius = 24;
    std::vector<std::int64_t> moduli;
    std::size_t index = 0;
};

struct SpecdemoSettings {
    double epsilon = 0.1;
    double tail = 1e-12;
    PointSpec x1;
    PointSpec x2;
    std::vector<GroupElement> c1;
    std::vector<GroupElement> c2;
};

struct JobConfig {
    GroupDescriptor group = GroupDescriptor::free_abelian(1);
    IntElement f{GroupDescriptor::free_abelian(1)};
    /// Moduli of each chain level, one entry per coordinate.
    std::vector<std::vector<std::int64_t>> chain;
    /// Levels for fixcount; need not be nested. Defaults to the chain.
    std::vector<std::vector<std::int64_t>> moduli;
    std::vector<EntropyMethod> methods{EntropyMethod::Dense};
    Tolerances tolerances;
    ChebSettings cheb;
    int mahler_grid = 128;
    DecaySettings decay;
    InvertSettings invert;
    std::size_t enumerate_cap = 0;
    std::optional<SpecdemoSettings> specdemo;
    std::size_t dense_cap = kDenseCap;
    std::size_t exact_order_cap = 512;
    OutputFormat format = OutputFormat::Json;
    std::optional<std::string> out_path;

    bool wants(EntropyMethod m) const;
    QuotientChain quotient_chain() const;
    std::vector<FiniteQuotient> fixcount_levels() const;
};

/// Parses and validates a JSON job description. Failures are Parse errors whose
/// message names the offending field, or the line and column for malformed JSON.
JobConfig parse_config(const std::string& text);
JobConfig load_config(const std::string& path);

GroupElement evaluate_word(const GroupDescriptor& group, const Word& word);

}  // namespace fkdet
