#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fkdet/group_ring.hpp"
#include "fkdet/groups.hpp"
#include "fkdet/inversion.hpp"
#include "fkdet/quotient_transfer.hpp"

namespace fkdet {

enum class EntropyMethod { Dense, Exact, Cheb, Mahler };

std::string_view to_string(EntropyMethod m) noexcept;

/// log|det| by pivoted factorization; -infinity when a pivot is exactly zero.
/// Cholesky is tried first for symmetric input and falls back to LU.
double logdet_dense(const Eigen::MatrixXd& m, bool symmetric = false);
double logdet_dense(const QuotientOperator& op);

/// (1/|G|) log|det rho_{f^(n)}|.
double entropy_at_level(const RealElement& f, const FiniteQuotient& q, std::size_t dense_cap = kDenseCap);
double entropy_at_level(const IntElement& f, const FiniteQuotient& q, std::size_t dense_cap = kDenseCap);

/// |Fix_{Gamma_n}(X_f)| = |det rho_{f^(n)}|, or no value when the fixed group is infinite.
struct FixedPointCount {
    std::optional<Integer> count;
    bool infinite() const noexcept { return !count.has_value(); }
};

FixedPointCount fixed_points_exact(const IntElement& f, const FiniteQuotient& q, std::size_t dense_cap = 512);

struct EntropyRow {
    std::size_t level = 0;
    std::size_t order = 0;
    std::vector<std::int64_t> moduli;
    EntropyMethod method = EntropyMethod::Dense;
    double value = 0.0;
    double error_bar = 0.0;
    double wall_ms = 0.0;
    std::optional<Integer> fixed_points;
    bool flagged = false;
};

struct EntropyBracket {
    double lower = 0.0;
    double upper = 0.0;
    /// (1/k) log ||f^k||_1 for k = 1, 2, ...
    std::vector<double> upper_sequence;
    /// -(1/k) log of the bound on ||(f^{-1})^k||_1.
    std::vector<double> lower_sequence;
};

struct EntropyReport {
    std::vector<EntropyRow> rows;
    std::optional<EntropyBracket> bracket;
    double estimate = 0.0;
    bool cauchy_fired = false;
    double final_gap = 0.0;
    /// Set when f was not certified invertible; values are then not tied to h(alpha_f).
    bool advisory = false;
    /// Heuristic value + C/order extrapolation from the last two rows, only on request.
    std::optional<double> richardson;
    /// Whether consecutive values were nondecreasing (recorded, never asserted).
    bool monotone = true;
    std::vector<std::string> notes;
};

struct ConvergeOptions {
    std::size_t max_levels = static_cast<std::size_t>(-1);
    double cauchy_tol = 1e-8;
    bool richardson = false;
    std::size_t dense_cap = kDenseCap;
    /// Levels up to this order also get an exact fixed-point count.
    std::size_t exact_order_cap = 0;
    unsigned threads = 1;
    int power_iters = 4;
    /// Reuses a certificate instead of running certify_invertible.
    std::optional<InvertibilityCertificate> certificate;
};

EntropyReport entropy_converge(const IntElement& f, const QuotientChain& chain, const ConvergeOptions& options = {});

/// log ||f^{-1}||_1^{-1} <= ... <= h_f <= ... <= log ||f||_1, sharpened over powers up to power_iters.
EntropyBracket entropy_bounds(const RealElement& f, const InvertibilityCertificate& cert, int power_iters = 4);

struct SeparatedSetWitness {
    /// log 2 / |Gamma / Gamma_n|.
    double bound = 0.0;
    GroupElement gamma0;
    /// d(x~_{gamma0}, 0), lowered by the certificate tail.
    double base_distance = 0.0;
    /// Smallest separation observed over all pairs, already lowered by the tail.
    double min_separation = 0.0;
    /// Kernel elements used as Omega'.
    std::vector<GroupElement> shifts;
    std::vector<GroupElement> window;
    std::size_t points = 0;
};

/// Builds the 2^{|Omega'|} sums of translated homoclinic points and verifies
/// they are pairwise separated by more than d(x~_{gamma0}, 0) / 2.
SeparatedSetWitness separated_lower_bound(const IntElement& f, const FiniteQuotient& q,
                                          const std::optional<InvertibilityCertificate>& cert = {},
                                          std::size_t max_shifts = 8);

}  // namespace fkdet
