#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fkdet/group_ring.hpp"
#include "fkdet/groups.hpp"
#include "fkdet/inversion.hpp"

namespace fkdet {

/// [a, b] containing the spectrum of rho_g and of every rho_{g^(n)}.
struct SpectralInterval {
    double a = 0.0;
    double b = 0.0;
    /// The bound on ||g^{-1}||_1 that produced a.
    double inverse_norm_bound = 0.0;
    /// Set when b - a <= 1e-12 b; the interval is then widened to [b (1 - 1e-12), b].
    bool point = false;
    /// log(b / a) before widening: the error of the constant log b on a point interval.
    double point_spread = 0.0;
};

/// From a certificate for g itself: a = 1 / (||g_approx^{-1}||_1 + tail), b = ||g||_1.
SpectralInterval spectral_interval(const RealElement& g, const InvertibilityCertificate& cert_g);

/// Interval for g = f f* from a certificate for f, using ||g^{-1}||_1 <= ||f^{-1}||_1^2.
SpectralInterval spectral_interval_for_factor(const RealElement& f, const InvertibilityCertificate& cert_f);

/// Builds [a, b] directly, widening a (near-)point by a relative 1e-12.
SpectralInterval make_interval(double a, double b);

struct LogPolynomial {
    int degree = 0;
    SpectralInterval interval;
    /// Chebyshev coefficients on the interval mapped to [-1, 1].
    std::vector<double> coeffs;
    /// Twice the sampled maximum of |log t - Q(t)| over 10 d points of the interval.
    double sup_error = 0.0;

    double operator()(double t) const;
};

LogPolynomial chebyshev_log(const SpectralInterval& interval, int degree);

/// Coefficient at the identity.
double trace_identity_coeff(const RealElement& h);

struct ChebEstimate {
    double value = 0.0;
    double error_bar = 0.0;
    double sup_error = 0.0;
    /// sum_k |c_k| slack_k in direct mode, zero on quotients.
    double truncation_term = 0.0;
    int degree = 0;
    int radius = -1;
    std::size_t order = 0;
};

/// (1/2) tr Q(g) for g = f f* on a finite quotient, by the three-term recurrence on dense vectors.
ChebEstimate entropy_cheb(const RealElement& f, const FiniteQuotient& q, const LogPolynomial& poly);

/// Same on the infinite group, truncating every recurrence term to the ball of radius R.
ChebEstimate entropy_cheb(const RealElement& f, int radius, const LogPolynomial& poly);

using ChebWhere = std::variant<FiniteQuotient, int>;

struct AdaptiveCheb {
    ChebEstimate estimate;
    /// One entry per degree tried.
    std::vector<ChebEstimate> history;
    bool target_met = false;
};

/// Doubles the degree from `start_degree` until the error bar is below `bar_target` or `max_degree` is reached.
AdaptiveCheb entropy_cheb_adaptive(const RealElement& f, const ChebWhere& where, const SpectralInterval& interval,
                                   double bar_target = 1e-6, int start_degree = 64, int max_degree = 1024);

struct StabilizationReport {
    Integer exact_trace;
    std::vector<Integer> level_traces;
    /// First level from which every level trace equals the exact trace.
    std::optional<std::size_t> stable_level;
    /// First level separating supp(Q(f)) and the identity.
    std::optional<std::size_t> separation_level;
    bool flagged = false;
    std::vector<std::string> notes;
};

/// Compares tr Q(f) with tr Q(f^(n)) along the chain; Q has coefficients q[0] + q[1] t + ...
StabilizationReport trace_stabilization(const IntElement& f, const std::vector<Integer>& q, const QuotientChain& chain);

}  // namespace fkdet
