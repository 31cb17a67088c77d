#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fkdet/group_ring.hpp"
#include "fkdet/groups.hpp"

namespace fkdet {

enum class Verdict { InvertibleCertified, NonInvertibleCertified, Unknown };

std::string_view to_string(Verdict v) noexcept;

struct RefinementStep {
    std::string kind;  // seed, newton, correction
    int radius = 0;
    double residual = 0.0;
    /// l1 mass of coefficients dropped by truncation in this step, times ||f||_1.
    double truncation_slack = 0.0;
};

struct InvertibilityCertificate {
    Verdict verdict = Verdict::Unknown;
    std::optional<RealElement> approx_inverse;
    /// delta = ||e(1) - g f||_1, including a floating-point rounding bound.
    double residual = 0.0;
    std::optional<FiniteQuotient> witness_quotient;
    std::optional<std::size_t> witness_level;
    /// ||f^{-1} - g||_1 <= ||g||_1 delta / (1 - delta).
    double tail_bound = 0.0;
    int support_radius = 0;
    std::string method;
    std::vector<RefinementStep> history;
    std::vector<std::string> notes;
};

int default_radius_cap(const GroupDescriptor& group);

struct InversionOptions {
    /// Defaults to default_radius_cap(group).
    std::optional<int> max_radius;
    /// Largest quotient used for the lifted seed when no coefficient dominates.
    std::size_t lift_order_cap = 1024;
    /// Word balls up to this size are refined by Newton steps on sparse maps;
    /// larger ones by defect correction on indexed arrays.
    std::size_t newton_ball_limit = 5000;
    std::size_t ball_cap = kDefaultBallCap;
};

/// Two-track certificate, track one: searches for a finitely supported g with
/// ||e(1) - g f||_1 < 1, which certifies that f is a unit of L^1.
InvertibilityCertificate certify_invertible(const RealElement& f, double target_residual = 1e-12,
                                            const InversionOptions& options = {});
InvertibilityCertificate certify_invertible(const IntElement& f, double target_residual = 1e-12,
                                            const InversionOptions& options = {});

struct NoninvertibleOptions {
    /// Levels up to this order are decided by exact determinants.
    std::size_t exact_order_cap = 160;
    /// Levels up to this order are screened by rank modulo a large prime.
    std::size_t modular_order_cap = 512;
};

/// Track two: a singular quotient operator witnesses that f is not a unit.
InvertibilityCertificate detect_noninvertible(const IntElement& f, const QuotientChain& chain,
                                              const NoninvertibleOptions& options = {});

struct L1Inverse {
    RealElement inverse;
    double tail_bound = 0.0;
    double residual = 0.0;
    int radius = 0;
};

/// Raised when the requested tail bound cannot be met inside the radius cap.
class TailTargetUnreachable : public Error {
public:
    TailTargetUnreachable(double best, const std::string& message)
        : Error(ErrorCode::Capacity, message), best_bound_(best) {}
    double best_bound() const noexcept { return best_bound_; }

private:
    double best_bound_;
};

/// Truncated f^{-1} with certified l1 tail bound <= tail_target.
L1Inverse l1_inverse(const RealElement& f, double tail_target = 1e-12, const InversionOptions& options = {});
L1Inverse l1_inverse(const InvertibilityCertificate& cert);

/// Residual ||e(1) - g f||_1 together with a bound on its floating-point error.
double certified_residual(const RealElement& g, const RealElement& f);

struct DecayProfile {
    std::vector<int> radii;
    std::vector<double> shell_max;
    /// Least-squares slope of log(shell max) against radius.
    double rate = 0.0;
    double intercept = 0.0;
    /// Root-mean-square residual of the fit.
    double fit_residual = 0.0;
    std::size_t fitted_shells = 0;
};

/// Shell maxima of |w| over word-metric spheres and their exponential fit.
/// Shells whose maximum is at or below `noise_floor` are excluded from the fit.
DecayProfile decay_profile(const RealElement& w, std::span<const GroupElement> generators, double noise_floor = 0.0);
DecayProfile decay_profile(const RealElement& w, double noise_floor = 0.0);

}  // namespace fkdet
