#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include "fkdet/group_ring.hpp"

namespace fkdet {

/// Laurent polynomial on the d-torus, d <= 3, viewed from an element of Z[Z^d].
class TorusPolynomial {
public:
    using Exponent = std::vector<std::int64_t>;

    TorusPolynomial(int dimension, std::map<Exponent, double> terms);
    explicit TorusPolynomial(const RealElement& f);
    explicit TorusPolynomial(const IntElement& f);

    int dimension() const noexcept { return d_; }
    const std::map<Exponent, double>& terms() const noexcept { return terms_; }
    std::int64_t max_abs_exponent() const noexcept;
    /// 2 pi sum_v |v_axis| |f_v|: bound on |d f-hat / d theta_axis|.
    double lipschitz(int axis) const;

private:
    int d_;
    std::map<Exponent, double> terms_;
};

/// f-hat(theta) = sum_v f_v exp(2 pi i <v, theta>).
std::complex<double> fourier_eval(const TorusPolynomial& p, const std::vector<double>& theta);

enum class WienerVerdict { NonvanishingCertified, GridVanishing, Unknown };

std::string_view to_string(WienerVerdict v) noexcept;

struct WienerResult {
    double grid_min = 0.0;
    std::vector<double> argmin;
    /// grid_min - sum_axis L_axis / (2N), a lower bound for min |f-hat| on the whole torus.
    double certified_lower = 0.0;
    WienerVerdict verdict = WienerVerdict::Unknown;
    int grid = 0;
};

/// Requires N >= 4 (max |exponent| + 1).
WienerResult wiener_invertibility(const TorusPolynomial& p, int grid, unsigned threads = 1);

struct MahlerResult {
    double value = 0.0;
    /// Same average on the 2N grid.
    double value_fine = 0.0;
    /// |value - value_fine|.
    double error_estimate = 0.0;
    int grid = 0;
    WienerResult wiener;
};

/// Trapezoid rule for the integral of log |f-hat| over the torus. Refuses unless
/// the Wiener check at this grid certifies that f-hat does not vanish.
MahlerResult mahler_quadrature(const TorusPolynomial& p, int grid, unsigned threads = 1);

/// Equal-weight average of log |f-hat| on the N^d grid, with pairwise summation.
double grid_log_average(const TorusPolynomial& p, int grid, unsigned threads = 1);

}  // namespace fkdet
