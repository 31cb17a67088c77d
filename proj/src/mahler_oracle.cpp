#include "fkdet/mahler_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>

namespace fkdet {

TorusPolynomial::TorusPolynomial(int dimension, std::map<Exponent, double> terms)
    : d_(dimension), terms_(std::move(terms)) {
    if (d_ < 1 || d_ > 3) throw Error(ErrorCode::Parameter, "torus polynomials support dimensions 1 to 3");
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->first.size() != static_cast<std::size_t>(d_)) {
            throw Error(ErrorCode::DescriptorMismatch, "exponent of the wrong length");
        }
        it = it->second == 0.0 ? terms_.erase(it) : std::next(it);
    }
}

namespace {

std::map<TorusPolynomial::Exponent, double> terms_of(const RealElement& f) {
    if (f.group().kind() != GroupKind::FreeAbelian) {
        throw Error(ErrorCode::DescriptorMismatch, "the Mahler oracle needs an element over Z^d, got " +
                                                       f.group().to_string());
    }
    std::map<TorusPolynomial::Exponent, double> out;
    for (const auto& [g, c] : f.coefficients()) out.emplace(g.coords, c);
    return out;
}

}  // namespace

TorusPolynomial::TorusPolynomial(const RealElement& f) : TorusPolynomial(f.group().rank(), terms_of(f)) {}

TorusPolynomial::TorusPolynomial(const IntElement& f) : TorusPolynomial(convert<double>(f)) {}

std::int64_t TorusPolynomial::max_abs_exponent() const noexcept {
    std::int64_t m = 0;
    for (const auto& [v, c] : terms_)
        for (auto e : v) m = std::max<std::int64_t>(m, std::llabs(e));
    return m;
}

double TorusPolynomial::lipschitz(int axis) const {
    double s = 0.0;
    for (const auto& [v, c] : terms_) s += std::fabs(static_cast<double>(v.at(static_cast<std::size_t>(axis)))) * std::fabs(c);
    return 2.0 * std::numbers::pi * s;
}

std::complex<double> fourier_eval(const TorusPolynomial& p, const std::vector<double>& theta) {
    if (theta.size() != static_cast<std::size_t>(p.dimension())) {
        throw Error(ErrorCode::Parameter, "angle vector has the wrong dimension");
    }
    std::complex<double> s = 0.0;
    for (const auto& [v, c] : p.terms()) {
        double phase = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) phase += static_cast<double>(v[i]) * theta[i];
        // reduce before scaling so large exponents keep their accuracy
        phase -= std::floor(phase);
        s += c * std::polar(1.0, 2.0 * std::numbers::pi * phase);
    }
    return s;
}

std::string_view to_string(WienerVerdict v) noexcept {
    switch (v) {
        case WienerVerdict::NonvanishingCertified: return "nonvanishing-certified";
        case WienerVerdict::GridVanishing: return "grid-vanishing";
        case WienerVerdict::Unknown: return "unknown";
    }
    return "unknown";
}

namespace {

// |f-hat| at every point of the N^d grid, flattened with the first axis slowest.
std::vector<double> grid_abs(const TorusPolynomial& p, int N, unsigned threads) {
    if (N < 1) throw Error(ErrorCode::Parameter, "grid size must be positive");
    const int d = p.dimension();
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(N);
    // roots of unity w^k, k mod N; exponents enter through (v * k) mod N, exactly
    std::vector<std::complex<double>> roots(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) roots[static_cast<std::size_t>(k)] = std::polar(1.0, 2.0 * std::numbers::pi * k / N);
    std::vector<std::pair<TorusPolynomial::Exponent, double>> terms(p.terms().begin(), p.terms().end());
    for (auto& [v, c] : terms)
        for (auto& e : v) e = ((e % N) + N) % N;

    std::vector<double> out(total);
    const std::size_t outer = static_cast<std::size_t>(N);
    const std::size_t inner = total / outer;
    auto work = [&](std::size_t lo, std::size_t hi) {
        std::vector<std::int64_t> idx(static_cast<std::size_t>(d));
        for (std::size_t flat = lo * inner; flat < hi * inner; ++flat) {
            std::size_t r = flat;
            for (int a = d - 1; a >= 0; --a) {
                idx[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(r % static_cast<std::size_t>(N));
                r /= static_cast<std::size_t>(N);
            }
            std::complex<double> s = 0.0;
            for (const auto& [v, c] : terms) {
                std::int64_t k = 0;
                for (std::size_t a = 0; a < v.size(); ++a) k += v[a] * idx[a];
                s += c * roots[static_cast<std::size_t>(k % N)];
            }
            out[flat] = std::abs(s);
        }
    };
    const std::size_t nt = std::clamp<std::size_t>(threads, 1, outer);
    if (nt == 1) {
        work(0, outer);
    } else {
        std::vector<std::future<void>> futs;
        for (std::size_t t = 0; t < nt; ++t) futs.push_back(std::async(std::launch::async, work, outer * t / nt, outer * (t + 1) / nt));
        for (auto& f : futs) f.get();
    }
    return out;
}

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

}  // namespace

WienerResult wiener_invertibility(const TorusPolynomial& p, int grid, unsigned threads) {
    const std::int64_t need = 4 * (p.max_abs_exponent() + 1);
    if (grid < need) {
        throw Error(ErrorCode::Parameter, "grid " + std::to_string(grid) + " is below 4 (max |exponent| + 1) = " +
                                              std::to_string(need));
    }
    const auto vals = grid_abs(p, grid, threads);
    WienerResult out;
    out.grid = grid;
    const auto it = std::min_element(vals.begin(), vals.end());
    out.grid_min = *it;
    std::size_t r = static_cast<std::size_t>(it - vals.begin());
    out.argmin.assign(static_cast<std::size_t>(p.dimension()), 0.0);
    for (int a = p.dimension() - 1; a >= 0; --a) {
        out.argmin[static_cast<std::size_t>(a)] = static_cast<double>(r % static_cast<std::size_t>(grid)) / grid;
        r /= static_cast<std::size_t>(grid);
    }
    // every angle lies within 1/(2N) of a grid point in each axis
    double slack = 0.0;
    for (int a = 0; a < p.dimension(); ++a) slack += p.lipschitz(a) / (2.0 * grid);
    out.certified_lower = out.grid_min - slack;
    if (out.certified_lower > 0.0) {
        out.verdict = WienerVerdict::NonvanishingCertified;
    } else if (out.grid_min <= 1e-12) {
        out.verdict = WienerVerdict::GridVanishing;
    } else {
        out.verdict = WienerVerdict::Unknown;
    }
    return out;
}

double grid_log_average(const TorusPolynomial& p, int grid, unsigned threads) {
    auto vals = grid_abs(p, grid, threads);
    for (auto& v : vals) v = std::log(v);
    return pairwise_sum(vals.data(), vals.size()) / static_cast<double>(vals.size());
}

MahlerResult mahler_quadrature(const TorusPolynomial& p, int grid, unsigned threads) {
    MahlerResult out;
    out.grid = grid;
    out.wiener = wiener_invertibility(p, grid, threads);
    if (out.wiener.verdict != WienerVerdict::NonvanishingCertified) {
        throw Error(ErrorCode::Precondition, "f-hat is not certified nonvanishing at grid " + std::to_string(grid) +
                                                 " (verdict " + std::string(to_string(out.wiener.verdict)) +
                                                 "); the log integrand may be singular");
    }
    out.value = grid_log_average(p, grid, threads);
    out.value_fine = grid_log_average(p, 2 * grid, threads);
    out.error_estimate = std::fabs(out.value - out.value_fine);
    return out;
}

}  // namespace fkdet
