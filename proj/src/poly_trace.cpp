#include "fkdet/poly_trace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fkdet/quotient_transfer.hpp"

namespace fkdet {

SpectralInterval make_interval(double a, double b) {
    if (!(a > 0.0)) throw Error(ErrorCode::Parameter, "spectral interval needs a > 0");
    if (!(b >= a) || !std::isfinite(b)) throw Error(ErrorCode::Parameter, "spectral interval needs a <= b < inf");
    SpectralInterval out;
    out.b = b;
    out.a = a;
    out.inverse_norm_bound = 1.0 / a;
    if (b - a <= 1e-12 * b) {
        out.point = true;
        out.point_spread = std::log(b / a);
        out.a = b * (1.0 - 1e-12);
    }
    return out;
}

namespace {

void require_certified(const InvertibilityCertificate& cert) {
    if (cert.verdict != Verdict::InvertibleCertified || !cert.approx_inverse) {
        throw Error(ErrorCode::Precondition, "spectral interval needs a certified inverse");
    }
}

}  // namespace

SpectralInterval spectral_interval(const RealElement& g, const InvertibilityCertificate& cert_g) {
    require_certified(cert_g);
    const double inv = norm_l1(*cert_g.approx_inverse) + cert_g.tail_bound;
    // ||rho_g|| <= ||g||_1 and ||rho_g^{-1}|| <= ||g^{-1}||_1, so the spectrum lies in [1/inv, ||g||_1]
    double a = 1.0 / inv;
    const double b = norm_l1(g);
    if (a > b) a = b;  // rounding at a point spectrum
    SpectralInterval out = make_interval(a, b);
    out.inverse_norm_bound = inv;
    return out;
}

SpectralInterval spectral_interval_for_factor(const RealElement& f, const InvertibilityCertificate& cert_f) {
    require_certified(cert_f);
    const double finv = norm_l1(*cert_f.approx_inverse) + cert_f.tail_bound;
    const double inv = finv * finv;
    double a = 1.0 / inv;
    const double b = norm_l1(f * involute(f));
    if (a > b) a = b;
    SpectralInterval out = make_interval(a, b);
    out.inverse_norm_bound = inv;
    return out;
}

namespace {

double to_unit(const SpectralInterval& I, double t) { return (2.0 * t - I.a - I.b) / (I.b - I.a); }

double clenshaw(const std::vector<double>& c, double x) {
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
        const double b0 = 2.0 * x * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return x * b1 - b2 + c[0];
}

}  // namespace

double LogPolynomial::operator()(double t) const {
    if (interval.point) return coeffs[0];
    return clenshaw(coeffs, to_unit(interval, t));
}

LogPolynomial chebyshev_log(const SpectralInterval& I, int degree) {
    if (degree < 1) throw Error(ErrorCode::Parameter, "degree must be >= 1");
    if (!(I.a > 0.0)) throw Error(ErrorCode::Parameter, "log interval needs a > 0");
    LogPolynomial p;
    p.degree = degree;
    p.interval = I;
    if (I.point) {
        // the spectrum sits within point_spread of b in log scale: Q is the constant log b
        p.coeffs.assign(static_cast<std::size_t>(degree) + 1, 0.0);
        p.coeffs[0] = std::log(I.b);
        p.sup_error = I.point_spread;
        return p;
    }
    const std::size_t n = static_cast<std::size_t>(degree) + 1;
    std::vector<double> fx(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = std::cos(std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(n));
        fx[j] = std::log(0.5 * (I.b - I.a) * x + 0.5 * (I.a + I.b));
    }
    p.coeffs.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            s += fx[j] * std::cos(std::numbers::pi * static_cast<double>(k) * (static_cast<double>(j) + 0.5) /
                                  static_cast<double>(n));
        }
        p.coeffs[k] = 2.0 * s / static_cast<double>(n);
    }
    p.coeffs[0] *= 0.5;
    // sampled sup on a Chebyshev-extreme grid (endpoints included), with safety factor 2
    const std::size_t m = std::max<std::size_t>(10 * static_cast<std::size_t>(degree), 2);
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(m - 1));
        const double t = 0.5 * (I.b - I.a) * x + 0.5 * (I.a + I.b);
        worst = std::max(worst, std::fabs(std::log(t) - clenshaw(p.coeffs, x)));
    }
    p.sup_error = 2.0 * worst;
    return p;
}

double trace_identity_coeff(const RealElement& h) { return trace(h); }

namespace {

// g-bar = (2 g - (a + b) e) / (b - a), so that the spectrum maps into [-1, 1]
RealElement rescale(const RealElement& g, const SpectralInterval& I) {
    RealElement out = g * (2.0 / (I.b - I.a));
    out.add_term_unchecked(g.group().identity(), -(I.a + I.b) / (I.b - I.a));
    return out;
}

void check_finite(double v, int k) {
    if (!std::isfinite(v)) {
        throw Error(ErrorCode::Parameter, "Chebyshev recurrence overflowed at step " + std::to_string(k) +
                                              "; lower the degree or widen the interval");
    }
}

struct ShiftList {
    std::vector<GroupElement> shifts;
    std::vector<double> values;
};

ShiftList shifts_of(const RealElement& h) {
    ShiftList s;
    for (const auto& [g, c] : h.coefficients()) {
        s.shifts.push_back(g);
        s.values.push_back(c);
    }
    return s;
}

}  // namespace

ChebEstimate entropy_cheb(const RealElement& f, const FiniteQuotient& q, const LogPolynomial& poly) {
    ChebEstimate out;
    out.degree = poly.degree;
    out.order = q.order();
    out.sup_error = poly.sup_error;
    if (poly.interval.point) {
        out.value = 0.5 * poly.coeffs[0];
        out.error_bar = 0.5 * poly.sup_error;
        return out;
    }
    const RealElement fq = fibre_integrate(f, q);
    const RealElement gbar = rescale(fq * involute(fq), poly.interval);
    const auto sh = shifts_of(gbar);
    const auto tables = right_shift_tables(q, sh.shifts);
    const std::size_t n = q.order();
    const std::size_t e = q.index_of(q.group().identity());

    // (u g-bar)[index(g_i s)] += u[i] g-bar(s)
    auto times_gbar = [&](const std::vector<double>& u) {
        std::vector<double> out(n, 0.0);
        for (std::size_t s = 0; s < tables.size(); ++s) {
            const double c = sh.values[s];
            const auto& t = tables[s];
            for (std::size_t i = 0; i < n; ++i) out[t[i]] += u[i] * c;
        }
        return out;
    };

    std::vector<double> prev(n, 0.0), cur;
    prev[e] = 1.0;
    double sum = poly.coeffs[0];
    if (poly.degree >= 1) {
        cur = times_gbar(prev);
        sum += poly.coeffs[1] * cur[e];
    }
    for (int k = 2; k <= poly.degree; ++k) {
        std::vector<double> next = times_gbar(cur);
        for (std::size_t i = 0; i < n; ++i) next[i] = 2.0 * next[i] - prev[i];
        check_finite(next[e], k);
        sum += poly.coeffs[static_cast<std::size_t>(k)] * next[e];
        prev = std::move(cur);
        cur = std::move(next);
    }
    out.value = 0.5 * sum;
    out.error_bar = 0.5 * poly.sup_error;
    return out;
}

ChebEstimate entropy_cheb(const RealElement& f, int radius, const LogPolynomial& poly) {
    if (radius < 0) throw Error(ErrorCode::Parameter, "truncation radius must be >= 0");
    ChebEstimate out;
    out.degree = poly.degree;
    out.radius = radius;
    out.sup_error = poly.sup_error;
    if (poly.interval.point) {
        out.value = 0.5 * poly.coeffs[0];
        out.error_bar = 0.5 * poly.sup_error;
        return out;
    }
    const auto& G = f.group();
    const RealElement gbar = rescale(f * involute(f), poly.interval);
    const auto sh = shifts_of(gbar);
    const WordBall ball = word_ball(G, radius);
    const std::size_t n = ball.size();
    const std::size_t ns = sh.shifts.size();
    // table[i * ns + s] = ball index of g_i s, or n when it leaves the ball
    std::vector<std::size_t> table(n * ns);
    GroupElement prod{std::vector<std::int64_t>(G.dimension())};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < ns; ++s) {
            G.multiply_into(ball.elements()[i].coords, sh.shifts[s].coords, prod.coords);
            table[i * ns + s] = ball.index_of(prod).value_or(n);
        }
    }

    // returns the l1 mass that fell outside the ball (an upper bound: contributions are summed in absolute value)
    auto times_gbar = [&](const std::vector<double>& u, std::vector<double>& out) {
        out.assign(n, 0.0);
        double dropped = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (u[i] == 0.0) continue;
            for (std::size_t s = 0; s < ns; ++s) {
                const double v = u[i] * sh.values[s];
                const std::size_t j = table[i * ns + s];
                if (j == n) {
                    dropped += std::fabs(v);
                } else {
                    out[j] += v;
                }
            }
        }
        return dropped;
    };

    // A perturbation D_j of T_j reaches T_k as U_{k-j}(g-bar) D_j, and |tr(U_m(g-bar) D)| <= (m + 1) ||D||_1
    // because the spectrum of g-bar lies in [-1, 1]. slack_k = sum_{j <= k} (k - j + 1) ||D_j||_1.
    double s1 = 0.0, s2 = 0.0, truncation = 0.0;
    std::vector<double> prev(n, 0.0), cur, next;
    prev[0] = 1.0;  // identity leads the ball
    double sum = poly.coeffs[0];
    if (poly.degree >= 1) {
        const double d = times_gbar(prev, cur);
        s1 += d;
        s2 += d;
        sum += poly.coeffs[1] * cur[0];
        truncation += std::fabs(poly.coeffs[1]) * s2;
    }
    for (int k = 2; k <= poly.degree; ++k) {
        const double d = 2.0 * times_gbar(cur, next);
        for (std::size_t i = 0; i < n; ++i) next[i] = 2.0 * next[i] - prev[i];
        check_finite(next[0], k);
        s2 = s2 + s1 + d;
        s1 += d;
        sum += poly.coeffs[static_cast<std::size_t>(k)] * next[0];
        truncation += std::fabs(poly.coeffs[static_cast<std::size_t>(k)]) * s2;
        std::swap(prev, cur);
        std::swap(cur, next);
    }
    out.value = 0.5 * sum;
    out.truncation_term = truncation;
    out.error_bar = 0.5 * (poly.sup_error + truncation);
    return out;
}

AdaptiveCheb entropy_cheb_adaptive(const RealElement& f, const ChebWhere& where, const SpectralInterval& interval,
                                   double bar_target, int start_degree, int max_degree) {
    if (start_degree < 1 || max_degree < start_degree) throw Error(ErrorCode::Parameter, "bad degree range");
    AdaptiveCheb out;
    // TODO: tr T_k(g-bar) does not depend on the degree; keep the moments from the last pass instead of rerunning
    // the recurrence from k = 0 at every doubling.
    for (int d = start_degree;; d = std::min(2 * d, max_degree)) {
        const LogPolynomial poly = chebyshev_log(interval, d);
        ChebEstimate est = std::visit(
            [&](const auto& w) -> ChebEstimate { return entropy_cheb(f, w, poly); }, where);
        out.history.push_back(est);
        out.estimate = est;
        if (est.error_bar <= bar_target) {
            out.target_met = true;
            break;
        }
        if (d == max_degree) break;
    }
    return out;
}

StabilizationReport trace_stabilization(const IntElement& f, const std::vector<Integer>& q, const QuotientChain& chain) {
    if (!(f.group() == chain.parent())) {
        throw Error(ErrorCode::DescriptorMismatch, "chain over " + chain.parent().to_string() + " for element over " +
                                                       f.group().to_string());
    }
    StabilizationReport rep;
    const IntElement qf = evaluate_polynomial(q, f);
    rep.exact_trace = trace(qf);
    for (const auto& level : chain) {
        // evaluated in the quotient ring, not by projecting Q(f)
        rep.level_traces.push_back(trace(evaluate_polynomial(q, fibre_integrate(f, level))));
    }
    std::size_t first = chain.size();
    while (first > 0 && rep.level_traces[first - 1] == rep.exact_trace) --first;
    if (first == chain.size()) {
        rep.flagged = true;
        rep.notes.push_back("no agreement with the exact trace within the chain");
    } else {
        rep.stable_level = first;
    }
    std::vector<GroupElement> K = qf.support();
    K.push_back(f.group().identity());
    try {
        rep.separation_level = verify_chain_separation(chain, K);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ChainTooShort) throw;
        rep.notes.push_back("the chain does not separate supp(Q(f))");
    }
    if (rep.stable_level && rep.separation_level && *rep.stable_level > *rep.separation_level) {
        rep.flagged = true;
        rep.notes.push_back("traces still differ after the separating level");
    }
    return rep;
}

}  // namespace fkdet
