#include "fkdet/inversion.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fkdet/exact_linalg.hpp"
#include "fkdet/quotient_transfer.hpp"

namespace fkdet {

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::InvertibleCertified: return "invertible-certified";
        case Verdict::NonInvertibleCertified: return "noninvertible-certified";
        case Verdict::Unknown: return "unknown";
    }
    return "unknown";
}

namespace {

constexpr double kUnitRoundoff = 0x1p-53;

double gamma_n(std::size_t n) {
    const double nu = static_cast<double>(n) * kUnitRoundoff;
    return nu / (1.0 - nu);
}

bool involves_heisenberg(const GroupDescriptor& G) {
    switch (G.kind()) {
        case GroupKind::Heisenberg3: return true;
        case GroupKind::DirectProduct:
            return std::any_of(G.factors().begin(), G.factors().end(), involves_heisenberg);
        case GroupKind::Quotient: return involves_heisenberg(G.parent());
        default: return false;
    }
}

/// Largest radius <= wanted whose ball stays under the element cap.
int feasible_radius(const GroupDescriptor& G, int wanted, std::size_t cap) {
    auto fits = [&](int r) {
        try {
            word_ball(G, r, cap);
            return true;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Capacity) throw;
            return false;
        }
    };
    if (fits(wanted)) return wanted;
    int lo = 0, hi = wanted;  // fits(lo), !fits(hi)
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        (fits(mid) ? lo : hi) = mid;
    }
    return lo;
}

/// g * h restricted to `ball`, with an upper bound on the l1 mass left out.
std::pair<RealElement, double> product_in_ball(const RealElement& g, const RealElement& h, const WordBall& ball) {
    const auto& G = g.group();
    RealElement out(G);
    double dropped = 0.0;
    GroupElement prod{std::vector<std::int64_t>(G.dimension())};
    for (const auto& [a, ca] : g.coefficients()) {
        for (const auto& [b, cb] : h.coefficients()) {
            G.multiply_into(a.coords, b.coords, prod.coords);
            if (ball.contains(prod)) {
                out.add_term_unchecked(prod, ca * cb);
            } else {
                dropped += std::fabs(ca * cb);
            }
        }
    }
    return {std::move(out), dropped};
}

/// Newton step g <- g (2 e - f g) truncated to `ball`.
std::pair<RealElement, double> newton_step(const RealElement& g, const RealElement& f, const WordBall& ball) {
    RealElement h = RealElement::scalar(g.group(), 2.0) - convolve(f, g);
    return product_in_ball(g, h, ball);
}

struct Refiner {
    const RealElement& f;  // dominant coefficient sits at the identity when used by correction()
    double target;
    int radius_cap;
    const InversionOptions& opt;
    std::vector<RefinementStep>& history;
    double f_norm = norm_l1(f);
    int f_radius = support_radius(f, 1 << 20);

    double residual(const RealElement& g) const { return certified_residual(g, f); }

    /// Newton iteration with radii growing as 2R + L, stopping at the target,
    /// the radius cap, or when the residual stops shrinking.
    RealElement newton(RealElement g, int radius, int work_cap) {
        double delta = residual(g);
        while (delta > target) {
            const int next = std::min(2 * radius + f_radius, work_cap);
            WordBall ball = word_ball(f.group(), next, opt.ball_cap);
            auto [gn, dropped] = newton_step(g, f, ball);
            const double dn = residual(gn);
            history.push_back({"newton", next, dn, dropped * f_norm});
            if (!(dn < delta)) break;
            const bool stalled = next == radius && dn > 0.5 * delta;
            g = std::move(gn);
            delta = dn;
            radius = next;
            if (stalled) break;
        }
        return g;
    }

    /// Defect correction g <- g + (e - g f) / c on an indexed ball, for f with
    /// dominant coefficient c at the identity. Returns the refined element.
    RealElement correction(const RealElement& g0, int radius) {
        const auto& G = f.group();
        const double c = f.coefficient(G.identity());
        WordBall outer = word_ball(G, radius + f_radius, opt.ball_cap);
        std::size_t inner = 0;
        while (inner < outer.size() && outer.lengths()[inner] <= radius) ++inner;

        std::vector<double> fs;
        std::vector<std::vector<std::uint32_t>> tab;
        GroupElement prod{std::vector<std::int64_t>(G.dimension())};
        for (const auto& [s, v] : f.coefficients()) {
            fs.push_back(v);
            std::vector<std::uint32_t> t(inner);
            for (std::size_t i = 0; i < inner; ++i) {
                G.multiply_into(outer.elements()[i].coords, s.coords, prod.coords);
                t[i] = static_cast<std::uint32_t>(*outer.index_of(prod));
            }
            tab.push_back(std::move(t));
        }

        std::vector<double> g(inner, 0.0);
        double dropped = 0.0;
        for (const auto& [a, v] : g0.coefficients()) {
            auto idx = outer.index_of(a);
            if (idx && *idx < inner) {
                g[*idx] = v;
            } else {
                dropped += std::fabs(v);
            }
        }

        std::vector<double> r(outer.size());
        double prev = std::numeric_limits<double>::infinity();
        std::vector<double> best = g;
        double best_delta = prev;
        for (int it = 0; it < 20000; ++it) {
            std::fill(r.begin(), r.end(), 0.0);
            for (std::size_t s = 0; s < fs.size(); ++s) {
                const auto& t = tab[s];
                const double v = fs[s];
                for (std::size_t i = 0; i < inner; ++i) r[t[i]] -= g[i] * v;
            }
            r[0] += 1.0;
            double delta = 0.0;
            for (double x : r) delta += std::fabs(x);
            if (delta < best_delta) {
                best_delta = delta;
                best = g;
            }
            if (delta <= 0.5 * target) break;
            if (it > 3 && delta > (1.0 - 1e-3) * prev) break;
            prev = delta;
            for (std::size_t i = 0; i < inner; ++i) g[i] += r[i] / c;
        }

        RealElement out(G);
        for (std::size_t i = 0; i < inner; ++i) {
            if (best[i] != 0.0) out.add_term_unchecked(outer.elements()[i], best[i]);
        }
        history.push_back({"correction", radius, residual(out), dropped * f_norm});
        return out;
    }
};

/// Inverse of the quotient operator applied to e(1), lifted by symmetric
/// representatives. nullopt when the quotient operator is numerically singular.
std::optional<RealElement> quotient_lift_seed(const RealElement& f, std::size_t order_cap, const WordBall& ball,
                                              std::vector<std::string>& notes) {
    const auto& G = f.group();
    std::int64_t m = 2;
    while (m < 1024 && FiniteQuotient::congruence(G, m + 1).order() <= order_cap) ++m;
    FiniteQuotient q = FiniteQuotient::congruence(G, m);
    auto op = transfer(f, q);
    // h f^{(n)} = e  <=>  M^T h = e_0
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(op.matrix.transpose());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(q.order()));
    rhs(0) = 1.0;
    Eigen::VectorXd h = lu.solve(rhs);
    const double check = (op.matrix.transpose() * h - rhs).lpNorm<1>();
    if (!h.allFinite() || !(check < 1e-6)) {
        notes.push_back("quotient operator modulo " + std::to_string(m) + " is numerically singular");
        return std::nullopt;
    }
    RealElement seed(G);
    for (std::size_t i = 0; i < q.order(); ++i) {
        const GroupElement lift = q.symmetric_lift(q.elements()[i]);
        if (ball.contains(lift)) seed.add_term_unchecked(lift, h(static_cast<Eigen::Index>(i)));
    }
    notes.push_back("seed lifted from the quotient modulo " + std::to_string(m));
    return seed;
}

}  // namespace

int default_radius_cap(const GroupDescriptor& group) { return involves_heisenberg(group) ? 24 : 64; }

double certified_residual(const RealElement& g, const RealElement& f) {
    RealElement r = RealElement::scalar(g.group(), 1.0) - convolve(g, f);
    double delta = 0.0;
    for (const auto& [x, c] : r.coefficients()) delta += std::fabs(c);
    const double gm = norm_l1(g), fm = norm_l1(f);
    const double summation = gamma_n(r.support_size() + 1);
    const double products = gamma_n(f.support_size() + 2) * gm * fm;
    return (delta + products) * (1.0 + summation);
}

InvertibilityCertificate certify_invertible(const RealElement& f, double target_residual,
                                            const InversionOptions& options) {
    if (!(target_residual > 0.0 && target_residual < 1.0)) {
        throw Error(ErrorCode::Parameter, "target residual must lie in (0, 1)");
    }
    if (f.is_zero()) throw Error(ErrorCode::Precondition, "cannot certify the zero element");
    const auto& G = f.group();
    InvertibilityCertificate cert;
    const int requested = options.max_radius.value_or(default_radius_cap(G));
    const int cap = feasible_radius(G, requested, options.ball_cap);
    if (cap < requested) cert.notes.push_back("radius cap lowered to " + std::to_string(cap) + " by the ball element cap");

    // dominant coefficient, anywhere in the support
    GroupElement g0 = f.coefficients().begin()->first;
    double c = 0.0;
    for (const auto& [g, v] : f.coefficients()) {
        if (std::fabs(v) > std::fabs(c)) {
            c = v;
            g0 = g;
        }
    }
    const double rest = norm_l1(f) - std::fabs(c);
    // f = e(g0) f', so f^{-1} = f'^{-1} e(g0^{-1}) and the residual of g' e(g0^{-1}) against f
    // equals that of g' against f'
    const GroupElement g0_inv = G.inverse(g0);
    const RealElement fs = convolve(RealElement::basis(G, g0_inv), f);
    const RealElement shift_back = RealElement::basis(G, g0_inv);

    RealElement g(G);
    if (f.support_size() == 1) {
        cert.method = "monomial";
        g = RealElement::basis(G, g0_inv, 1.0 / c);
    } else {
        Refiner ref{fs, target_residual, cap, options, cert.history};
        const std::size_t cap_ball = word_ball(G, cap, options.ball_cap).size();
        if (std::fabs(c) > rest) {
            cert.method = "neumann";
            const double ratio = rest / std::fabs(c);
            RealElement gp = RealElement::scalar(G, 1.0 / c);
            if (cap_ball <= options.newton_ball_limit) {
                // partial Neumann sum with ratio^K <= 2^-10, built by g <- g + (e - g f')/c
                const int K = std::max(1, static_cast<int>(std::ceil(10.0 * std::log(2.0) / -std::log(ratio))));
                int radius = 0;
                for (int k = 1; k < K && radius + ref.f_radius <= cap; ++k) {
                    RealElement r = RealElement::scalar(G, 1.0) - convolve(gp, fs);
                    gp += r * (1.0 / c);
                    radius += ref.f_radius;
                }
                cert.history.push_back({"seed", radius, ref.residual(gp), 0.0});
                gp = ref.newton(std::move(gp), std::max(radius, 1), cap);
            } else {
                cert.history.push_back({"seed", 0, ref.residual(gp), 0.0});
                for (int radius : {std::max(1, cap / 4), std::max(1, cap / 2), cap}) {
                    gp = ref.correction(gp, radius);
                    if (cert.history.back().residual <= target_residual) break;
                }
            }
            g = convolve(gp, shift_back);
        } else {
            cert.method = "quotient-lift";
            int work = cap;
            while (work > 1 && word_ball(G, work, options.ball_cap).size() > options.newton_ball_limit) --work;
            WordBall ball = word_ball(G, work, options.ball_cap);
            auto seed = quotient_lift_seed(f, options.lift_order_cap, ball, cert.notes);
            if (seed) {
                Refiner full{f, target_residual, work, options, cert.history};
                cert.history.push_back({"seed", work, full.residual(*seed), 0.0});
                g = full.newton(std::move(*seed), work, work);
            }
        }
    }

    if (g.is_zero()) {
        cert.verdict = Verdict::Unknown;
        cert.residual = std::numeric_limits<double>::infinity();
        cert.tail_bound = std::numeric_limits<double>::infinity();
        cert.notes.push_back("no candidate inverse found");
        return cert;
    }
    const double delta = certified_residual(g, f);
    cert.residual = delta;
    cert.support_radius = support_radius(g, 1 << 20);
    if (delta < 1.0) {
        cert.verdict = Verdict::InvertibleCertified;
        cert.tail_bound = norm_l1(g) * delta / (1.0 - delta);
        if (delta > target_residual) {
            cert.notes.push_back("residual target not reached within radius " + std::to_string(cap));
        }
    } else {
        cert.verdict = Verdict::Unknown;
        cert.tail_bound = std::numeric_limits<double>::infinity();
        cert.notes.push_back("residual >= 1 at the radius cap");
    }
    cert.approx_inverse = std::move(g);
    return cert;
}

InvertibilityCertificate certify_invertible(const IntElement& f, double target_residual,
                                            const InversionOptions& options) {
    return certify_invertible(convert<double>(f), target_residual, options);
}

InvertibilityCertificate detect_noninvertible(const IntElement& f, const QuotientChain& chain,
                                              const NoninvertibleOptions& options) {
    InvertibilityCertificate cert;
    cert.method = "singular-quotient";
    cert.residual = std::numeric_limits<double>::infinity();
    cert.tail_bound = std::numeric_limits<double>::infinity();
    if (f.is_zero()) {
        cert.verdict = Verdict::NonInvertibleCertified;
        cert.witness_quotient = chain[0];
        cert.witness_level = 0;
        cert.notes.push_back("zero element is singular at every level");
        return cert;
    }
    for (std::size_t n = 0; n < chain.size(); ++n) {
        const auto& q = chain[n];
        if (q.order() > options.modular_order_cap) {
            cert.notes.push_back("levels from order " + std::to_string(q.order()) + " on were not examined");
            break;
        }
        auto op = transfer(f, q);
        const std::size_t rank = modular_rank(op.matrix, kMersenne61);
        if (rank == q.order()) continue;  // nonsingular mod p, hence over Q
        if (q.order() <= options.exact_order_cap) {
            if (sgn(bareiss_determinant(op.matrix)) == 0) {
                cert.verdict = Verdict::NonInvertibleCertified;
                cert.witness_quotient = q;
                cert.witness_level = n;
                return cert;
            }
        } else {
            cert.notes.push_back("level of order " + std::to_string(q.order()) +
                                 " is singular modulo a prime; exact check skipped");
        }
    }
    cert.verdict = Verdict::Unknown;
    return cert;
}

L1Inverse l1_inverse(const InvertibilityCertificate& cert) {
    if (cert.verdict != Verdict::InvertibleCertified || !cert.approx_inverse) {
        throw Error(ErrorCode::Precondition, "l1 inverse needs an invertibility certificate");
    }
    return {*cert.approx_inverse, cert.tail_bound, cert.residual, cert.support_radius};
}

L1Inverse l1_inverse(const RealElement& f, double tail_target, const InversionOptions& options) {
    if (!(tail_target > 0.0)) throw Error(ErrorCode::Parameter, "tail target must be positive");
    double target = std::min(0.5, tail_target);
    InvertibilityCertificate cert = certify_invertible(f, target, options);
    if (cert.verdict != Verdict::InvertibleCertified) {
        throw Error(ErrorCode::Precondition, "f is not certified invertible");
    }
    if (cert.tail_bound > tail_target) {
        // tail = ||g|| delta / (1 - delta): aim the residual at the tail target scaled by ||g||
        const double gnorm = norm_l1(*cert.approx_inverse);
        target = std::min(0.5, tail_target / (2.0 * std::max(1.0, gnorm)));
        InvertibilityCertificate again = certify_invertible(f, target, options);
        if (again.verdict == Verdict::InvertibleCertified && again.tail_bound < cert.tail_bound) cert = std::move(again);
    }
    if (cert.tail_bound > tail_target) {
        std::ostringstream os;
        os << "tail target " << tail_target << " unreachable within the radius cap; best bound " << cert.tail_bound;
        throw TailTargetUnreachable(cert.tail_bound, os.str());
    }
    return l1_inverse(cert);
}

DecayProfile decay_profile(const RealElement& w, std::span<const GroupElement> generators, double noise_floor) {
    const auto& G = w.group();
    int r = 1;
    WordBall ball = word_ball(G, generators, r);
    auto covered = [&]() {
        return std::all_of(w.coefficients().begin(), w.coefficients().end(),
                           [&](const auto& kv) { return ball.contains(kv.first); });
    };
    while (!covered()) {
        r *= 2;
        ball = word_ball(G, generators, r);
    }
    DecayProfile out;
    int max_len = 0;
    for (const auto& [g, c] : w.coefficients()) max_len = std::max(max_len, ball.length(g));
    std::vector<double> shell(static_cast<std::size_t>(max_len) + 1, 0.0);
    for (const auto& [g, c] : w.coefficients()) {
        auto& s = shell[static_cast<std::size_t>(ball.length(g))];
        s = std::max(s, std::fabs(c));
    }
    std::vector<double> xs, ys;
    for (int k = 0; k <= max_len; ++k) {
        out.radii.push_back(k);
        out.shell_max.push_back(shell[static_cast<std::size_t>(k)]);
        const double v = shell[static_cast<std::size_t>(k)];
        if (v > 0.0 && v > noise_floor) {
            xs.push_back(k);
            ys.push_back(std::log(v));
        }
    }
    if (xs.size() < 3) {
        throw Error(ErrorCode::InsufficientData,
                    "decay fit needs at least 3 nonempty shells, found " + std::to_string(xs.size()));
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    out.rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    out.intercept = (sy - out.rate * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (out.intercept + out.rate * xs[i]);
        ss += e * e;
    }
    out.fit_residual = std::sqrt(ss / n);
    out.fitted_shells = xs.size();
    return out;
}

DecayProfile decay_profile(const RealElement& w, double noise_floor) {
    const auto gens = standard_generators(w.group());
    return decay_profile(w, gens, noise_floor);
}

}  // namespace fkdet
