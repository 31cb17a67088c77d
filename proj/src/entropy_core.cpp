#include "fkdet/entropy_core.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "fkdet/exact_linalg.hpp"

namespace fkdet {

std::string_view to_string(EntropyMethod m) noexcept {
    switch (m) {
        case EntropyMethod::Dense: return "dense";
        case EntropyMethod::Exact: return "exact";
        case EntropyMethod::Cheb: return "cheb";
        case EntropyMethod::Mahler: return "mahler";
    }
    return "dense";
}

double logdet_dense(const Eigen::MatrixXd& m, bool symmetric) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::Parameter, "log-determinant of a non-square matrix");
    if (!m.allFinite()) throw Error(ErrorCode::Data, "operator matrix has non-finite entries");
    if (m.rows() == 0) return 0.0;
    if (symmetric) {
        Eigen::LLT<Eigen::MatrixXd> llt(m);
        if (llt.info() == Eigen::Success) {
            const auto d = llt.matrixLLT().diagonal();
            double s = 0.0;
            for (Eigen::Index i = 0; i < d.size(); ++i) s += std::log(d(i));
            return 2.0 * s;
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    const auto& u = lu.matrixLU();
    double s = 0.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
        const double p = u(i, i);
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        s += std::log(std::fabs(p));
    }
    return s;
}

double logdet_dense(const QuotientOperator& op) { return logdet_dense(op.matrix, op.symmetric); }

double entropy_at_level(const RealElement& f, const FiniteQuotient& q, std::size_t dense_cap) {
    const auto op = transfer(f, q, dense_cap);
    return logdet_dense(op) / static_cast<double>(q.order());
}

double entropy_at_level(const IntElement& f, const FiniteQuotient& q, std::size_t dense_cap) {
    return entropy_at_level(convert<double>(f), q, dense_cap);
}

FixedPointCount fixed_points_exact(const IntElement& f, const FiniteQuotient& q, std::size_t dense_cap) {
    const auto op = transfer(f, q, dense_cap);
    Integer det = bareiss_determinant(op.matrix);
    if (sgn(det) == 0) return {};
    return {Integer(abs(det))};
}

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// Rows need the fixed-point count only to cross-check the float determinant.
void cross_check(EntropyRow& row, std::vector<std::string>& notes) {
    if (!row.fixed_points || !std::isfinite(row.value)) return;
    const double logdet = row.value * static_cast<double>(row.order);
    if (logdet > 36.0) return;  // beyond ~4e15 the float determinant is not resolved to 0.4
    const double d = std::exp(logdet);
    const double r = std::round(d);
    if (std::fabs(d - r) > 0.4) return;
    if (Integer(r) != *row.fixed_points) {
        row.flagged = true;
        std::ostringstream os;
        os << "level " << row.level << ": exact count " << row.fixed_points->get_str() << " disagrees with exp(logdet) "
           << d;
        notes.push_back(os.str());
    }
}

// ||h^k||_1 for k = 1..iters, stopping early once products get expensive.
std::vector<double> power_norms(const RealElement& h, int iters, double work_budget = 5e7) {
    std::vector<double> out;
    RealElement p = h;
    out.push_back(norm_l1(p));
    for (int k = 2; k <= iters; ++k) {
        const double work = static_cast<double>(p.support_size()) * static_cast<double>(h.support_size());
        if (work > work_budget) break;
        p = p * h;
        out.push_back(norm_l1(p));
    }
    return out;
}

}  // namespace

EntropyBracket entropy_bounds(const RealElement& f, const InvertibilityCertificate& cert, int power_iters) {
    if (cert.verdict != Verdict::InvertibleCertified || !cert.approx_inverse) {
        throw Error(ErrorCode::Precondition, "entropy bracket needs a certified inverse");
    }
    if (power_iters < 1) throw Error(ErrorCode::Parameter, "power_iters must be >= 1");
    EntropyBracket b;
    const auto fn = power_norms(f, power_iters);
    for (std::size_t k = 0; k < fn.size(); ++k) b.upper_sequence.push_back(std::log(fn[k]) / static_cast<double>(k + 1));

    // f^{-1} = g + r with ||r||_1 <= tau, so ||(g + r)^k|| <= ||g^k|| + (||g|| + tau)^k - ||g||^k.
    const RealElement& g = *cert.approx_inverse;
    const double tau = cert.tail_bound;
    b.lower_sequence.push_back(-std::log(norm_l1(g) + tau));
    if (power_iters > 1) {
        // powers use a truncation small enough to convolve, with the dropped mass moved into tau
        RealElement gs = g;
        double taus = tau;
        if (g.support_size() > 400) {
            int r = 1;
            WordBall ball = word_ball(g.group(), r);
            while (word_ball(g.group(), r + 1).size() <= 400) ball = word_ball(g.group(), ++r);
            auto [t, dropped] = truncate_to_ball(g, ball);
            gs = std::move(t);
            taus += dropped;
        }
        const auto gn = power_norms(gs, power_iters);
        const double base = gn[0];
        for (std::size_t k = 1; k < gn.size(); ++k) {
            const double kk = static_cast<double>(k + 1);
            const double bound = gn[k] + std::pow(base + taus, kk) - std::pow(base, kk);
            b.lower_sequence.push_back(-std::log(bound) / kk);
        }
    }
    b.upper = *std::min_element(b.upper_sequence.begin(), b.upper_sequence.end());
    b.lower = *std::max_element(b.lower_sequence.begin(), b.lower_sequence.end());
    return b;
}

EntropyReport entropy_converge(const IntElement& f, const QuotientChain& chain, const ConvergeOptions& options) {
    if (!(f.group() == chain.parent())) {
        throw Error(ErrorCode::DescriptorMismatch, "chain over " + chain.parent().to_string() + " for element over " +
                                                       f.group().to_string());
    }
    if (!(options.cauchy_tol > 0.0)) throw Error(ErrorCode::Parameter, "cauchy_tol must be positive");
    EntropyReport report;
    const RealElement fr = convert<double>(f);
    InvertibilityCertificate cert = options.certificate ? *options.certificate : certify_invertible(f);
    const bool certified = cert.verdict == Verdict::InvertibleCertified;
    if (!certified) {
        report.advisory = true;
        report.notes.push_back("f is not certified invertible; level values are advisory");
    } else {
        report.bracket = entropy_bounds(fr, cert, options.power_iters);
    }

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < chain.size() && todo.size() < options.max_levels; ++i) {
        if (chain[i].order() > options.dense_cap) {
            report.notes.push_back("level " + std::to_string(i) + " of order " + std::to_string(chain[i].order()) +
                                   " exceeds the dense cap; use method cheb");
            continue;
        }
        todo.push_back(i);
    }
    if (todo.empty()) {
        throw Error(ErrorCode::Capacity, "every level exceeds the dense cap " + std::to_string(options.dense_cap) +
                                             "; use method cheb");
    }

    auto compute = [&](std::size_t level) {
        EntropyRow row;
        const auto& q = chain[level];
        row.level = level;
        row.order = q.order();
        row.moduli = q.moduli();
        const auto t0 = std::chrono::steady_clock::now();
        row.value = entropy_at_level(fr, q, options.dense_cap);
        if (q.order() <= options.exact_order_cap) {
            auto fp = fixed_points_exact(f, q, options.exact_order_cap);
            row.fixed_points = fp.count;
        }
        row.wall_ms = ms_since(t0);
        return row;
    };

    const std::size_t batch = std::max(1u, options.threads);
    bool stop = false;
    for (std::size_t start = 0; start < todo.size() && !stop; start += batch) {
        const std::size_t end = std::min(todo.size(), start + batch);
        std::vector<EntropyRow> rows;
        if (batch == 1) {
            rows.push_back(compute(todo[start]));
        } else {
            std::vector<std::future<EntropyRow>> futs;
            for (std::size_t i = start; i < end; ++i) futs.push_back(std::async(std::launch::async, compute, todo[i]));
            for (auto& fu : futs) rows.push_back(fu.get());
        }
        for (auto& row : rows) {
            if (!std::isfinite(row.value)) {
                if (certified) {
                    throw Error(ErrorCode::Internal, "singular operator at level " + std::to_string(row.level) +
                                                         " for a certified-invertible f");
                }
                row.flagged = true;
                report.notes.push_back("level " + std::to_string(row.level) + " is singular");
            }
            cross_check(row, report.notes);
            if (report.bracket && std::isfinite(row.value) &&
                (row.value < report.bracket->lower - 1e-9 || row.value > report.bracket->upper + 1e-9)) {
                row.flagged = true;
                report.notes.push_back("level " + std::to_string(row.level) + " lies outside the bracket");
            }
            if (!report.rows.empty()) {
                const double prev = report.rows.back().value;
                if (row.value < prev) report.monotone = false;
                if (std::isfinite(prev) && std::isfinite(row.value)) {
                    report.final_gap = std::fabs(row.value - prev);
                    if (report.final_gap < options.cauchy_tol) {
                        report.cauchy_fired = true;
                        stop = true;
                    }
                }
            }
            report.rows.push_back(std::move(row));
            if (stop) break;
        }
    }
    report.estimate = report.rows.back().value;
    if (options.richardson && report.rows.size() >= 2) {
        const auto& a = report.rows[report.rows.size() - 2];
        const auto& b = report.rows.back();
        const double na = static_cast<double>(a.order), nb = static_cast<double>(b.order);
        report.richardson = (nb * b.value - na * a.value) / (nb - na);
        report.notes.push_back("richardson value assumes an error of the form C/order (heuristic)");
    }
    return report;
}

namespace {

double torus_distance(double t) {
    const double r = t - std::floor(t);
    return std::min(r, 1.0 - r);
}

// Kernel candidates k_i * m_i in each coordinate, in growing max-norm shells of k.
std::vector<GroupElement> kernel_candidates(const FiniteQuotient& q, int max_shell) {
    const std::size_t d = q.parent().dimension();
    std::vector<GroupElement> out;
    for (int s = 0; s <= max_shell; ++s) {
        std::vector<std::int64_t> k(d, -s);
        for (;;) {
            std::int64_t mx = 0;
            for (auto v : k) mx = std::max<std::int64_t>(mx, std::llabs(v));
            if (mx == s) {
                GroupElement g{std::vector<std::int64_t>(d)};
                for (std::size_t i = 0; i < d; ++i) g.coords[i] = k[i] * q.moduli()[i];
                if (q.parent().contains(g) && q.in_kernel(g)) out.push_back(std::move(g));
            }
            std::size_t i = 0;
            while (i < d && k[i] == s) k[i++] = -s;
            if (i == d) break;
            ++k[i];
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

SeparatedSetWitness separated_lower_bound(const IntElement& f, const FiniteQuotient& q,
                                          const std::optional<InvertibilityCertificate>& cert_in,
                                          std::size_t max_shifts) {
    if (!(f.group() == q.parent())) {
        throw Error(ErrorCode::DescriptorMismatch, "quotient of " + q.parent().to_string() + " for element over " +
                                                       f.group().to_string());
    }
    if (max_shifts < 1 || max_shifts > 16) throw Error(ErrorCode::Parameter, "max_shifts must lie in [1, 16]");
    const auto& G = f.group();
    const double level_logdet = entropy_at_level(f, q) * static_cast<double>(q.order());
    if (!(level_logdet > 1e-9)) {
        throw Error(ErrorCode::Precondition, "|det| <= 1 at this level; X_f may be trivial");
    }
    const InvertibilityCertificate cert = cert_in ? *cert_in : certify_invertible(f);
    if (cert.verdict != Verdict::InvertibleCertified) {
        throw Error(ErrorCode::Precondition, "f is not certified invertible (expansiveness not established)");
    }
    const RealElement wt = involute(*cert.approx_inverse);
    const double tau = cert.tail_bound;

    SeparatedSetWitness out;
    double best = -1.0;
    for (const auto& [g, c] : wt.coefficients()) {
        const double d = torus_distance(c);
        if (d > best) {
            best = d;
            out.gamma0 = g;
        }
    }
    out.base_distance = best - tau;
    if (!(out.base_distance > 0.0)) {
        throw Error(ErrorCode::Data, "homoclinic point vanishes mod 1 on the computed window");
    }
    const double half = out.base_distance / 2.0;

    // window F: gamma0 first, then by decreasing |w~| until the mass outside is below half
    std::vector<std::pair<double, GroupElement>> by_mass;
    double total = 0.0;
    for (const auto& [g, c] : wt.coefficients()) {
        total += std::fabs(c);
        if (!(g == out.gamma0)) by_mass.emplace_back(std::fabs(c), g);
    }
    std::stable_sort(by_mass.begin(), by_mass.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    out.window.push_back(out.gamma0);
    double inside = std::fabs(wt.coefficient(out.gamma0));
    for (const auto& [m, g] : by_mass) {
        if (total - inside + tau < half) break;
        out.window.push_back(g);
        inside += m;
    }
    if (total - inside + tau >= half) throw Error(ErrorCode::Data, "window mass never drops below d/2");

    // Omega': kernel elements whose translates gamma F are pairwise disjoint
    std::set<GroupElement> used;
    for (int shell = 1; out.shifts.size() < max_shifts && shell <= 64; shell *= 2) {
        for (const auto& gamma : kernel_candidates(q, shell)) {
            if (out.shifts.size() >= max_shifts) break;
            if (std::find(out.shifts.begin(), out.shifts.end(), gamma) != out.shifts.end()) continue;
            std::vector<GroupElement> translate;
            bool disjoint = true;
            for (const auto& w : out.window) {
                translate.push_back(G.multiply_unchecked(gamma, w));
                if (used.count(translate.back())) {
                    disjoint = false;
                    break;
                }
            }
            if (!disjoint) continue;
            used.insert(translate.begin(), translate.end());
            out.shifts.push_back(gamma);
        }
        if (q.parent().is_finite()) break;
    }

    // x^(omega) at the coordinates gamma * gamma0, gamma in Omega'
    const std::size_t s = out.shifts.size();
    std::vector<GroupElement> coords;
    for (const auto& gamma : out.shifts) coords.push_back(G.multiply_unchecked(gamma, out.gamma0));
    // contrib[a][b] = w~_{shift_a^{-1} coord_b}
    std::vector<std::vector<double>> contrib(s, std::vector<double>(s));
    for (std::size_t a = 0; a < s; ++a) {
        const GroupElement ainv = G.inverse_unchecked(out.shifts[a]);
        for (std::size_t b = 0; b < s; ++b) contrib[a][b] = wt.coefficient(G.multiply_unchecked(ainv, coords[b]));
    }
    const std::size_t npts = std::size_t{1} << s;
    std::vector<std::vector<double>> pts(npts, std::vector<double>(s, 0.0));
    for (std::size_t omega = 0; omega < npts; ++omega) {
        for (std::size_t a = 0; a < s; ++a) {
            if (!((omega >> a) & 1u)) continue;
            for (std::size_t b = 0; b < s; ++b) pts[omega][b] += contrib[a][b];
        }
    }
    // each point is off by at most tau in every coordinate, so a pair by at most 2 tau
    double min_sep = std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < npts; ++u) {
        for (std::size_t v = u + 1; v < npts; ++v) {
            double sep = 0.0;
            for (std::size_t b = 0; b < s; ++b) sep = std::max(sep, torus_distance(pts[u][b] - pts[v][b]));
            min_sep = std::min(min_sep, sep - 2.0 * tau);
        }
    }
    out.min_separation = npts > 1 ? min_sep : 0.0;
    out.points = npts;
    if (npts > 1 && !(out.min_separation > half)) {
        throw Error(ErrorCode::Internal, "translated homoclinic points are not separated by d/2");
    }
    out.bound = std::log(2.0) / static_cast<double>(q.order());
    return out;
}

}  // namespace fkdet
