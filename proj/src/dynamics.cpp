#include "fkdet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fkdet/quotient_transfer.hpp"

namespace fkdet {

double torus_distance(double t) {
    const double r = t - std::floor(t);
    return std::min(r, 1.0 - r);
}

namespace {

double frac(double t) {
    const double r = t - std::floor(t);
    return r >= 1.0 ? 0.0 : r;
}

Rational frac(const Rational& r) {
    Integer fl;
    mpz_fdiv_q(fl.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    Rational out = r - Rational(fl);
    out.canonicalize();
    return out;
}

// representative of a residue in [-1/2, 1/2)
Rational centered(const Rational& r) {
    static const Rational half(1, 2);
    return r >= half ? Rational(r - 1) : r;
}

double centered(double r) { return r >= 0.5 ? r - 1.0 : r; }

const FiniteQuotient& require_period(const TorusPoint& x) {
    if (!x.period) throw Error(ErrorCode::Parameter, "expected a periodic point");
    return *x.period;
}

}  // namespace

double TorusPoint::at(const GroupElement& g) const {
    if (period) return residues[period->project_index(g)].get_d();
    auto it = values.find(g);
    if (it == values.end()) throw Error(ErrorCode::Window, "coordinate " + to_string(g) + " lies outside the window");
    return it->second;
}

TorusPoint TorusPoint::zero(const GroupDescriptor& group, const std::vector<GroupElement>& window) {
    TorusPoint x{group, {}, std::nullopt, {}, 0.0};
    for (const auto& g : window) x.values.emplace(g, 0.0);
    return x;
}

double membership_residual(const TorusPoint& x, const RealElement& f) {
    const auto& G = x.group;
    if (!(f.group() == G)) throw Error(ErrorCode::DescriptorMismatch, "point and f live on different groups");
    double worst = 0.0;
    if (x.period) {
        const auto& q = *x.period;
        for (const auto& g : q.elements()) {
            double s = 0.0;
            for (const auto& [h, c] : f.coefficients()) s += c * x.at(G.multiply_unchecked(q.symmetric_lift(g), h));
            worst = std::max(worst, torus_distance(s));
        }
        return worst;
    }
    bool covered_any = false;
    for (const auto& [g, xv] : x.values) {
        double s = 0.0;
        bool covered = true;
        for (const auto& [h, c] : f.coefficients()) {
            auto it = x.values.find(G.multiply_unchecked(g, h));
            if (it == x.values.end()) {
                covered = false;
                break;
            }
            s += c * it->second;
        }
        if (!covered) continue;
        covered_any = true;
        worst = std::max(worst, torus_distance(s));
    }
    if (!covered_any) throw Error(ErrorCode::Window, "no coordinate of the window covers the support of f");
    return worst;
}

bool exact_membership(const TorusPoint& x, const IntElement& f) {
    const auto& q = require_period(x);
    const auto fq = fibre_integrate(f, q);
    const auto& Gq = q.group();
    for (std::size_t i = 0; i < q.order(); ++i) {
        Rational s = 0;
        for (const auto& [h, c] : fq.coefficients()) {
            s += Rational(c) * x.residues[q.index_of(Gq.multiply_unchecked(q.elements()[i], h))];
        }
        s.canonicalize();
        if (mpz_cmp_ui(s.get_den_mpz_t(), 1) != 0) return false;
    }
    return true;
}

TorusPoint homoclinic_point(const L1Inverse& inverse, int radius) {
    const auto& G = inverse.inverse.group();
    const RealElement wt = involute(inverse.inverse);
    TorusPoint x{G, {}, std::nullopt, {}, inverse.tail_bound};
    const WordBall ball = word_ball(G, radius);
    for (const auto& g : ball.elements()) x.values.emplace(g, frac(wt.coefficient(g)));
    return x;
}

TorusPoint homoclinic_point(const IntElement& f, int radius, double tail_target) {
    return homoclinic_point(l1_inverse(convert<double>(f), tail_target), radius);
}

TorusPoint xi_map(const IntElement& v, const L1Inverse& inverse, const std::vector<GroupElement>& window) {
    const auto& G = inverse.inverse.group();
    if (!(v.group() == G)) throw Error(ErrorCode::DescriptorMismatch, "v and f live on different groups");
    // (rho_w v)_gamma = sum_delta v_delta w_{gamma^{-1} delta}
    TorusPoint x{G, {}, std::nullopt, {}, inverse.tail_bound * norm_linf(v).get_d()};
    for (const auto& g : window) {
        const GroupElement ginv = G.inverse_unchecked(g);
        double s = 0.0;
        for (const auto& [d, c] : v.coefficients()) s += c.get_d() * inverse.inverse.coefficient(G.multiply_unchecked(ginv, d));
        x.values.emplace(g, frac(s));
    }
    return x;
}

Lift lift_point(const TorusPoint& x, const IntElement& f) {
    const auto& G = x.group;
    if (!(f.group() == G)) throw Error(ErrorCode::DescriptorMismatch, "point and f live on different groups");
    Lift out;
    out.sup_norm = 0;
    if (x.period) {
        const auto& q = *x.period;
        const auto fq = fibre_integrate(f, q);
        const auto& Gq = q.group();
        out.period = q;
        out.periodic_values.resize(q.order());
        for (std::size_t i = 0; i < q.order(); ++i) {
            Rational s = 0;
            for (const auto& [h, c] : fq.coefficients()) {
                s += Rational(c) * centered(x.residues[q.index_of(Gq.multiply_unchecked(q.elements()[i], h))]);
            }
            s.canonicalize();
            if (mpz_cmp_ui(s.get_den_mpz_t(), 1) != 0) {
                throw Error(ErrorCode::Precondition, "periodic point does not satisfy the defining relation of X_f");
            }
            out.periodic_values[i] = s.get_num();
            out.sup_norm = std::max(out.sup_norm, Integer(abs(out.periodic_values[i])));
        }
        return out;
    }
    const double tol = 1e-6 + x.tolerance * norm_l1(f).get_d();
    for (const auto& [g, xv] : x.values) {
        double s = 0.0;
        bool covered = true;
        for (const auto& [h, c] : f.coefficients()) {
            auto it = x.values.find(G.multiply_unchecked(g, h));
            if (it == x.values.end()) {
                covered = false;
                break;
            }
            s += c.get_d() * centered(it->second);
        }
        if (!covered) continue;
        const double r = std::round(s);
        if (std::fabs(s - r) > tol) {
            throw Error(ErrorCode::Precondition, "point is not in X_f at " + to_string(g));
        }
        const Integer v(static_cast<long>(r));
        out.values.emplace(g, v);
        out.sup_norm = std::max(out.sup_norm, Integer(abs(v)));
    }
    if (out.values.empty()) throw Error(ErrorCode::Window, "window too small for the support of f");
    return out;
}

TorusPoint xi_map_periodic(const Lift& v, const IntElement& f) {
    if (!v.period) throw Error(ErrorCode::Parameter, "expected a periodic lift");
    const auto& q = *v.period;
    const auto op = transfer(f, q);
    const auto w = solve_rational(op.matrix, v.periodic_values);
    if (!w) throw Error(ErrorCode::Precondition, "rho_f is singular on this quotient");
    TorusPoint x{f.group(), {}, q, {}, 0.0};
    x.residues.reserve(w->size());
    for (const auto& r : *w) x.residues.push_back(frac(r));
    return x;
}

std::vector<GroupElement> specification_window(const L1Inverse& inverse, double f_norm, double epsilon) {
    if (!(epsilon > 0.0)) throw Error(ErrorCode::Parameter, "epsilon must be positive");
    std::vector<std::pair<double, GroupElement>> by_mass;
    double total = 0.0;
    for (const auto& [g, c] : inverse.inverse.coefficients()) {
        by_mass.emplace_back(std::fabs(c), g);
        total += std::fabs(c);
    }
    std::stable_sort(by_mass.begin(), by_mass.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    const double target = epsilon / f_norm;
    std::vector<GroupElement> F;
    double inside = 0.0;
    for (const auto& [m, g] : by_mass) {
        if (total - inside + inverse.tail_bound < target) break;
        F.push_back(g);
        inside += m;
    }
    if (total - inside + inverse.tail_bound >= target) {
        throw Error(ErrorCode::Capacity, "the certified tail of f^{-1} exceeds epsilon / ||f||_1");
    }
    return F;
}

namespace {

std::set<GroupElement> products(const GroupDescriptor& G, const std::vector<GroupElement>& a,
                                const std::vector<GroupElement>& b) {
    std::set<GroupElement> out;
    for (const auto& x : a)
        for (const auto& y : b) out.insert(G.multiply_unchecked(x, y));
    return out;
}

bool intersects(const std::set<GroupElement>& a, const std::set<GroupElement>& b) {
    return std::any_of(a.begin(), a.end(), [&](const GroupElement& g) { return b.count(g) > 0; });
}

}  // namespace

GlueResult specification_glue(const TorusPoint& x1, const TorusPoint& x2, const std::vector<GroupElement>& c1,
                              const std::vector<GroupElement>& c2, double epsilon, const IntElement& f,
                              double tail_target) {
    const auto& G = f.group();
    if (!(x1.group == G) || !(x2.group == G)) throw Error(ErrorCode::DescriptorMismatch, "points and f differ in group");
    const double fnorm = norm_l1(f).get_d();
    const L1Inverse inv = l1_inverse(convert<double>(f), tail_target);
    const auto F = specification_window(inv, fnorm, epsilon);

    // the construction reads v on C_i F; F C_i is recorded for comparison
    const auto a1 = products(G, c1, F), a2 = products(G, c2, F);
    if (intersects(a1, a2)) {
        // best epsilon: the longest greedy prefix of F that keeps the windows apart
        double total = 0.0;
        for (const auto& [g, c] : inv.inverse.coefficients()) total += std::fabs(c);
        double inside = 0.0, achievable = fnorm * (total + inv.tail_bound);
        for (std::size_t k = 1; k <= F.size(); ++k) {
            std::vector<GroupElement> prefix(F.begin(), F.begin() + static_cast<std::ptrdiff_t>(k));
            if (intersects(products(G, c1, prefix), products(G, c2, prefix))) break;
            inside += std::fabs(inv.inverse.coefficient(F[k - 1]));
            achievable = fnorm * (total - inside + inv.tail_bound);
        }
        std::ostringstream os;
        os << "enlarged windows C_1 F and C_2 F overlap at epsilon " << epsilon
           << "; the smallest separating epsilon is above " << achievable;
        throw Error(ErrorCode::Precondition, os.str());
    }

    IntElement v(G);
    auto lift_on = [&](const TorusPoint& x, const std::set<GroupElement>& where) {
        const double tol = 1e-6 + x.tolerance * fnorm;
        for (const auto& g : where) {
            double s = 0.0;
            for (const auto& [h, c] : f.coefficients()) s += c.get_d() * centered(x.at(G.multiply_unchecked(g, h)));
            const double r = std::round(s);
            if (std::fabs(s - r) > tol) throw Error(ErrorCode::Precondition, "input point is not in X_f at " + to_string(g));
            v.add_term(g, Integer(static_cast<long>(r)));
        }
    };
    lift_on(x1, a1);
    lift_on(x2, a2);

    std::vector<GroupElement> window(c1);
    window.insert(window.end(), c2.begin(), c2.end());
    std::sort(window.begin(), window.end());
    window.erase(std::unique(window.begin(), window.end()), window.end());

    GlueResult out{xi_map(v, inv, window), F, 0.0, 0.0, epsilon, !intersects(products(G, F, c1), products(G, F, c2))};
    auto check = [&](const TorusPoint& x, const std::vector<GroupElement>& c) {
        double worst = 0.0;
        for (const auto& g : c) worst = std::max(worst, torus_distance(x.at(g) - out.y.at(g)) + out.y.tolerance + x.tolerance);
        return worst;
    };
    out.max_distance_1 = check(x1, c1);
    out.max_distance_2 = check(x2, c2);
    if (!(out.max_distance_1 < epsilon && out.max_distance_2 < epsilon)) {
        throw Error(ErrorCode::Internal, "glued point misses the epsilon bound");
    }
    return out;
}

TorusPoint FixedPointGroup::point(std::size_t i) const {
    TorusPoint x{quotient.parent(), {}, quotient, {}, 0.0};
    for (const auto& n : points.at(i)) {
        Rational r(n, denominator);
        r.canonicalize();
        x.residues.push_back(r);
    }
    return x;
}

FixedPointGroup enumerate_fixed_points(const IntElement& f, const FiniteQuotient& q, std::size_t cap) {
    const auto op = transfer(f, q);
    const std::size_t n = q.order();
    // U M V = D: M x in Z^n  <=>  D (V^{-1} x) in Z^n, so x = V y with y_i in (1/d_i) Z / Z
    SmithForm snf = smith_normal_form(op.matrix);
    FixedPointGroup out{q, snf.diagonal, std::move(snf.right), std::nullopt, Integer(1), {}, false, std::nullopt, false};
    Integer count = 1;
    for (const auto& d : out.smith_diagonal) {
        if (sgn(d) == 0) return out;  // infinite fixed group
        count *= d;
        if (d > out.denominator) out.denominator = d;
    }
    out.count = count;
    if (count > Integer(static_cast<unsigned long>(cap))) return out;

    const Integer& D = out.denominator;
    // generator columns V[:, i] * (D / d_i) mod D for every nontrivial divisor
    std::vector<std::vector<Integer>> cols;
    std::vector<Integer> radix;
    for (std::size_t i = 0; i < out.smith_diagonal.size(); ++i) {
        const Integer& d = out.smith_diagonal[i];
        if (d == 1) continue;
        const Integer scale = D / d;
        std::vector<Integer> c(n);
        for (std::size_t j = 0; j < n; ++j) {
            c[j] = out.right(j, i) * scale;
            mpz_fdiv_r(c[j].get_mpz_t(), c[j].get_mpz_t(), D.get_mpz_t());
        }
        cols.push_back(std::move(c));
        radix.push_back(d);
    }
    std::vector<Integer> digit(radix.size(), 0);
    std::vector<Integer> cur(n, 0);
    for (;;) {
        out.points.push_back(cur);
        std::size_t k = 0;
        while (k < radix.size()) {
            ++digit[k];
            for (std::size_t j = 0; j < n; ++j) {
                cur[j] += cols[k][j];
                if (cur[j] >= D) cur[j] -= D;
            }
            if (digit[k] < radix[k]) break;
            // digit wrapped: d_k * column is 0 mod D, cur is already back to its old value
            digit[k] = 0;
            ++k;
        }
        if (k == radix.size()) break;
    }
    std::sort(out.points.begin(), out.points.end());
    out.enumerated = true;

    // exact check of M x in Z^n, i.e. M * numerators = 0 mod D
    for (const auto& p : out.points) {
        for (const auto& r : multiply(op.matrix, p)) {
            if (!mpz_divisible_p(r.get_mpz_t(), D.get_mpz_t())) {
                throw Error(ErrorCode::Internal, "enumerated point violates the defining relation");
            }
        }
    }
    // the points form a group, so pairwise separation is the smallest sup-distance of a nonzero point to 0
    if (out.points.size() > 1) {
        Integer best = D;
        for (const auto& p : out.points) {
            Integer m = 0;
            for (const auto& a : p) {
                const Integer dist = std::min(a, Integer(D - a));
                if (dist > m) m = dist;
            }
            if (sgn(m) != 0 && m < best) best = m;
        }
        out.min_separation = best;
        out.separation_holds = 3 * norm_l1(f) * best >= D;
    } else {
        out.separation_holds = true;
    }
    return out;
}

std::vector<std::string> rational_strings(const TorusPoint& x) {
    require_period(x);
    std::vector<std::string> out;
    for (const auto& r : x.residues) out.push_back(r.get_str());
    return out;
}

double homoclinic_approximation_error(const TorusPoint& x, const IntElement& f, const L1Inverse& inverse, int radius) {
    const auto& q = require_period(x);
    const Lift lift = lift_point(x, f);
    const auto& G = f.group();
    IntElement v(G);
    const WordBall ball = word_ball(G, radius);
    for (const auto& g : ball.elements()) v.add_term(g, lift.periodic_values[q.project_index(g)]);
    const auto window = word_ball(G, 1).elements();
    const TorusPoint y = xi_map(v, inverse, window);
    double worst = 0.0;
    for (const auto& g : window) worst = std::max(worst, torus_distance(x.at(g) - y.at(g)) + y.tolerance);
    return worst;
}

}  // namespace fkdet
