#pragma once

#include <gmpxx.h>

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "fkdet/errors.hpp"
#include "fkdet/groups.hpp"

namespace fkdet {

using Integer = mpz_class;
using Rational = mpq_class;

enum class ScalarDomain { Integer, Rational, Float64 };

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Integer> {
    static constexpr ScalarDomain domain = ScalarDomain::Integer;
    static constexpr int rank = 0;
    static Integer abs(const Integer& x) { return ::abs(x); }
    static double to_double(const Integer& x) { return x.get_d(); }
    static bool is_zero(const Integer& x) { return sgn(x) == 0; }
};

template <>
struct ScalarTraits<Rational> {
    static constexpr ScalarDomain domain = ScalarDomain::Rational;
    static constexpr int rank = 1;
    static Rational abs(const Rational& x) { return ::abs(x); }
    static double to_double(const Rational& x) { return x.get_d(); }
    static bool is_zero(const Rational& x) { return sgn(x) == 0; }
};

template <>
struct ScalarTraits<double> {
    static constexpr ScalarDomain domain = ScalarDomain::Float64;
    static constexpr int rank = 2;
    static double abs(double x) { return std::fabs(x); }
    static double to_double(double x) { return x; }
    static bool is_zero(double x) { return x == 0.0; }
};

template <class S>
concept RingScalar = requires { ScalarTraits<S>::domain; };

/// Finitely supported element of the real group algebra of a catalog group.
/// The support is exact (no stored zeros) and iteration follows the
/// lexicographic order of canonical tuples, which fixes every floating-point
/// reduction order.
template <RingScalar Scalar>
class RingElement {
public:
    using scalar_type = Scalar;
    using Map = std::map<GroupElement, Scalar>;

    explicit RingElement(GroupDescriptor group) : group_(std::move(group)) {}

    RingElement(GroupDescriptor group, const std::vector<std::pair<GroupElement, Scalar>>& terms)
        : group_(std::move(group)) {
        for (const auto& [g, c] : terms) add_term(g, c);
    }

    static RingElement zero(const GroupDescriptor& group) { return RingElement(group); }

    static RingElement basis(const GroupDescriptor& group, const GroupElement& g, Scalar c = Scalar(1)) {
        RingElement out(group);
        out.add_term(g, c);
        return out;
    }

    static RingElement scalar(const GroupDescriptor& group, Scalar c) { return basis(group, group.identity(), c); }

    const GroupDescriptor& group() const noexcept { return group_; }
    const Map& coefficients() const noexcept { return coeffs_; }
    std::size_t support_size() const noexcept { return coeffs_.size(); }
    bool is_zero() const noexcept { return coeffs_.empty(); }

    std::vector<GroupElement> support() const {
        std::vector<GroupElement> out;
        out.reserve(coeffs_.size());
        for (const auto& [g, c] : coeffs_) out.push_back(g);
        return out;
    }

    Scalar coefficient(const GroupElement& g) const {
        auto it = coeffs_.find(g);
        return it == coeffs_.end() ? Scalar(0) : it->second;
    }

    /// Accumulates c at g, keeping the support exact.
    void add_term(const GroupElement& g, const Scalar& c) {
        if (!group_.contains(g)) {
            throw Error(ErrorCode::DescriptorMismatch, "element " + to_string(g) + " not in " + group_.to_string());
        }
        add_term_unchecked(g, c);
    }

    void add_term_unchecked(const GroupElement& g, const Scalar& c) {
        if constexpr (std::is_same_v<Scalar, Rational>) {
            // gmp arithmetic assumes canonical operands; user-built fractions may not be
            if (mpz_cmp_ui(c.get_den_mpz_t(), 1) != 0) {
                Rational canon(c);
                canon.canonicalize();
                add_canonical(g, canon);
                return;
            }
        }
        add_canonical(g, c);
    }

private:
    void add_canonical(const GroupElement& g, const Scalar& c) {
        if (ScalarTraits<Scalar>::is_zero(c)) return;
        auto [it, inserted] = coeffs_.try_emplace(g, c);
        if (!inserted) {
            it->second += c;
            if (ScalarTraits<Scalar>::is_zero(it->second)) coeffs_.erase(it);
        }
    }

public:

    RingElement& operator+=(const RingElement& o) {
        require_same_group(o);
        for (const auto& [g, c] : o.coeffs_) add_term_unchecked(g, c);
        return *this;
    }
    RingElement& operator-=(const RingElement& o) {
        require_same_group(o);
        for (const auto& [g, c] : o.coeffs_) add_term_unchecked(g, Scalar(-c));
        return *this;
    }
    RingElement& operator*=(const Scalar& s) {
        if (ScalarTraits<Scalar>::is_zero(s)) {
            coeffs_.clear();
            return *this;
        }
        for (auto& [g, c] : coeffs_) c *= s;
        return *this;
    }

    friend RingElement operator+(RingElement a, const RingElement& b) { return a += b; }
    friend RingElement operator-(RingElement a, const RingElement& b) { return a -= b; }
    friend RingElement operator*(RingElement a, const Scalar& s) { return a *= s; }
    friend RingElement operator*(const Scalar& s, RingElement a) { return a *= s; }
    friend RingElement operator-(RingElement a) { return a *= Scalar(-1); }

    friend bool operator==(const RingElement& a, const RingElement& b) {
        return a.group_ == b.group_ && a.coeffs_ == b.coeffs_;
    }

    void require_same_group(const RingElement& o) const {
        if (!(group_ == o.group_)) {
            throw Error(ErrorCode::DescriptorMismatch,
                        "ring elements over " + group_.to_string() + " and " + o.group_.to_string());
        }
    }

private:
    GroupDescriptor group_;
    Map coeffs_;
};

using IntElement = RingElement<Integer>;
using RatElement = RingElement<Rational>;
using RealElement = RingElement<double>;

/// Indicator e(g) of a single group element.
template <RingScalar Scalar = Integer>
RingElement<Scalar> basis(const GroupDescriptor& group, const GroupElement& g) {
    return RingElement<Scalar>::basis(group, g);
}

/// (h h')_g = sum_{g'} h_{g'} h'_{g'^{-1} g}.
template <RingScalar Scalar>
RingElement<Scalar> convolve(const RingElement<Scalar>& h, const RingElement<Scalar>& h2) {
    h.require_same_group(h2);
    const auto& G = h.group();
    RingElement<Scalar> out(G);
    GroupElement prod{std::vector<std::int64_t>(G.dimension())};
    for (const auto& [a, ca] : h.coefficients()) {
        for (const auto& [b, cb] : h2.coefficients()) {
            G.multiply_into(a.coords, b.coords, prod.coords);
            out.add_term_unchecked(prod, Scalar(ca * cb));
        }
    }
    return out;
}

template <RingScalar Scalar>
RingElement<Scalar> operator*(const RingElement<Scalar>& a, const RingElement<Scalar>& b) {
    return convolve(a, b);
}

/// h*_g = h_{g^{-1}}.
template <RingScalar Scalar>
RingElement<Scalar> involute(const RingElement<Scalar>& h) {
    RingElement<Scalar> out(h.group());
    for (const auto& [g, c] : h.coefficients()) out.add_term_unchecked(h.group().inverse_unchecked(g), c);
    return out;
}

template <RingScalar Scalar>
Scalar norm_l1(const RingElement<Scalar>& h) {
    Scalar s(0);
    for (const auto& [g, c] : h.coefficients()) s += ScalarTraits<Scalar>::abs(c);
    return s;
}

template <RingScalar Scalar>
Scalar norm_linf(const RingElement<Scalar>& h) {
    Scalar s(0);
    for (const auto& [g, c] : h.coefficients()) {
        Scalar a = ScalarTraits<Scalar>::abs(c);
        if (a > s) s = a;
    }
    return s;
}

/// Coefficient at the identity (the von Neumann trace of the element).
template <RingScalar Scalar>
Scalar trace(const RingElement<Scalar>& h) {
    return h.coefficient(h.group().identity());
}

template <RingScalar Scalar>
bool is_self_adjoint(const RingElement<Scalar>& h) {
    return involute(h) == h;
}

/// h^k by repeated convolution, k >= 0.
template <RingScalar Scalar>
RingElement<Scalar> power(const RingElement<Scalar>& h, int k) {
    if (k < 0) throw Error(ErrorCode::Parameter, "negative ring power");
    RingElement<Scalar> out = RingElement<Scalar>::scalar(h.group(), Scalar(1));
    for (int i = 0; i < k; ++i) out = convolve(out, h);
    return out;
}

/// Evaluates sum_k q[k] t^k at t = h (Horner), exactly for exact scalars.
template <RingScalar Scalar>
RingElement<Scalar> evaluate_polynomial(const std::vector<Scalar>& q, const RingElement<Scalar>& h) {
    RingElement<Scalar> out(h.group());
    for (std::size_t k = q.size(); k-- > 0;) {
        out = convolve(out, h);
        out.add_term_unchecked(h.group().identity(), q[k]);
    }
    return out;
}

/// Widening conversion Integer -> Rational -> Float64. Narrowing does not compile.
template <RingScalar To, RingScalar From>
RingElement<To> convert(const RingElement<From>& h) {
    static_assert(ScalarTraits<To>::rank >= ScalarTraits<From>::rank, "narrowing scalar conversion");
    RingElement<To> out(h.group());
    for (const auto& [g, c] : h.coefficients()) {
        if constexpr (std::is_same_v<To, double>) {
            out.add_term_unchecked(g, ScalarTraits<From>::to_double(c));
        } else {
            out.add_term_unchecked(g, To(c));
        }
    }
    return out;
}

/// Keeps the coefficients whose support lies in `ball`; returns the l1 mass of
/// everything dropped alongside.
template <RingScalar Scalar>
std::pair<RingElement<Scalar>, Scalar> truncate_to_ball(const RingElement<Scalar>& h, const WordBall& ball) {
    RingElement<Scalar> out(h.group());
    Scalar dropped(0);
    for (const auto& [g, c] : h.coefficients()) {
        if (ball.contains(g)) {
            out.add_term_unchecked(g, c);
        } else {
            dropped += ScalarTraits<Scalar>::abs(c);
        }
    }
    return {std::move(out), dropped};
}

/// Largest word length of the support with respect to the standard generators.
/// Throws Capacity when the support is not inside the ball of radius `max_radius`.
int support_radius(const RingElement<double>& h, int max_radius = 256);
int support_radius(const RingElement<Integer>& h, int max_radius = 256);

template <RingScalar Scalar>
std::string to_string(const RingElement<Scalar>& h) {
    if (h.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [g, c] : h.coefficients()) {
        if (!first) os << " + ";
        first = false;
        os << c << "*e" << to_string(g);
    }
    return os.str();
}

}  // namespace fkdet
