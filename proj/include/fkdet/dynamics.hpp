#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fkdet/exact_linalg.hpp"
#include "fkdet/group_ring.hpp"
#include "fkdet/groups.hpp"
#include "fkdet/inversion.hpp"

namespace fkdet {

/// A point of X = T^Gamma known on a window, or exactly as a Gamma_n-periodic point.
struct TorusPoint {
    GroupDescriptor group;
    /// Window mode: residues in [0, 1) at the known coordinates.
    std::map<GroupElement, double> values;
    /// Periodic mode: exact residues indexed like period->elements().
    std::optional<FiniteQuotient> period;
    std::vector<Rational> residues;
    /// Known absolute error of every window value (before reduction mod 1).
    double tolerance = 0.0;

    bool periodic() const noexcept { return period.has_value(); }
    /// Value at a coordinate; throws Window when it is not known.
    double at(const GroupElement& g) const;

    static TorusPoint zero(const GroupDescriptor& group, const std::vector<GroupElement>& window);
};

/// Distance to the nearest integer, the metric d on T.
double torus_distance(double t);

/// max over fully covered gamma of the distance of sum_s f_s x_{gamma s} to Z. Zero for an exact periodic
/// point in X_f. Throws Window when no coordinate is fully covered.
double membership_residual(const TorusPoint& x, const RealElement& f);
bool exact_membership(const TorusPoint& x, const IntElement& f);

/// x_f^Delta = eta((f^{-1})^*) on the ball of radius R.
TorusPoint homoclinic_point(const IntElement& f, int radius, double tail_target = 1e-12);
TorusPoint homoclinic_point(const L1Inverse& inverse, int radius);

/// eta(rho_{f^{-1}} v) on the window, for finitely supported integer v.
TorusPoint xi_map(const IntElement& v, const L1Inverse& inverse, const std::vector<GroupElement>& window);

/// Integer-valued v with xi(v) = x: the periodic case is exact.
struct Lift {
    std::optional<FiniteQuotient> period;
    std::vector<Integer> periodic_values;
    std::map<GroupElement, Integer> values;
    Integer sup_norm;
};

Lift lift_point(const TorusPoint& x, const IntElement& f);

/// eta(rho_{f^{-1}} v) for Gamma_n-periodic v, exactly: solves rho_{f^(n)} w = v over Q.
TorusPoint xi_map_periodic(const Lift& v, const IntElement& f);

struct GlueResult {
    TorusPoint y;
    std::vector<GroupElement> window_f;
    /// Largest d(x_i, y) over C_i, tail error included.
    double max_distance_1 = 0.0;
    double max_distance_2 = 0.0;
    double epsilon = 0.0;
    /// Whether the left-multiplied sets F C_1, F C_2 are disjoint too (they coincide with C_i F on abelian groups).
    bool left_windows_disjoint = false;
};

/// Finite F with sum outside F of |(f^{-1})_gamma| + tail < epsilon / ||f||_1, taken greedily by |coefficient|.
std::vector<GroupElement> specification_window(const L1Inverse& inverse, double f_norm, double epsilon);

/// y in X_f with d(x_i at gamma, y at gamma) < epsilon on C_i, i = 1, 2.
GlueResult specification_glue(const TorusPoint& x1, const TorusPoint& x2, const std::vector<GroupElement>& c1,
                              const std::vector<GroupElement>& c2, double epsilon, const IntElement& f,
                              double tail_target = 1e-12);

struct FixedPointGroup {
    FiniteQuotient quotient;
    /// Elementary divisors; zeros mark an infinite fixed group.
    std::vector<Integer> smith_diagonal;
    IntegerMatrix right;
    std::optional<Integer> count;
    /// Common denominator: the largest elementary divisor.
    Integer denominator;
    /// Numerators of every point, sorted, when count <= cap.
    std::vector<std::vector<Integer>> points;
    bool enumerated = false;
    /// min over distinct pairs of max_gamma d(x_gamma, x'_gamma), as numerator over `denominator`.
    std::optional<Integer> min_separation;
    bool separation_holds = false;

    TorusPoint point(std::size_t i) const;
};

FixedPointGroup enumerate_fixed_points(const IntElement& f, const FiniteQuotient& q, std::size_t cap = 10000);

/// "p/q" strings for every coordinate of a periodic point.
std::vector<std::string> rational_strings(const TorusPoint& x);

/// Distance near the identity between xi(v restricted to the ball of radius r) and the periodic point x,
/// where v is the exact lift of x. A finite stand-in for density of homoclinic points.
double homoclinic_approximation_error(const TorusPoint& x, const IntElement& f, const L1Inverse& inverse, int radius);

}  // namespace fkdet
