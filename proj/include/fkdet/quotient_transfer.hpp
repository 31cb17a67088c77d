#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "fkdet/exact_linalg.hpp"
#include "fkdet/group_ring.hpp"
#include "fkdet/groups.hpp"

namespace fkdet {

inline constexpr std::size_t kDenseCap = 8192;

/// f^{(n)}(delta) = sum of f over the fibre above delta. The result lives on
/// q.group().
template <RingScalar Scalar>
RingElement<Scalar> fibre_integrate(const RingElement<Scalar>& f, const FiniteQuotient& q) {
    if (!(f.group() == q.parent())) {
        throw Error(ErrorCode::DescriptorMismatch,
                    "element over " + f.group().to_string() + " projected to a quotient of " + q.parent().to_string());
    }
    RingElement<Scalar> out(q.group());
    for (const auto& [g, c] : f.coefficients()) out.add_term_unchecked(q.project(g), c);
    return out;
}

/// Rebuilds the quotient object behind a quotient group descriptor.
FiniteQuotient quotient_of(const GroupDescriptor& quotient_group);

/// Matrix of right convolution by f* on the quotient, in the index order of
/// q.elements(): M[i][j] = f(g_i^{-1} g_j).
struct QuotientOperator {
    FiniteQuotient quotient;
    Eigen::MatrixXd matrix;
    bool symmetric = false;
};

struct IntegerQuotientOperator {
    FiniteQuotient quotient;
    IntegerMatrix matrix;
};

QuotientOperator operator_matrix(const RealElement& fq, const FiniteQuotient& q, std::size_t dense_cap = kDenseCap);
QuotientOperator operator_matrix(const RealElement& fq, std::size_t dense_cap = kDenseCap);
IntegerQuotientOperator integer_operator_matrix(const IntElement& fq, const FiniteQuotient& q,
                                                std::size_t dense_cap = kDenseCap);

/// Projects f from the parent and assembles its operator in one step.
QuotientOperator transfer(const RealElement& f, const FiniteQuotient& q, std::size_t dense_cap = kDenseCap);
IntegerQuotientOperator transfer(const IntElement& f, const FiniteQuotient& q, std::size_t dense_cap = kDenseCap);

/// Index tables for sparse right multiplication on the quotient:
/// table[s][i] = index of (g_i * shift_s). Shared by the trace and iteration code.
std::vector<std::vector<std::uint32_t>> right_shift_tables(const FiniteQuotient& q,
                                                          const std::vector<GroupElement>& shifts);

/// Row-major CSV with a header row of quotient element tuples.
void write_operator_csv(std::ostream& os, const QuotientOperator& op);

}  // namespace fkdet
