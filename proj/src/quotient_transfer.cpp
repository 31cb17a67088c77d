#include "fkdet/quotient_transfer.hpp"

#include <iomanip>
#include <ostream>

namespace fkdet {

FiniteQuotient quotient_of(const GroupDescriptor& quotient_group) {
    if (quotient_group.kind() != GroupKind::Quotient) {
        throw Error(ErrorCode::DescriptorMismatch, quotient_group.to_string() + " is not a congruence quotient");
    }
    return FiniteQuotient(quotient_group.parent(), quotient_group.moduli());
}

namespace {

void check_cap(const FiniteQuotient& q, std::size_t cap) {
    if (q.order() > cap) {
        throw Error(ErrorCode::Capacity, "quotient order " + std::to_string(q.order()) + " exceeds dense cap " +
                                             std::to_string(cap) + "; use the polynomial trace method (cheb)");
    }
}

void check_group(const GroupDescriptor& g, const FiniteQuotient& q) {
    if (!(g == q.group())) {
        throw Error(ErrorCode::DescriptorMismatch, "element over " + g.to_string() + " is not on " + q.group().to_string());
    }
}

}  // namespace

std::vector<std::vector<std::uint32_t>> right_shift_tables(const FiniteQuotient& q,
                                                          const std::vector<GroupElement>& shifts) {
    const auto& G = q.group();
    const auto& els = q.elements();
    std::vector<std::vector<std::uint32_t>> out(shifts.size(), std::vector<std::uint32_t>(q.order()));
    GroupElement prod{std::vector<std::int64_t>(G.dimension())};
    for (std::size_t s = 0; s < shifts.size(); ++s) {
        for (std::size_t i = 0; i < els.size(); ++i) {
            G.multiply_into(els[i].coords, shifts[s].coords, prod.coords);
            out[s][i] = static_cast<std::uint32_t>(q.index_of(prod));
        }
    }
    return out;
}

QuotientOperator operator_matrix(const RealElement& fq, const FiniteQuotient& q, std::size_t dense_cap) {
    check_group(fq.group(), q);
    check_cap(q, dense_cap);
    const std::size_t n = q.order();
    QuotientOperator op{q, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)),
                        is_self_adjoint(fq)};
    std::vector<GroupElement> shifts;
    std::vector<double> values;
    for (const auto& [s, c] : fq.coefficients()) {
        shifts.push_back(s);
        values.push_back(c);
    }
    // M[i][j] = f(g_i^{-1} g_j): the entry for shift s sits at column index(g_i s)
    const auto tables = right_shift_tables(q, shifts);
    for (std::size_t s = 0; s < shifts.size(); ++s) {
        for (std::size_t i = 0; i < n; ++i) op.matrix(static_cast<Eigen::Index>(i), tables[s][i]) += values[s];
    }
    return op;
}

QuotientOperator operator_matrix(const RealElement& fq, std::size_t dense_cap) {
    return operator_matrix(fq, quotient_of(fq.group()), dense_cap);
}

IntegerQuotientOperator integer_operator_matrix(const IntElement& fq, const FiniteQuotient& q, std::size_t dense_cap) {
    check_group(fq.group(), q);
    check_cap(q, dense_cap);
    const std::size_t n = q.order();
    IntegerQuotientOperator op{q, IntegerMatrix(n, n)};
    std::vector<GroupElement> shifts;
    std::vector<Integer> values;
    for (const auto& [s, c] : fq.coefficients()) {
        shifts.push_back(s);
        values.push_back(c);
    }
    const auto tables = right_shift_tables(q, shifts);
    for (std::size_t s = 0; s < shifts.size(); ++s) {
        for (std::size_t i = 0; i < n; ++i) op.matrix(i, tables[s][i]) += values[s];
    }
    return op;
}

QuotientOperator transfer(const RealElement& f, const FiniteQuotient& q, std::size_t dense_cap) {
    return operator_matrix(fibre_integrate(f, q), q, dense_cap);
}

IntegerQuotientOperator transfer(const IntElement& f, const FiniteQuotient& q, std::size_t dense_cap) {
    return integer_operator_matrix(fibre_integrate(f, q), q, dense_cap);
}

void write_operator_csv(std::ostream& os, const QuotientOperator& op) {
    const auto& els = op.quotient.elements();
    os << "row";
    for (const auto& g : els) os << ",\"" << to_string(g) << '"';
    os << '\n';
    os << std::setprecision(17);
    for (std::size_t i = 0; i < els.size(); ++i) {
        os << '"' << to_string(els[i]) << '"';
        for (std::size_t j = 0; j < els.size(); ++j) os << ',' << op.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        os << '\n';
    }
}

}  // namespace fkdet
