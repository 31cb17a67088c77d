#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace fkdet {

/// Canonical coordinate tuple of a group element. Two elements of the same group
/// are equal iff their tuples are equal; the identity is the all-zero tuple.
struct GroupElement {
    std::vector<std::int64_t> coords;

    GroupElement() = default;
    explicit GroupElement(std::vector<std::int64_t> c) : coords(std::move(c)) {}
    GroupElement(std::initializer_list<std::int64_t> c) : coords(c) {}

    std::size_t size() const noexcept { return coords.size(); }
    std::int64_t operator[](std::size_t i) const { return coords[i]; }
    bool is_zero() const noexcept;

    auto operator<=>(const GroupElement&) const = default;
    bool operator==(const GroupElement&) const = default;
};

std::string to_string(const GroupElement& g);

struct GroupElementHash {
    std::size_t operator()(const GroupElement& g) const noexcept;
};

enum class GroupKind { FreeAbelian, Heisenberg3, DirectProduct, FiniteCyclicProduct, Quotient };

class GroupDescriptor;

struct NamedGenerator {
    std::string name;
    GroupElement element;
};

/// Immutable handle describing one group of the catalog: Z^d, the discrete
/// Heisenberg group with law (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x*y'),
/// direct products, finite cyclic products, and finite congruence quotients
/// of any of these. Copies share the underlying description.
class GroupDescriptor {
public:
    static GroupDescriptor free_abelian(int rank);
    static GroupDescriptor heisenberg();
    static GroupDescriptor direct_product(std::vector<GroupDescriptor> factors);
    static GroupDescriptor finite_cyclic_product(std::vector<std::int64_t> moduli);

    GroupKind kind() const noexcept;
    /// Length of the canonical tuple.
    std::size_t dimension() const noexcept;
    /// Rank of Z^d; zero for the other kinds.
    int rank() const noexcept;
    const std::vector<GroupDescriptor>& factors() const;
    /// Moduli of a finite cyclic product, or the reduction moduli of a quotient.
    const std::vector<std::int64_t>& moduli() const;
    /// Parent group of a quotient.
    const GroupDescriptor& parent() const;

    bool is_finite() const noexcept;
    std::optional<std::size_t> order() const noexcept;

    GroupElement identity() const;
    bool contains(const GroupElement& g) const noexcept;

    /// Checked group law; throws DescriptorMismatch for foreign tuples.
    GroupElement multiply(const GroupElement& g, const GroupElement& h) const;
    GroupElement inverse(const GroupElement& g) const;

    /// Unchecked variants for inner loops. `out` must have dimension() entries
    /// and may not alias the inputs.
    void multiply_into(std::span<const std::int64_t> g, std::span<const std::int64_t> h,
                       std::span<std::int64_t> out) const;
    GroupElement multiply_unchecked(const GroupElement& g, const GroupElement& h) const;
    GroupElement inverse_unchecked(const GroupElement& g) const;

    /// Standard symmetric-free generating set with stable names
    /// (x, y, z / x0..x{d-1} for Z^d; a, b for Heisenberg; u0.. for finite
    /// cyclic products; factor names suffixed with _i in direct products).
    std::vector<NamedGenerator> generators() const;
    std::optional<GroupElement> generator(const std::string& name) const;

    std::string to_string() const;

    friend bool operator==(const GroupDescriptor& a, const GroupDescriptor& b);

    struct Data;

private:
    explicit GroupDescriptor(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
    friend class FiniteQuotient;
    static GroupDescriptor quotient(const GroupDescriptor& parent, std::vector<std::int64_t> moduli);

    std::shared_ptr<const Data> data_;
};

/// Free functions mirroring the group law, checked against `group`.
GroupElement multiply(const GroupDescriptor& group, const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupDescriptor& group, const GroupElement& g);

inline constexpr std::size_t kDefaultBallCap = 1'000'000;

/// Word ball B_F(r), materialized in breadth-first order: elements are sorted
/// by word length and lexicographically within each sphere.
class WordBall {
public:
    int radius() const noexcept { return radius_; }
    std::size_t size() const noexcept { return elements_.size(); }
    const std::vector<GroupElement>& elements() const noexcept { return elements_; }
    const std::vector<int>& lengths() const noexcept { return lengths_; }
    bool contains(const GroupElement& g) const;
    /// Word length of g, or -1 when g lies outside the ball.
    int length(const GroupElement& g) const;
    std::optional<std::size_t> index_of(const GroupElement& g) const;
    /// Elements of the sphere of radius r, as a subrange of elements().
    std::span<const GroupElement> sphere(int r) const;
    const std::vector<GroupElement>& generators() const noexcept { return generators_; }

private:
    friend WordBall word_ball(const GroupDescriptor&, std::span<const GroupElement>, int, std::size_t);
    int radius_ = 0;
    std::vector<GroupElement> elements_;
    std::vector<int> lengths_;
    std::vector<std::size_t> sphere_start_;
    std::vector<GroupElement> generators_;
    std::unordered_map<GroupElement, std::size_t, GroupElementHash> index_;
};

/// Breadth-first closure of a generating set (symmetrized internally).
/// Throws Capacity when the ball would exceed `cap` elements.
WordBall word_ball(const GroupDescriptor& group, std::span<const GroupElement> generators, int radius,
                   std::size_t cap = kDefaultBallCap);

/// Ball with respect to the group's standard generators.
WordBall word_ball(const GroupDescriptor& group, int radius, std::size_t cap = kDefaultBallCap);

std::vector<GroupElement> standard_generators(const GroupDescriptor& group);

/// Finite quotient obtained by reducing canonical coordinates modulo `moduli`
/// (componentwise congruence quotient). Elements are enumerated in
/// lexicographic tuple order; index_of is the mixed-radix position.
class FiniteQuotient {
public:
    FiniteQuotient(const GroupDescriptor& parent, std::vector<std::int64_t> moduli);

    /// All coordinates reduced modulo m (m^d for Z^d, m^3 for Heisenberg).
    static FiniteQuotient congruence(const GroupDescriptor& parent, std::int64_t m);

    const GroupDescriptor& parent() const noexcept { return parent_; }
    /// The quotient group itself, usable as the group of a ring element.
    const GroupDescriptor& group() const noexcept { return group_; }
    const std::vector<std::int64_t>& moduli() const noexcept { return moduli_; }
    std::size_t order() const noexcept { return order_; }
    const std::vector<GroupElement>& elements() const noexcept { return elements_; }

    std::size_t index_of(const GroupElement& residue) const;
    std::size_t index_of(std::span<const std::int64_t> residue) const;
    GroupElement project(const GroupElement& g) const;
    std::size_t project_index(const GroupElement& g) const;
    bool in_kernel(const GroupElement& g) const;
    /// Representative in the parent with coordinates in the symmetric range
    /// (-m/2, m/2].
    GroupElement symmetric_lift(const GroupElement& residue) const;

    friend bool operator==(const FiniteQuotient& a, const FiniteQuotient& b) {
        return a.parent_ == b.parent_ && a.moduli_ == b.moduli_;
    }

private:
    GroupDescriptor parent_;
    GroupDescriptor group_;
    std::vector<std::int64_t> moduli_;
    std::vector<std::size_t> strides_;
    std::size_t order_ = 0;
    std::vector<GroupElement> elements_;
};

/// Nested congruence quotients with strictly increasing orders and
/// componentwise divisible moduli.
class QuotientChain {
public:
    QuotientChain(const GroupDescriptor& parent, const std::vector<std::int64_t>& level_moduli);
    explicit QuotientChain(std::vector<FiniteQuotient> levels);

    const GroupDescriptor& parent() const noexcept { return levels_.front().parent(); }
    std::size_t size() const noexcept { return levels_.size(); }
    const FiniteQuotient& operator[](std::size_t i) const { return levels_.at(i); }
    const std::vector<FiniteQuotient>& levels() const noexcept { return levels_; }
    auto begin() const noexcept { return levels_.begin(); }
    auto end() const noexcept { return levels_.end(); }

private:
    void validate() const;
    std::vector<FiniteQuotient> levels_;
};

/// Least level whose kernel meets K^{-1}K only in the identity. Throws
/// ChainTooShort when no level separates K.
std::size_t verify_chain_separation(const QuotientChain& chain, std::span<const GroupElement> K);

/// The set {k^{-1} k' : k, k' in K}, sorted.
std::vector<GroupElement> difference_set(const GroupDescriptor& group, std::span<const GroupElement> K);

}  // namespace fkdet
