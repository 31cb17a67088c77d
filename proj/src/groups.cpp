#include "fkdet/groups.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "fkdet/errors.hpp"

namespace fkdet {

namespace {

inline std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

// Enumeration beyond this many quotient elements is refused outright.
constexpr std::size_t kMaxQuotientOrder = std::size_t{1} << 26;

}  // namespace

bool GroupElement::is_zero() const noexcept {
    return std::all_of(coords.begin(), coords.end(), [](std::int64_t c) { return c == 0; });
}

std::string to_string(const GroupElement& g) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < g.coords.size(); ++i) {
        if (i) os << ',';
        os << g.coords[i];
    }
    os << ')';
    return os.str();
}

std::size_t GroupElementHash::operator()(const GroupElement& g) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL ^ g.coords.size();
    for (std::int64_t c : g.coords) {
        h ^= std::hash<std::int64_t>{}(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

struct GroupDescriptor::Data {
    GroupKind kind = GroupKind::FreeAbelian;
    int rank = 0;
    std::size_t dim = 0;
    std::vector<GroupDescriptor> factors;
    std::vector<std::size_t> offsets;
    std::vector<std::int64_t> moduli;
    std::vector<GroupDescriptor> parent;  // zero or one entry
};

GroupDescriptor GroupDescriptor::free_abelian(int rank) {
    if (rank < 1) throw Error(ErrorCode::Parameter, "free abelian rank must be >= 1");
    auto d = std::make_shared<Data>();
    d->kind = GroupKind::FreeAbelian;
    d->rank = rank;
    d->dim = static_cast<std::size_t>(rank);
    return GroupDescriptor(std::move(d));
}

GroupDescriptor GroupDescriptor::heisenberg() {
    auto d = std::make_shared<Data>();
    d->kind = GroupKind::Heisenberg3;
    d->dim = 3;
    return GroupDescriptor(std::move(d));
}

GroupDescriptor GroupDescriptor::direct_product(std::vector<GroupDescriptor> factors) {
    if (factors.empty()) throw Error(ErrorCode::Parameter, "direct product needs at least one factor");
    auto d = std::make_shared<Data>();
    d->kind = GroupKind::DirectProduct;
    std::size_t off = 0;
    for (const auto& f : factors) {
        d->offsets.push_back(off);
        off += f.dimension();
    }
    d->dim = off;
    d->factors = std::move(factors);
    return GroupDescriptor(std::move(d));
}

GroupDescriptor GroupDescriptor::finite_cyclic_product(std::vector<std::int64_t> moduli) {
    if (moduli.empty()) throw Error(ErrorCode::Parameter, "finite cyclic product needs at least one modulus");
    for (auto m : moduli) {
        if (m < 1) throw Error(ErrorCode::Parameter, "cyclic moduli must be >= 1");
    }
    auto d = std::make_shared<Data>();
    d->kind = GroupKind::FiniteCyclicProduct;
    d->dim = moduli.size();
    d->moduli = std::move(moduli);
    return GroupDescriptor(std::move(d));
}

GroupDescriptor GroupDescriptor::quotient(const GroupDescriptor& parent, std::vector<std::int64_t> moduli) {
    auto d = std::make_shared<Data>();
    d->kind = GroupKind::Quotient;
    d->dim = parent.dimension();
    d->moduli = std::move(moduli);
    d->parent.push_back(parent);
    return GroupDescriptor(std::move(d));
}

GroupKind GroupDescriptor::kind() const noexcept { return data_->kind; }
std::size_t GroupDescriptor::dimension() const noexcept { return data_->dim; }
int GroupDescriptor::rank() const noexcept { return data_->rank; }
const std::vector<GroupDescriptor>& GroupDescriptor::factors() const { return data_->factors; }
const std::vector<std::int64_t>& GroupDescriptor::moduli() const { return data_->moduli; }

const GroupDescriptor& GroupDescriptor::parent() const {
    if (data_->parent.empty()) throw Error(ErrorCode::Parameter, "group has no parent: " + to_string());
    return data_->parent.front();
}

bool GroupDescriptor::is_finite() const noexcept { return order().has_value(); }

std::optional<std::size_t> GroupDescriptor::order() const noexcept {
    switch (kind()) {
        case GroupKind::FreeAbelian:
        case GroupKind::Heisenberg3: return std::nullopt;
        case GroupKind::FiniteCyclicProduct:
        case GroupKind::Quotient: {
            std::size_t n = 1;
            for (auto m : data_->moduli) n *= static_cast<std::size_t>(m);
            return n;
        }
        case GroupKind::DirectProduct: {
            std::size_t n = 1;
            for (const auto& f : data_->factors) {
                auto o = f.order();
                if (!o) return std::nullopt;
                n *= *o;
            }
            return n;
        }
    }
    return std::nullopt;
}

GroupElement GroupDescriptor::identity() const { return GroupElement(std::vector<std::int64_t>(dimension(), 0)); }

bool GroupDescriptor::contains(const GroupElement& g) const noexcept {
    if (g.size() != dimension()) return false;
    switch (kind()) {
        case GroupKind::FreeAbelian:
        case GroupKind::Heisenberg3: return true;
        case GroupKind::FiniteCyclicProduct:
        case GroupKind::Quotient:
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (g[i] < 0 || g[i] >= data_->moduli[i]) return false;
            }
            return true;
        case GroupKind::DirectProduct:
            for (std::size_t f = 0; f < data_->factors.size(); ++f) {
                const auto& fac = data_->factors[f];
                GroupElement part(std::vector<std::int64_t>(g.coords.begin() + static_cast<std::ptrdiff_t>(data_->offsets[f]),
                                                            g.coords.begin() + static_cast<std::ptrdiff_t>(data_->offsets[f] + fac.dimension())));
                if (!fac.contains(part)) return false;
            }
            return true;
    }
    return false;
}

void GroupDescriptor::multiply_into(std::span<const std::int64_t> g, std::span<const std::int64_t> h,
                                    std::span<std::int64_t> out) const {
    switch (kind()) {
        case GroupKind::FreeAbelian:
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = g[i] + h[i];
            return;
        case GroupKind::Heisenberg3:
            out[0] = g[0] + h[0];
            out[1] = g[1] + h[1];
            out[2] = g[2] + h[2] + g[0] * h[1];
            return;
        case GroupKind::FiniteCyclicProduct:
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = floor_mod(g[i] + h[i], data_->moduli[i]);
            return;
        case GroupKind::DirectProduct:
            for (std::size_t f = 0; f < data_->factors.size(); ++f) {
                const std::size_t off = data_->offsets[f];
                const std::size_t k = data_->factors[f].dimension();
                data_->factors[f].multiply_into(g.subspan(off, k), h.subspan(off, k), out.subspan(off, k));
            }
            return;
        case GroupKind::Quotient:
            data_->parent.front().multiply_into(g, h, out);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = floor_mod(out[i], data_->moduli[i]);
            return;
    }
}

GroupElement GroupDescriptor::multiply_unchecked(const GroupElement& g, const GroupElement& h) const {
    GroupElement out{std::vector<std::int64_t>(dimension())};
    multiply_into(g.coords, h.coords, out.coords);
    return out;
}

GroupElement GroupDescriptor::inverse_unchecked(const GroupElement& g) const {
    GroupElement out{std::vector<std::int64_t>(dimension())};
    switch (kind()) {
        case GroupKind::FreeAbelian:
            for (std::size_t i = 0; i < g.size(); ++i) out.coords[i] = -g[i];
            break;
        case GroupKind::Heisenberg3:
            out.coords = {-g[0], -g[1], -g[2] + g[0] * g[1]};
            break;
        case GroupKind::FiniteCyclicProduct:
            for (std::size_t i = 0; i < g.size(); ++i) out.coords[i] = floor_mod(-g[i], data_->moduli[i]);
            break;
        case GroupKind::DirectProduct:
            for (std::size_t f = 0; f < data_->factors.size(); ++f) {
                const auto& fac = data_->factors[f];
                const auto off = static_cast<std::ptrdiff_t>(data_->offsets[f]);
                GroupElement part(std::vector<std::int64_t>(g.coords.begin() + off,
                                                            g.coords.begin() + off + static_cast<std::ptrdiff_t>(fac.dimension())));
                auto inv = fac.inverse_unchecked(part);
                std::copy(inv.coords.begin(), inv.coords.end(), out.coords.begin() + off);
            }
            break;
        case GroupKind::Quotient:
            out = data_->parent.front().inverse_unchecked(g);
            for (std::size_t i = 0; i < out.size(); ++i) out.coords[i] = floor_mod(out.coords[i], data_->moduli[i]);
            break;
    }
    return out;
}

GroupElement GroupDescriptor::multiply(const GroupElement& g, const GroupElement& h) const {
    if (!contains(g) || !contains(h)) {
        throw Error(ErrorCode::DescriptorMismatch,
                    "elements " + fkdet::to_string(g) + ", " + fkdet::to_string(h) + " do not belong to " + to_string());
    }
    return multiply_unchecked(g, h);
}

GroupElement GroupDescriptor::inverse(const GroupElement& g) const {
    if (!contains(g)) {
        throw Error(ErrorCode::DescriptorMismatch, "element " + fkdet::to_string(g) + " does not belong to " + to_string());
    }
    return inverse_unchecked(g);
}

std::vector<NamedGenerator> GroupDescriptor::generators() const {
    std::vector<NamedGenerator> out;
    auto unit = [&](std::size_t i) {
        GroupElement e = identity();
        e.coords[i] = 1;
        return e;
    };
    switch (kind()) {
        case GroupKind::FreeAbelian: {
            static const char* small[] = {"x", "y", "z"};
            for (int i = 0; i < rank(); ++i) {
                std::string name = rank() <= 3 ? small[i] : "x" + std::to_string(i);
                out.push_back({name, unit(static_cast<std::size_t>(i))});
            }
            break;
        }
        case GroupKind::Heisenberg3:
            out.push_back({"a", GroupElement{1, 0, 0}});
            out.push_back({"b", GroupElement{0, 1, 0}});
            break;
        case GroupKind::FiniteCyclicProduct:
            for (std::size_t i = 0; i < dimension(); ++i) {
                GroupElement e = identity();
                e.coords[i] = floor_mod(1, data_->moduli[i]);
                out.push_back({"u" + std::to_string(i), e});
            }
            break;
        case GroupKind::DirectProduct:
            for (std::size_t f = 0; f < data_->factors.size(); ++f) {
                for (const auto& gen : data_->factors[f].generators()) {
                    GroupElement e = identity();
                    std::copy(gen.element.coords.begin(), gen.element.coords.end(),
                              e.coords.begin() + static_cast<std::ptrdiff_t>(data_->offsets[f]));
                    out.push_back({gen.name + "_" + std::to_string(f), e});
                }
            }
            break;
        case GroupKind::Quotient:
            for (auto gen : data_->parent.front().generators()) {
                for (std::size_t i = 0; i < gen.element.size(); ++i) {
                    gen.element.coords[i] = floor_mod(gen.element.coords[i], data_->moduli[i]);
                }
                out.push_back(std::move(gen));
            }
            break;
    }
    return out;
}

std::optional<GroupElement> GroupDescriptor::generator(const std::string& name) const {
    for (auto& g : generators()) {
        if (g.name == name) return g.element;
    }
    return std::nullopt;
}

std::string GroupDescriptor::to_string() const {
    std::ostringstream os;
    switch (kind()) {
        case GroupKind::FreeAbelian:
            os << "Z";
            if (rank() > 1) os << '^' << rank();
            break;
        case GroupKind::Heisenberg3: os << "H3"; break;
        case GroupKind::FiniteCyclicProduct:
            for (std::size_t i = 0; i < data_->moduli.size(); ++i) os << (i ? " x " : "") << "Z/" << data_->moduli[i];
            break;
        case GroupKind::DirectProduct:
            for (std::size_t i = 0; i < data_->factors.size(); ++i) os << (i ? " x " : "") << '(' << data_->factors[i].to_string() << ')';
            break;
        case GroupKind::Quotient:
            os << data_->parent.front().to_string() << " mod (";
            for (std::size_t i = 0; i < data_->moduli.size(); ++i) os << (i ? "," : "") << data_->moduli[i];
            os << ')';
            break;
    }
    return os.str();
}

bool operator==(const GroupDescriptor& a, const GroupDescriptor& b) {
    if (a.data_ == b.data_) return true;
    if (a.kind() != b.kind() || a.dimension() != b.dimension()) return false;
    switch (a.kind()) {
        case GroupKind::FreeAbelian: return a.rank() == b.rank();
        case GroupKind::Heisenberg3: return true;
        case GroupKind::FiniteCyclicProduct: return a.moduli() == b.moduli();
        case GroupKind::DirectProduct: return a.factors() == b.factors();
        case GroupKind::Quotient: return a.moduli() == b.moduli() && a.parent() == b.parent();
    }
    return false;
}

GroupElement multiply(const GroupDescriptor& group, const GroupElement& g, const GroupElement& h) {
    return group.multiply(g, h);
}

GroupElement inverse(const GroupDescriptor& group, const GroupElement& g) { return group.inverse(g); }

// ---------------------------------------------------------------------------
// Word balls

bool WordBall::contains(const GroupElement& g) const { return index_.count(g) != 0; }

int WordBall::length(const GroupElement& g) const {
    auto it = index_.find(g);
    return it == index_.end() ? -1 : lengths_[it->second];
}

std::optional<std::size_t> WordBall::index_of(const GroupElement& g) const {
    auto it = index_.find(g);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::span<const GroupElement> WordBall::sphere(int r) const {
    if (r < 0 || r > radius_) return {};
    const std::size_t lo = sphere_start_[static_cast<std::size_t>(r)];
    const std::size_t hi = sphere_start_[static_cast<std::size_t>(r) + 1];
    return std::span<const GroupElement>(elements_).subspan(lo, hi - lo);
}

WordBall word_ball(const GroupDescriptor& group, std::span<const GroupElement> generators, int radius, std::size_t cap) {
    if (radius < 0) throw Error(ErrorCode::Parameter, "word ball radius must be nonnegative");
    const GroupElement id = group.identity();
    std::set<GroupElement> gens;
    for (const auto& g : generators) {
        if (!group.contains(g)) throw Error(ErrorCode::DescriptorMismatch, "generator " + to_string(g) + " not in " + group.to_string());
        if (g == id) continue;
        gens.insert(g);
        gens.insert(group.inverse_unchecked(g));
    }

    WordBall ball;
    ball.radius_ = radius;
    ball.generators_.assign(gens.begin(), gens.end());
    ball.elements_.push_back(id);
    ball.lengths_.push_back(0);
    ball.index_.emplace(id, 0);
    ball.sphere_start_ = {0, 1};

    std::size_t frontier_lo = 0;
    for (int r = 1; r <= radius; ++r) {
        const std::size_t frontier_hi = ball.elements_.size();
        std::vector<GroupElement> sphere;
        std::unordered_map<GroupElement, bool, GroupElementHash> seen;
        for (std::size_t i = frontier_lo; i < frontier_hi; ++i) {
            for (const auto& s : ball.generators_) {
                GroupElement next = group.multiply_unchecked(ball.elements_[i], s);
                if (ball.index_.count(next) || seen.count(next)) continue;
                seen.emplace(next, true);
                sphere.push_back(std::move(next));
            }
        }
        if (ball.elements_.size() + sphere.size() > cap) {
            throw Error(ErrorCode::Capacity, "word ball of radius " + std::to_string(radius) + " in " + group.to_string() +
                                                 " exceeds the element cap " + std::to_string(cap));
        }
        std::sort(sphere.begin(), sphere.end());
        for (auto& g : sphere) {
            ball.index_.emplace(g, ball.elements_.size());
            ball.elements_.push_back(std::move(g));
            ball.lengths_.push_back(r);
        }
        ball.sphere_start_.push_back(ball.elements_.size());
        frontier_lo = frontier_hi;
    }
    return ball;
}

std::vector<GroupElement> standard_generators(const GroupDescriptor& group) {
    std::vector<GroupElement> out;
    for (auto& g : group.generators()) out.push_back(std::move(g.element));
    return out;
}

WordBall word_ball(const GroupDescriptor& group, int radius, std::size_t cap) {
    const auto gens = standard_generators(group);
    return word_ball(group, gens, radius, cap);
}

// ---------------------------------------------------------------------------
// Finite quotients

namespace {

void validate_quotient_moduli(const GroupDescriptor& parent, std::span<const std::int64_t> moduli) {
    for (auto m : moduli) {
        if (m < 1) throw Error(ErrorCode::Parameter, "quotient moduli must be >= 1");
    }
    switch (parent.kind()) {
        case GroupKind::FreeAbelian: return;
        case GroupKind::Heisenberg3:
            if (moduli[0] % moduli[2] != 0 || moduli[1] % moduli[2] != 0) {
                throw Error(ErrorCode::Parameter, "Heisenberg quotient needs the central modulus to divide the others");
            }
            return;
        case GroupKind::FiniteCyclicProduct:
        case GroupKind::Quotient:
            for (std::size_t i = 0; i < moduli.size(); ++i) {
                if (parent.moduli()[i] % moduli[i] != 0) {
                    throw Error(ErrorCode::Parameter, "quotient modulus must divide the modulus of the finite parent");
                }
            }
            if (parent.kind() == GroupKind::Quotient) validate_quotient_moduli(parent.parent(), moduli);
            return;
        case GroupKind::DirectProduct: {
            std::size_t off = 0;
            for (const auto& f : parent.factors()) {
                validate_quotient_moduli(f, moduli.subspan(off, f.dimension()));
                off += f.dimension();
            }
            return;
        }
    }
}

std::vector<std::int64_t> congruence_moduli(const GroupDescriptor& g, std::int64_t m) {
    switch (g.kind()) {
        case GroupKind::FreeAbelian:
        case GroupKind::Heisenberg3: return std::vector<std::int64_t>(g.dimension(), m);
        case GroupKind::FiniteCyclicProduct:
        case GroupKind::Quotient: {
            std::vector<std::int64_t> out;
            for (auto n : g.moduli()) out.push_back(std::gcd(n, m));
            return out;
        }
        case GroupKind::DirectProduct: {
            std::vector<std::int64_t> out;
            for (const auto& f : g.factors()) {
                auto part = congruence_moduli(f, m);
                out.insert(out.end(), part.begin(), part.end());
            }
            return out;
        }
    }
    return {};
}

}  // namespace

FiniteQuotient::FiniteQuotient(const GroupDescriptor& parent, std::vector<std::int64_t> moduli)
    : parent_(parent), group_(parent), moduli_(std::move(moduli)) {
    if (moduli_.size() != parent.dimension()) {
        throw Error(ErrorCode::DescriptorMismatch, "quotient moduli do not match the dimension of " + parent.to_string());
    }
    validate_quotient_moduli(parent, moduli_);
    const GroupDescriptor& root = parent.kind() == GroupKind::Quotient ? parent.parent() : parent;
    group_ = GroupDescriptor::quotient(root, moduli_);

    order_ = 1;
    strides_.assign(moduli_.size(), 1);
    for (std::size_t i = moduli_.size(); i-- > 0;) {
        strides_[i] = order_;
        if (order_ > kMaxQuotientOrder / static_cast<std::size_t>(moduli_[i])) {
            throw Error(ErrorCode::Capacity, "quotient order exceeds the enumeration cap");
        }
        order_ *= static_cast<std::size_t>(moduli_[i]);
    }
    elements_.reserve(order_);
    for (std::size_t k = 0; k < order_; ++k) {
        std::vector<std::int64_t> c(moduli_.size());
        for (std::size_t i = 0; i < moduli_.size(); ++i) {
            c[i] = static_cast<std::int64_t>((k / strides_[i]) % static_cast<std::size_t>(moduli_[i]));
        }
        elements_.emplace_back(std::move(c));
    }
}

FiniteQuotient FiniteQuotient::congruence(const GroupDescriptor& parent, std::int64_t m) {
    if (m < 1) throw Error(ErrorCode::Parameter, "congruence modulus must be >= 1");
    return FiniteQuotient(parent, congruence_moduli(parent, m));
}

std::size_t FiniteQuotient::index_of(std::span<const std::int64_t> residue) const {
    std::size_t k = 0;
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
        k += strides_[i] * static_cast<std::size_t>(floor_mod(residue[i], moduli_[i]));
    }
    return k;
}

std::size_t FiniteQuotient::index_of(const GroupElement& residue) const {
    if (residue.size() != moduli_.size()) throw Error(ErrorCode::DescriptorMismatch, "residue has wrong dimension");
    return index_of(std::span<const std::int64_t>(residue.coords));
}

GroupElement FiniteQuotient::project(const GroupElement& g) const {
    if (!parent_.contains(g)) {
        throw Error(ErrorCode::DescriptorMismatch, "element " + to_string(g) + " not in " + parent_.to_string());
    }
    GroupElement out = g;
    for (std::size_t i = 0; i < out.size(); ++i) out.coords[i] = floor_mod(out.coords[i], moduli_[i]);
    return out;
}

std::size_t FiniteQuotient::project_index(const GroupElement& g) const {
    return index_of(std::span<const std::int64_t>(g.coords));
}

bool FiniteQuotient::in_kernel(const GroupElement& g) const {
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (floor_mod(g[i], moduli_[i]) != 0) return false;
    }
    return true;
}

GroupElement FiniteQuotient::symmetric_lift(const GroupElement& residue) const {
    GroupElement out = residue;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::int64_t m = moduli_[i];
        std::int64_t r = floor_mod(out.coords[i], m);
        if (2 * r > m) r -= m;
        out.coords[i] = r;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Chains

QuotientChain::QuotientChain(const GroupDescriptor& parent, const std::vector<std::int64_t>& level_moduli) {
    for (auto m : level_moduli) levels_.push_back(FiniteQuotient::congruence(parent, m));
    validate();
}

QuotientChain::QuotientChain(std::vector<FiniteQuotient> levels) : levels_(std::move(levels)) { validate(); }

void QuotientChain::validate() const {
    if (levels_.empty()) throw Error(ErrorCode::Parameter, "quotient chain must have at least one level");
    for (std::size_t k = 1; k < levels_.size(); ++k) {
        const auto& lo = levels_[k - 1];
        const auto& hi = levels_[k];
        if (!(lo.parent() == hi.parent())) throw Error(ErrorCode::DescriptorMismatch, "chain levels have different parents");
        if (hi.order() <= lo.order()) throw Error(ErrorCode::Parameter, "chain orders must be strictly increasing");
        for (std::size_t i = 0; i < lo.moduli().size(); ++i) {
            if (hi.moduli()[i] % lo.moduli()[i] != 0) {
                throw Error(ErrorCode::Parameter, "chain moduli must be divisible level to level");
            }
        }
    }
}

std::vector<GroupElement> difference_set(const GroupDescriptor& group, std::span<const GroupElement> K) {
    std::set<GroupElement> out;
    for (const auto& k : K) {
        const GroupElement kinv = group.inverse(k);
        for (const auto& k2 : K) out.insert(group.multiply(kinv, k2));
    }
    return {out.begin(), out.end()};
}

std::size_t verify_chain_separation(const QuotientChain& chain, std::span<const GroupElement> K) {
    const auto diffs = difference_set(chain.parent(), K);
    for (std::size_t n = 0; n < chain.size(); ++n) {
        const bool separated = std::none_of(diffs.begin(), diffs.end(), [&](const GroupElement& g) {
            return !g.is_zero() && chain[n].in_kernel(g);
        });
        if (separated) return n;
    }
    throw Error(ErrorCode::ChainTooShort, "no level of the chain separates the given finite set");
}

}  // namespace fkdet
