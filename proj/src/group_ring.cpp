#include "fkdet/group_ring.hpp"

#include <algorithm>

namespace fkdet {

namespace {

template <class Scalar>
int support_radius_impl(const RingElement<Scalar>& h, int max_radius) {
    if (h.is_zero()) return 0;
    const auto& G = h.group();
    // Z^d word length is the l1 norm of the coordinates; other groups need a ball.
    if (G.kind() == GroupKind::FreeAbelian) {
        std::int64_t best = 0;
        for (const auto& [g, c] : h.coefficients()) {
            std::int64_t len = 0;
            for (auto x : g.coords) len += x < 0 ? -x : x;
            best = std::max(best, len);
        }
        if (best > max_radius) throw Error(ErrorCode::Capacity, "support radius exceeds " + std::to_string(max_radius));
        return static_cast<int>(best);
    }
    int r = 1;
    for (;;) {
        const int rr = std::min(r, max_radius);
        WordBall ball = word_ball(G, rr);
        int best = 0;
        bool all = true;
        for (const auto& [g, c] : h.coefficients()) {
            const int len = ball.length(g);
            if (len < 0) {
                all = false;
                break;
            }
            best = std::max(best, len);
        }
        if (all) return best;
        if (rr == max_radius) throw Error(ErrorCode::Capacity, "support radius exceeds " + std::to_string(max_radius));
        r *= 2;
    }
}

}  // namespace

int support_radius(const RingElement<double>& h, int max_radius) { return support_radius_impl(h, max_radius); }
int support_radius(const RingElement<Integer>& h, int max_radius) { return support_radius_impl(h, max_radius); }

}  // namespace fkdet
