#include "fkdet/exact_linalg.hpp"

#include <algorithm>

#include "fkdet/errors.hpp"

namespace fkdet {

mpz_class bareiss_determinant(IntegerMatrix a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw Error(ErrorCode::Parameter, "determinant of a non-square matrix");
    if (n == 0) return 1;
    int sign = 1;
    mpz_class prev = 1;
    mpz_class t;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (sgn(a(k, k)) == 0) {
            std::size_t p = k + 1;
            while (p < n && sgn(a(p, k)) == 0) ++p;
            if (p == n) return 0;
            a.swap_rows(k, p);
            sign = -sign;
        }
        const mpz_class& pivot = a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                // a(i,j) <- (a(i,j)*pivot - a(i,k)*a(k,j)) / prev, exact by Sylvester's identity
                mpz_mul(t.get_mpz_t(), a(i, j).get_mpz_t(), pivot.get_mpz_t());
                mpz_submul(t.get_mpz_t(), a(i, k).get_mpz_t(), a(k, j).get_mpz_t());
                mpz_divexact(a(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            a(i, k) = 0;
        }
        prev = pivot;
    }
    mpz_class det = a(n - 1, n - 1);
    return sign < 0 ? mpz_class(-det) : det;
}

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

}  // namespace

std::size_t modular_rank(const IntegerMatrix& a, std::uint64_t p) {
    const std::size_t n = a.rows();
    const std::size_t m = a.cols();
    std::vector<std::uint64_t> w(n * m);
    mpz_class r;
    const mpz_class pz = mpz_class(static_cast<unsigned long>(p));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            mpz_fdiv_r(r.get_mpz_t(), a(i, j).get_mpz_t(), pz.get_mpz_t());
            w[i * m + j] = r.get_ui();
        }
    }
    std::size_t rank = 0;
    for (std::size_t col = 0; col < m && rank < n; ++col) {
        std::size_t piv = rank;
        while (piv < n && w[piv * m + col] == 0) ++piv;
        if (piv == n) continue;
        if (piv != rank) {
            for (std::size_t j = 0; j < m; ++j) std::swap(w[piv * m + j], w[rank * m + j]);
        }
        const std::uint64_t inv = powmod(w[rank * m + col], p - 2, p);
        for (std::size_t i = rank + 1; i < n; ++i) {
            const std::uint64_t factor = mulmod(w[i * m + col], inv, p);
            if (factor == 0) continue;
            for (std::size_t j = col; j < m; ++j) {
                const std::uint64_t sub = mulmod(factor, w[rank * m + j], p);
                std::uint64_t& x = w[i * m + j];
                x = x >= sub ? x - sub : x + p - sub;
            }
        }
        ++rank;
    }
    return rank;
}

namespace {

struct SmithWork {
    IntegerMatrix a, u, v;
    std::size_t n, m;

    void swap_rows(std::size_t i, std::size_t j) {
        a.swap_rows(i, j);
        u.swap_rows(i, j);
    }
    void swap_cols(std::size_t i, std::size_t j) {
        a.swap_cols(i, j);
        v.swap_cols(i, j);
    }
    // row_i += q * row_j
    void add_row(std::size_t i, std::size_t j, const mpz_class& q) {
        if (sgn(q) == 0) return;
        for (std::size_t c = 0; c < m; ++c) mpz_addmul(a(i, c).get_mpz_t(), q.get_mpz_t(), a(j, c).get_mpz_t());
        for (std::size_t c = 0; c < n; ++c) mpz_addmul(u(i, c).get_mpz_t(), q.get_mpz_t(), u(j, c).get_mpz_t());
    }
    // col_i += q * col_j
    void add_col(std::size_t i, std::size_t j, const mpz_class& q) {
        if (sgn(q) == 0) return;
        for (std::size_t r = 0; r < n; ++r) mpz_addmul(a(r, i).get_mpz_t(), q.get_mpz_t(), a(r, j).get_mpz_t());
        for (std::size_t r = 0; r < m; ++r) mpz_addmul(v(r, i).get_mpz_t(), q.get_mpz_t(), v(r, j).get_mpz_t());
    }
    void negate_row(std::size_t i) {
        for (std::size_t c = 0; c < m; ++c) a(i, c) = -a(i, c);
        for (std::size_t c = 0; c < n; ++c) u(i, c) = -u(i, c);
    }
};

}  // namespace

SmithForm smith_normal_form(const IntegerMatrix& input) {
    SmithWork w{input, IntegerMatrix::identity(input.rows()), IntegerMatrix::identity(input.cols()), input.rows(),
                input.cols()};
    const std::size_t k = std::min(w.n, w.m);
    mpz_class q;
    for (std::size_t t = 0; t < k; ++t) {
        // pivot: smallest nonzero magnitude in the trailing block
        auto move_min_to_pivot = [&]() -> bool {
            std::size_t bi = w.n, bj = w.m;
            mpz_class best;
            for (std::size_t i = t; i < w.n; ++i) {
                for (std::size_t j = t; j < w.m; ++j) {
                    if (sgn(w.a(i, j)) == 0) continue;
                    if (bi == w.n || mpz_cmpabs(w.a(i, j).get_mpz_t(), best.get_mpz_t()) < 0) {
                        best = w.a(i, j);
                        bi = i;
                        bj = j;
                    }
                }
            }
            if (bi == w.n) return false;
            w.swap_rows(t, bi);
            w.swap_cols(t, bj);
            return true;
        };
        if (!move_min_to_pivot()) break;

        for (;;) {
            bool clean = true;
            for (std::size_t i = t + 1; i < w.n; ++i) {
                if (sgn(w.a(i, t)) == 0) continue;
                mpz_fdiv_q(q.get_mpz_t(), w.a(i, t).get_mpz_t(), w.a(t, t).get_mpz_t());
                w.add_row(i, t, mpz_class(-q));
                if (sgn(w.a(i, t)) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < w.m; ++j) {
                if (sgn(w.a(t, j)) == 0) continue;
                mpz_fdiv_q(q.get_mpz_t(), w.a(t, j).get_mpz_t(), w.a(t, t).get_mpz_t());
                w.add_col(j, t, mpz_class(-q));
                if (sgn(w.a(t, j)) != 0) clean = false;
            }
            if (!clean) {
                move_min_to_pivot();
                continue;
            }
            // divisibility of the trailing block by the pivot
            bool fixed = false;
            for (std::size_t i = t + 1; i < w.n && !fixed; ++i) {
                for (std::size_t j = t + 1; j < w.m; ++j) {
                    if (!mpz_divisible_p(w.a(i, j).get_mpz_t(), w.a(t, t).get_mpz_t())) {
                        w.add_row(t, i, mpz_class(1));
                        fixed = true;
                        break;
                    }
                }
            }
            if (!fixed) break;
        }
        if (sgn(w.a(t, t)) < 0) w.negate_row(t);
    }

    SmithForm out;
    out.diagonal.resize(k);
    for (std::size_t i = 0; i < k; ++i) out.diagonal[i] = w.a(i, i);
    out.left = std::move(w.u);
    out.right = std::move(w.v);
    return out;
}

std::optional<std::vector<mpq_class>> solve_rational(const IntegerMatrix& a, const std::vector<mpz_class>& b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw Error(ErrorCode::Parameter, "solve_rational needs a square system");
    DenseMatrix<mpq_class> m(n, n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m(i, j) = a(i, j);
        m(i, n) = b[i];
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && sgn(m(p, k)) == 0) ++p;
        if (p == n) return std::nullopt;
        m.swap_rows(k, p);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || sgn(m(i, k)) == 0) continue;
            const mpq_class factor = m(i, k) / m(k, k);
            for (std::size_t j = k; j <= n; ++j) m(i, j) -= factor * m(k, j);
        }
    }
    std::vector<mpq_class> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = m(i, n) / m(i, i);
    return x;
}

std::vector<mpz_class> multiply(const IntegerMatrix& a, const std::vector<mpz_class>& x) {
    std::vector<mpz_class> out(a.rows(), 0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) mpz_addmul(out[i].get_mpz_t(), a(i, j).get_mpz_t(), x[j].get_mpz_t());
    return out;
}

}  // namespace fkdet
