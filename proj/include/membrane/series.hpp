#ifndef MEMBRANE_SERIES_HPP
#define MEMBRANE_SERIES_HPP

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "membrane/errors.hpp"
#include "membrane/field.hpp"

namespace membrane::series {

/// Truncated formal power series c_0 + c_1 t + ... + c_M t^M.
///
/// Binary operations truncate to the smaller operand order; nothing is ever
/// silently extended. Use with_order() to change the order explicitly.
template <Field T>
class TruncatedSeries {
public:
    TruncatedSeries() : coeffs_(1, from_int<T>(0)) {}

    explicit TruncatedSeries(std::size_t order) : coeffs_(order + 1, from_int<T>(0)) {}

    TruncatedSeries(std::size_t order, std::span<const T> values) : coeffs_(order + 1, from_int<T>(0)) {
        const std::size_t n = std::min(values.size(), coeffs_.size());
        std::copy_n(values.begin(), n, coeffs_.begin());
    }

    TruncatedSeries(std::size_t order, std::initializer_list<T> values)
        : TruncatedSeries(order, std::span<const T>(values.begin(), values.size())) {}

    static TruncatedSeries constant(std::size_t order, const T& c) {
        TruncatedSeries s(order);
        s.coeffs_[0] = c;
        return s;
    }

    static TruncatedSeries one(std::size_t order) { return constant(order, from_int<T>(1)); }

    /// c * t^k
    static TruncatedSeries monomial(std::size_t order, std::size_t k, const T& c) {
        TruncatedSeries s(order);
        if (k <= order) s.coeffs_[k] = c;
        return s;
    }

    static constexpr FieldTag field_tag() { return field_tag_of<T>(); }

    std::size_t order() const { return coeffs_.size() - 1; }
    const std::vector<T>& coeffs() const { return coeffs_; }
    const T& operator[](std::size_t k) const { return coeffs_[k]; }
    T& operator[](std::size_t k) { return coeffs_[k]; }

    /// Coefficient at t^k, zero past the order.
    T at(std::size_t k) const { return k <= order() ? coeffs_[k] : from_int<T>(0); }

    TruncatedSeries with_order(std::size_t order) const {
        TruncatedSeries s(order);
        const std::size_t n = std::min(order, this->order()) + 1;
        std::copy_n(coeffs_.begin(), n, s.coeffs_.begin());
        return s;
    }

    bool is_zero() const {
        return std::all_of(coeffs_.begin(), coeffs_.end(), [](const T& c) { return membrane::is_zero(c); });
    }

    TruncatedSeries& operator+=(const TruncatedSeries& o) {
        shrink_to(o.order());
        for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
        return *this;
    }
    TruncatedSeries& operator-=(const TruncatedSeries& o) {
        shrink_to(o.order());
        for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
        return *this;
    }
    TruncatedSeries& operator*=(const T& c) {
        for (auto& x : coeffs_) x *= c;
        return *this;
    }

    friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
    friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
    friend TruncatedSeries operator-(TruncatedSeries a) {
        for (auto& x : a.coeffs_) x = -x;
        return a;
    }
    friend TruncatedSeries operator*(TruncatedSeries a, const T& c) { return a *= c; }
    friend TruncatedSeries operator*(const T& c, TruncatedSeries a) { return a *= c; }
    friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) { return mul(a, b); }

    /// Cauchy product truncated at min(order_a, order_b).
    static TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b) {
        const std::size_t m = std::min(a.order(), b.order());
        TruncatedSeries out(m);
        for (std::size_t i = 0; i <= m; ++i) {
            if (membrane::is_zero(a.coeffs_[i])) continue;
            for (std::size_t j = 0; i + j <= m; ++j) out.coeffs_[i + j] += a.coeffs_[i] * b.coeffs_[j];
        }
        return out;
    }

    /// Multiplies by t^k, dropping what falls past the order.
    TruncatedSeries shift_up(std::size_t k) const {
        TruncatedSeries out(order());
        for (std::size_t i = 0; i + k <= order(); ++i) out.coeffs_[i + k] = coeffs_[i];
        return out;
    }

    /// Divides by t^k. The k lowest coefficients must vanish; the order drops by k.
    TruncatedSeries shift_down(std::size_t k) const {
        if (k > order()) throw DomainError("shift_down past series order");
        for (std::size_t i = 0; i < k; ++i)
            if (!membrane::is_zero(coeffs_[i])) throw DomainError("shift_down of a series with low-order terms");
        TruncatedSeries out(order() - k);
        for (std::size_t i = k; i <= order(); ++i) out.coeffs_[i - k] = coeffs_[i];
        return out;
    }

    /// Divides by t^k discarding the k lowest coefficients, which the caller knows
    /// to vanish analytically (floating residue included).
    TruncatedSeries drop_low(std::size_t k) const {
        if (k > order()) throw DomainError("drop_low past series order");
        TruncatedSeries out(order() - k);
        for (std::size_t i = k; i <= order(); ++i) out.coeffs_[i - k] = coeffs_[i];
        return out;
    }

    /// Partial sum at a numeric point.
    T evaluate(const T& t) const {
        T acc = from_int<T>(0);
        for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * t + coeffs_[k];
        return acc;
    }

private:
    void shrink_to(std::size_t order) {
        if (order < this->order()) coeffs_.resize(order + 1);
    }

    std::vector<T> coeffs_;
};

/// 1/a. Requires a nonzero constant term.
template <Field T>
TruncatedSeries<T> recip(const TruncatedSeries<T>& a) {
    if constexpr (std::is_same_v<T, double>) {
        if (std::fabs(a[0]) <= 1e-300) throw ZeroConstantTerm();
    } else {
        if (a[0].is_zero()) throw ZeroConstantTerm();
    }
    const std::size_t m = a.order();
    TruncatedSeries<T> out(m);
    const T inv0 = from_int<T>(1) / a[0];
    out[0] = inv0;
    for (std::size_t k = 1; k <= m; ++k) {
        T acc = from_int<T>(0);
        for (std::size_t i = 1; i <= k; ++i) acc += a[i] * out[k - i];
        out[k] = -acc * inv0;
    }
    return out;
}

template <Field T>
TruncatedSeries<T> divide(const TruncatedSeries<T>& a, const TruncatedSeries<T>& b) {
    return a * recip(b);
}

/// Square root of a series with constant term 1, normalized to constant term 1.
template <Field T>
TruncatedSeries<T> sqrt_unit(const TruncatedSeries<T>& a) {
    if (a[0] != from_int<T>(1)) throw DomainError("sqrt_unit requires constant term 1");
    const std::size_t m = a.order();
    TruncatedSeries<T> s(m);
    s[0] = from_int<T>(1);
    const T half = from_ratio<T>(1, 2);
    for (std::size_t k = 1; k <= m; ++k) {
        T acc = a[k];
        for (std::size_t i = 1; i < k; ++i) acc -= s[i] * s[k - i];
        s[k] = acc * half;
    }
    return s;
}

template <Field T>
TruncatedSeries<T> pow(const TruncatedSeries<T>& a, std::size_t e) {
    TruncatedSeries<T> result = TruncatedSeries<T>::one(a.order());
    TruncatedSeries<T> base = a;
    while (e) {
        if (e & 1U) result = result * base;
        e >>= 1U;
        if (e) base = base * base;
    }
    return result;
}

/// P(w) for a polynomial with coefficients poly[0..d], by Horner's rule.
template <Field T>
TruncatedSeries<T> compose_polynomial(std::span<const T> poly, const TruncatedSeries<T>& w) {
    TruncatedSeries<T> acc(w.order());
    for (std::size_t k = poly.size(); k-- > 0;) {
        acc = acc * w;
        acc[0] += poly[k];
    }
    return acc;
}

/// Running sums: the series times 1/(1 - t).
template <Field T>
TruncatedSeries<T> prefix_sums(const TruncatedSeries<T>& a) {
    TruncatedSeries<T> out = a;
    for (std::size_t k = 1; k <= out.order(); ++k) out[k] += out[k - 1];
    return out;
}

template <Field T>
T max_abs_diff(const TruncatedSeries<T>& a, const TruncatedSeries<T>& b) {
    const std::size_t m = std::min(a.order(), b.order());
    T worst = from_int<T>(0);
    for (std::size_t k = 0; k <= m; ++k) {
        T d = a[k] - b[k];
        if (d < 0) d = -d;
        if (d > worst) worst = d;
    }
    return worst;
}

/// Square matrix of truncated series sharing one order.
template <Field T>
class SeriesMatrix {
public:
    using Series = TruncatedSeries<T>;

    SeriesMatrix(std::size_t dim, std::size_t order) : dim_(dim), order_(order), entries_(dim * dim, Series(order)) {
        if (dim == 0) throw DomainError("SeriesMatrix dimension must be positive");
    }

    static SeriesMatrix identity(std::size_t dim, std::size_t order) {
        SeriesMatrix m(dim, order);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = Series::one(order);
        return m;
    }

    std::size_t dim() const { return dim_; }
    std::size_t order() const { return order_; }

    const Series& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }
    Series& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }

    /// Replaces an entry, enforcing the shared order.
    void set(std::size_t i, std::size_t j, const Series& s) { entries_[i * dim_ + j] = s.with_order(order_); }

    /// The matrix of t^k coefficients.
    std::vector<T> coefficient_matrix(std::size_t k) const {
        std::vector<T> out(dim_ * dim_);
        for (std::size_t idx = 0; idx < entries_.size(); ++idx) out[idx] = entries_[idx].at(k);
        return out;
    }

    std::vector<T> constant_term() const { return coefficient_matrix(0); }

    SeriesMatrix with_order(std::size_t order) const {
        SeriesMatrix m(dim_, order);
        for (std::size_t idx = 0; idx < entries_.size(); ++idx) m.entries_[idx] = entries_[idx].with_order(order);
        return m;
    }

    friend SeriesMatrix operator+(const SeriesMatrix& a, const SeriesMatrix& b) {
        a.check_shape(b);
        SeriesMatrix out(a.dim_, std::min(a.order_, b.order_));
        for (std::size_t idx = 0; idx < a.entries_.size(); ++idx) out.entries_[idx] = a.entries_[idx] + b.entries_[idx];
        return out;
    }

    friend SeriesMatrix operator-(const SeriesMatrix& a, const SeriesMatrix& b) {
        a.check_shape(b);
        SeriesMatrix out(a.dim_, std::min(a.order_, b.order_));
        for (std::size_t idx = 0; idx < a.entries_.size(); ++idx) out.entries_[idx] = a.entries_[idx] - b.entries_[idx];
        return out;
    }

    friend SeriesMatrix operator*(const SeriesMatrix& a, const SeriesMatrix& b) {
        a.check_shape(b);
        const std::size_t n = a.dim_;
        SeriesMatrix out(n, std::min(a.order_, b.order_));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                const Series& aik = a(i, k);
                if (aik.is_zero()) continue;
                for (std::size_t j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }

    friend SeriesMatrix operator*(const T& c, SeriesMatrix m) {
        for (auto& e : m.entries_) e *= c;
        return m;
    }

    /// Matrix times column vector of series.
    std::vector<Series> apply(std::span<const Series> v) const {
        if (v.size() != dim_) throw DomainError("SeriesMatrix::apply dimension mismatch");
        std::vector<Series> out(dim_, Series(order_));
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) {
                if ((*this)(i, j).is_zero()) continue;
                out[i] += (*this)(i, j) * v[j];
            }
        return out;
    }

    /// Row sums, i.e. the matrix applied to the all-ones column.
    std::vector<Series> row_sums() const {
        std::vector<Series> out(dim_, Series(order_));
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) out[i] += (*this)(i, j);
        return out;
    }

private:
    void check_shape(const SeriesMatrix& o) const {
        if (dim_ != o.dim_) throw DomainError("SeriesMatrix dimension mismatch");
    }

    std::size_t dim_;
    std::size_t order_;
    std::vector<Series> entries_;
};

/// Inverse of a dense dim x dim matrix stored row-major. Throws SingularConstantTerm.
template <Field T>
std::vector<T> invert_scalar_matrix(std::vector<T> a, std::size_t n) {
    std::vector<T> inv(n * n, from_int<T>(0));
    for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = from_int<T>(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = n;
        if constexpr (std::is_same_v<T, double>) {
            double best = 0.0;
            for (std::size_t r = col; r < n; ++r)
                if (std::fabs(a[r * n + col]) > best) {
                    best = std::fabs(a[r * n + col]);
                    pivot = r;
                }
            if (best <= 1e-300) pivot = n;
        } else {
            for (std::size_t r = col; r < n; ++r)
                if (!a[r * n + col].is_zero()) {
                    pivot = r;
                    break;
                }
        }
        if (pivot == n) throw SingularConstantTerm();
        if (pivot != col)
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a[pivot * n + c], a[col * n + c]);
                std::swap(inv[pivot * n + c], inv[col * n + c]);
            }
        const T d = from_int<T>(1) / a[col * n + col];
        for (std::size_t c = 0; c < n; ++c) {
            a[col * n + c] *= d;
            inv[col * n + c] *= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const T f = a[r * n + col];
            if (membrane::is_zero(f)) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a[r * n + c] -= f * a[col * n + c];
                inv[r * n + c] -= f * inv[col * n + c];
            }
        }
    }
    return inv;
}

/// Inverse over the series ring by order-by-order back-substitution:
/// X_0 = M_0^{-1}, X_k = -M_0^{-1} sum_{i=1..k} M_i X_{k-i}.
template <Field T>
SeriesMatrix<T> inverse(const SeriesMatrix<T>& m) {
    const std::size_t n = m.dim();
    const std::size_t order = m.order();
    const std::vector<T> m0_inv = invert_scalar_matrix(m.constant_term(), n);

    std::vector<std::vector<T>> mk(order + 1), xk(order + 1);
    for (std::size_t k = 0; k <= order; ++k) mk[k] = m.coefficient_matrix(k);
    xk[0] = m0_inv;
    std::vector<T> acc(n * n);
    for (std::size_t k = 1; k <= order; ++k) {
        std::fill(acc.begin(), acc.end(), from_int<T>(0));
        for (std::size_t i = 1; i <= k; ++i) {
            const auto& a = mk[i];
            const auto& b = xk[k - i];
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t s = 0; s < n; ++s) {
                    if (membrane::is_zero(a[r * n + s])) continue;
                    for (std::size_t c = 0; c < n; ++c) acc[r * n + c] += a[r * n + s] * b[s * n + c];
                }
        }
        xk[k].assign(n * n, from_int<T>(0));
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t c = 0; c < n; ++c) xk[k][r * n + c] -= m0_inv[r * n + s] * acc[s * n + c];
    }

    SeriesMatrix<T> out(n, order);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t k = 0; k <= order; ++k) out(r, c)[k] = xk[k][r * n + c];
    return out;
}

/// Largest coefficient-wise |a - b| over all entries.
template <Field T>
T max_abs_diff(const SeriesMatrix<T>& a, const SeriesMatrix<T>& b) {
    T worst = from_int<T>(0);
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) {
            T d = max_abs_diff(a(i, j), b(i, j));
            if (d > worst) worst = d;
        }
    return worst;
}

/// Coefficients c_{k,n} of a bivariate generating function sum c_{k,n} u^k v^n,
/// stored row by row in n with c_{k,n} = 0 for k > n.
template <Field T>
class BivariateTruncation {
public:
    explicit BivariateTruncation(std::size_t n_max) : rows_(n_max + 1) {
        for (std::size_t n = 0; n <= n_max; ++n) rows_[n].assign(n + 1, from_int<T>(0));
    }

    std::size_t n_max() const { return rows_.size() - 1; }

    T at(std::size_t k, std::size_t n) const { return k <= n ? rows_[n][k] : from_int<T>(0); }

    void set(std::size_t k, std::size_t n, const T& value) {
        if (k > n) {
            if (!membrane::is_zero(value)) throw DomainError("bivariate coefficient with k > n must vanish");
            return;
        }
        rows_[n][k] = value;
    }

    /// Sets c_{k, n} = column[n] for all n in range; the column is the v-series of u^k.
    void set_column(std::size_t k, const TruncatedSeries<T>& column) {
        for (std::size_t n = 0; n <= n_max(); ++n) set(k, n, column.at(n));
    }

    const std::vector<T>& row(std::size_t n) const { return rows_[n]; }

private:
    std::vector<std::vector<T>> rows_;
};

}  // namespace membrane::series

#endif  // MEMBRANE_SERIES_HPP
