#pragma once

// Exact scalar arithmetic and homological linear algebra over Q, F_p and Z.
//
// Matrices are stored sparse (row-major, sorted nonzero entries) with rational
// entries; the declared ring decides how those entries are interpreted.  All
// rank computations are exact: rationals go through GMP, prime fields through
// 64-bit modular arithmetic, integers through Smith normal form.

#include "errors.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hochster {

// ---------------------------------------------------------------------------
// Coefficient rings
// ---------------------------------------------------------------------------

class CoefficientRing {
public:
    enum class Kind { rationals, prime_field, integers };

    static CoefficientRing rationals() { return CoefficientRing(Kind::rationals, 0); }
    static CoefficientRing integers() { return CoefficientRing(Kind::integers, 0); }

    static CoefficientRing prime_field(std::int64_t p)
    {
        if (!is_prime(p))
            throw Error(ErrorKind::invalid_argument, "fp:" + std::to_string(p) + " is not a prime");
        if (p >= (std::int64_t{1} << 31))
            throw Error(ErrorKind::capacity, "prime " + std::to_string(p) + " exceeds 2^31");
        return CoefficientRing(Kind::prime_field, p);
    }

    /// Accepts the command-line spellings `q`, `z` and `fp:<prime>`.
    static CoefficientRing parse(std::string_view text)
    {
        if (text == "q")
            return rationals();
        if (text == "z")
            return integers();
        if (text.substr(0, 3) == "fp:") {
            std::string digits(text.substr(3));
            if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
                throw Error(ErrorKind::parse, "bad coefficient ring '" + std::string(text) + "'");
            if (digits.size() > 12)
                throw Error(ErrorKind::capacity, "prime too large in '" + std::string(text) + "'");
            return prime_field(std::stoll(digits));
        }
        throw Error(ErrorKind::parse, "bad coefficient ring '" + std::string(text) + "' (expected q, z or fp:<prime>)");
    }

    static bool is_prime(std::int64_t p)
    {
        if (p < 2)
            return false;
        for (std::int64_t d = 2; d * d <= p; ++d)
            if (p % d == 0)
                return false;
        return true;
    }

    Kind kind() const { return kind_; }
    std::int64_t characteristic() const { return p_; }
    bool is_field() const { return kind_ != Kind::integers; }

    std::string name() const
    {
        switch (kind_) {
        case Kind::rationals: return "q";
        case Kind::integers: return "z";
        case Kind::prime_field: return "fp:" + std::to_string(p_);
        }
        return "?";
    }

    /// Brings a rational scalar into the canonical representative of this
    /// ring: unchanged over Q, required integral over Z, reduced into
    /// [0, p) over F_p.
    mpq_class normalize(const mpq_class& v) const
    {
        switch (kind_) {
        case Kind::rationals:
            return v;
        case Kind::integers:
            if (v.get_den() != 1)
                throw Error(ErrorKind::domain, "non-integral entry " + v.get_str() + " over z");
            return v;
        case Kind::prime_field: {
            mpz_class mod = p_;
            mpz_class den = v.get_den() % mod;
            if (den == 0)
                throw Error(ErrorKind::domain, "denominator of " + v.get_str() + " vanishes mod " + std::to_string(p_));
            mpz_class inv;
            mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t());
            mpz_class r = (v.get_num() * inv) % mod;
            if (r < 0)
                r += mod;
            return mpq_class(r);
        }
        }
        return v;
    }

    friend bool operator==(const CoefficientRing& a, const CoefficientRing& b)
    {
        return a.kind_ == b.kind_ && a.p_ == b.p_;
    }
    friend bool operator!=(const CoefficientRing& a, const CoefficientRing& b) { return !(a == b); }

private:
    CoefficientRing(Kind kind, std::int64_t p) : kind_(kind), p_(p) {}

    Kind kind_;
    std::int64_t p_;
};

// ---------------------------------------------------------------------------
// Field arithmetic policies used by the elimination kernels
// ---------------------------------------------------------------------------

namespace detail {

struct RationalArithmetic {
    using value_type = mpq_class;

    value_type from(const mpq_class& v) const { return v; }
    mpq_class to_rational(const value_type& v) const { return v; }
    bool is_zero(const value_type& v) const { return sgn(v) == 0; }
    value_type zero() const { return 0; }
    value_type one() const { return 1; }
    value_type add(const value_type& a, const value_type& b) const { return a + b; }
    value_type sub(const value_type& a, const value_type& b) const { return a - b; }
    value_type mul(const value_type& a, const value_type& b) const { return a * b; }
    value_type neg(const value_type& a) const { return -a; }
    value_type inv(const value_type& a) const { return 1 / a; }
};

struct PrimeArithmetic {
    using value_type = std::int64_t;
    std::int64_t p;

    value_type from(const mpq_class& v) const
    {
        mpz_class mod = p;
        mpz_class den = v.get_den() % mod;
        if (den == 0)
            throw Error(ErrorKind::domain, "denominator vanishes mod " + std::to_string(p));
        mpz_class inv;
        mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t());
        mpz_class r = (v.get_num() * inv) % mod;
        if (r < 0)
            r += mod;
        return r.get_si();
    }
    mpq_class to_rational(value_type v) const { return mpq_class(static_cast<long>(v)); }
    bool is_zero(value_type v) const { return v == 0; }
    value_type zero() const { return 0; }
    value_type one() const { return 1; }
    value_type add(value_type a, value_type b) const { return (a + b) % p; }
    value_type sub(value_type a, value_type b) const { return ((a - b) % p + p) % p; }
    value_type mul(value_type a, value_type b) const { return (a * b) % p; }
    value_type neg(value_type a) const { return (p - a) % p; }
    value_type inv(value_type a) const
    {
        // Fermat: a^(p-2)
        value_type result = 1, base = a % p;
        std::int64_t e = p - 2;
        while (e > 0) {
            if (e & 1)
                result = (result * base) % p;
            base = (base * base) % p;
            e >>= 1;
        }
        return result;
    }
};

} // namespace detail

/// Runs `fn` with the field arithmetic matching `ring`; Z is treated as its
/// fraction field Q (callers wanting torsion use the Smith normal form path).
template <class Fn>
decltype(auto) with_field(const CoefficientRing& ring, Fn&& fn)
{
    if (ring.kind() == CoefficientRing::Kind::prime_field)
        return fn(detail::PrimeArithmetic{ring.characteristic()});
    return fn(detail::RationalArithmetic{});
}

// ---------------------------------------------------------------------------
// ExactMatrix
// ---------------------------------------------------------------------------

class ExactMatrix {
public:
    struct Entry {
        std::size_t col;
        mpq_class value;
    };

    ExactMatrix() : ring_(CoefficientRing::rationals()) {}
    ExactMatrix(CoefficientRing ring, std::size_t rows, std::size_t cols)
        : ring_(ring), rows_(rows), cols_(cols), data_(rows)
    {
    }

    static ExactMatrix identity(CoefficientRing ring, std::size_t n)
    {
        ExactMatrix m(ring, n, n);
        for (std::size_t i = 0; i < n; ++i)
            m.data_[i].push_back({i, mpq_class(1)});
        return m;
    }

    static ExactMatrix from_rows(CoefficientRing ring, const std::vector<std::vector<mpq_class>>& rows)
    {
        std::size_t cols = rows.empty() ? 0 : rows.front().size();
        ExactMatrix m(ring, rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != cols)
                throw Error(ErrorKind::shape_mismatch, "ragged row " + std::to_string(r));
            for (std::size_t c = 0; c < cols; ++c)
                m.set(r, c, rows[r][c]);
        }
        return m;
    }

    static ExactMatrix from_rows(CoefficientRing ring, std::initializer_list<std::initializer_list<long>> rows)
    {
        std::vector<std::vector<mpq_class>> copy;
        for (const auto& row : rows) {
            copy.emplace_back();
            for (long v : row)
                copy.back().emplace_back(v);
        }
        return from_rows(ring, copy);
    }

    const CoefficientRing& ring() const { return ring_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::vector<Entry>& row(std::size_t r) const { return data_[r]; }

    std::size_t nonzeros() const
    {
        std::size_t n = 0;
        for (const auto& row : data_)
            n += row.size();
        return n;
    }

    bool is_zero() const { return nonzeros() == 0; }

    mpq_class at(std::size_t r, std::size_t c) const
    {
        const auto& row = data_.at(r);
        auto it = lower_bound(row, c);
        if (it != row.end() && it->col == c)
            return it->value;
        return 0;
    }

    void set(std::size_t r, std::size_t c, const mpq_class& v)
    {
        check_index(r, c);
        mpq_class value = ring_.normalize(v);
        auto& row = data_[r];
        auto it = lower_bound(row, c);
        if (it != row.end() && it->col == c) {
            if (sgn(value) == 0)
                row.erase(it);
            else
                it->value = value;
        } else if (sgn(value) != 0) {
            row.insert(it, Entry{c, value});
        }
    }

    void add(std::size_t r, std::size_t c, const mpq_class& v)
    {
        check_index(r, c);
        set(r, c, at(r, c) + v);
    }

    /// Writes `sign * block` with its top-left corner at (r0, c0), adding to
    /// whatever is already there.
    void add_block(std::size_t r0, std::size_t c0, const ExactMatrix& block, int sign = 1)
    {
        if (r0 + block.rows() > rows_ || c0 + block.cols() > cols_)
            throw Error(ErrorKind::shape_mismatch, "block does not fit");
        for (std::size_t r = 0; r < block.rows(); ++r)
            for (const auto& e : block.data_[r])
                add(r0 + r, c0 + e.col, sign * e.value);
    }

    ExactMatrix transposed() const
    {
        ExactMatrix t(ring_, cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (const auto& e : data_[r])
                t.data_[e.col].push_back({r, e.value});
        return t;
    }

    ExactMatrix operator*(const ExactMatrix& rhs) const
    {
        if (cols_ != rhs.rows_)
            throw Error(ErrorKind::shape_mismatch,
                        "product of " + shape() + " and " + rhs.shape());
        ExactMatrix out(ring_, rows_, rhs.cols_);
        std::map<std::size_t, mpq_class> acc;
        for (std::size_t r = 0; r < rows_; ++r) {
            acc.clear();
            for (const auto& e : data_[r])
                for (const auto& f : rhs.data_[e.col])
                    acc[f.col] += e.value * f.value;
            for (auto& [c, v] : acc) {
                mpq_class value = ring_.normalize(v);
                if (sgn(value) != 0)
                    out.data_[r].push_back({c, value});
            }
        }
        return out;
    }

    ExactMatrix operator-() const
    {
        ExactMatrix out(ring_, rows_, cols_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (const auto& e : data_[r])
                out.set(r, e.col, -e.value);
        return out;
    }

    ExactMatrix operator+(const ExactMatrix& rhs) const
    {
        if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
            throw Error(ErrorKind::shape_mismatch, "sum of " + shape() + " and " + rhs.shape());
        ExactMatrix out = *this;
        out.add_block(0, 0, rhs);
        return out;
    }

    ExactMatrix operator-(const ExactMatrix& rhs) const { return *this + (-rhs); }

    static ExactMatrix kronecker(const ExactMatrix& a, const ExactMatrix& b)
    {
        ExactMatrix out(a.ring_, a.rows_ * b.rows_, a.cols_ * b.cols_);
        for (std::size_t ra = 0; ra < a.rows_; ++ra)
            for (std::size_t rb = 0; rb < b.rows_; ++rb)
                for (const auto& ea : a.data_[ra])
                    for (const auto& eb : b.data_[rb])
                        out.data_[ra * b.rows_ + rb].push_back({ea.col * b.cols_ + eb.col,
                                                                a.ring_.normalize(ea.value * eb.value)});
        for (auto& row : out.data_) {
            std::sort(row.begin(), row.end(), [](const Entry& x, const Entry& y) { return x.col < y.col; });
            std::erase_if(row, [](const Entry& e) { return sgn(e.value) == 0; });
        }
        return out;
    }

    std::vector<std::vector<mpq_class>> to_dense() const
    {
        std::vector<std::vector<mpq_class>> out(rows_, std::vector<mpq_class>(cols_, 0));
        for (std::size_t r = 0; r < rows_; ++r)
            for (const auto& e : data_[r])
                out[r][e.col] = e.value;
        return out;
    }

    std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

    friend bool operator==(const ExactMatrix& a, const ExactMatrix& b)
    {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            return false;
        for (std::size_t r = 0; r < a.rows_; ++r) {
            if (a.data_[r].size() != b.data_[r].size())
                return false;
            for (std::size_t k = 0; k < a.data_[r].size(); ++k)
                if (a.data_[r][k].col != b.data_[r][k].col || a.data_[r][k].value != b.data_[r][k].value)
                    return false;
        }
        return true;
    }

private:
    static std::vector<Entry>::const_iterator lower_bound(const std::vector<Entry>& row, std::size_t c)
    {
        return std::lower_bound(row.begin(), row.end(), c,
                                [](const Entry& e, std::size_t col) { return e.col < col; });
    }
    static std::vector<Entry>::iterator lower_bound(std::vector<Entry>& row, std::size_t c)
    {
        return std::lower_bound(row.begin(), row.end(), c,
                                [](const Entry& e, std::size_t col) { return e.col < col; });
    }

    void check_index(std::size_t r, std::size_t c) const
    {
        if (r >= rows_ || c >= cols_)
            throw Error(ErrorKind::shape_mismatch,
                        "index (" + std::to_string(r) + "," + std::to_string(c) + ") outside " + shape());
    }

    CoefficientRing ring_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::vector<Entry>> data_;
};

// ---------------------------------------------------------------------------
// Rank
// ---------------------------------------------------------------------------

namespace detail {

template <class Field>
using SparseVector = std::vector<std::pair<std::size_t, typename Field::value_type>>;

// v <- v - coef * w, both sorted by index.
template <class Field>
void sparse_axpy(SparseVector<Field>& v, const typename Field::value_type& coef, const SparseVector<Field>& w,
                 const Field& f)
{
    SparseVector<Field> out;
    out.reserve(v.size() + w.size());
    std::size_t a = 0, b = 0;
    while (a < v.size() || b < w.size()) {
        if (b == w.size() || (a < v.size() && v[a].first < w[b].first)) {
            out.push_back(std::move(v[a++]));
        } else if (a == v.size() || w[b].first < v[a].first) {
            out.emplace_back(w[b].first, f.neg(f.mul(coef, w[b].second)));
            ++b;
        } else {
            auto value = f.sub(v[a].second, f.mul(coef, w[b].second));
            if (!f.is_zero(value))
                out.emplace_back(v[a].first, std::move(value));
            ++a;
            ++b;
        }
    }
    v = std::move(out);
}

/// Row reduction keyed on leading column; returns the rank.
template <class Field>
std::size_t sparse_rank(const ExactMatrix& m, const Field& f)
{
    std::vector<SparseVector<Field>> pivot_rows(m.cols());
    std::vector<char> has_pivot(m.cols(), 0);
    std::size_t rank = 0;
    for (std::size_t r = 0; r < m.rows() && rank < m.cols(); ++r) {
        SparseVector<Field> v;
        for (const auto& e : m.row(r)) {
            auto value = f.from(e.value);
            if (!f.is_zero(value))
                v.emplace_back(e.col, std::move(value));
        }
        while (!v.empty()) {
            std::size_t lead = v.front().first;
            if (!has_pivot[lead]) {
                auto scale = f.inv(v.front().second);
                for (auto& [c, value] : v)
                    value = f.mul(value, scale);
                pivot_rows[lead] = std::move(v);
                has_pivot[lead] = 1;
                ++rank;
                break;
            }
            auto coef = v.front().second;
            sparse_axpy(v, coef, pivot_rows[lead], f);
        }
    }
    return rank;
}

} // namespace detail

/// Rank over the fraction field of the matrix's ring.
inline std::size_t rank(const ExactMatrix& m)
{
    if (m.rows() == 0 || m.cols() == 0 || m.is_zero())
        return 0;
    return with_field(m.ring(), [&](const auto& f) { return detail::sparse_rank(m, f); });
}

// ---------------------------------------------------------------------------
// Smith normal form
// ---------------------------------------------------------------------------

struct SmithForm {
    std::vector<mpz_class> invariant_factors; // d_1 | d_2 | ... , all positive
    ExactMatrix left;                          // U, unimodular
    ExactMatrix diagonal;                      // D
    ExactMatrix right;                         // V, unimodular; m = U * D * V
};

namespace detail {

using DenseZ = std::vector<std::vector<mpz_class>>;

struct SmithTransforms {
    DenseZ u; // m = u * a * v throughout
    DenseZ v;
};

// Reduces `a` in place to Smith form.  Pivot: smallest nonzero absolute value,
// ties broken by lowest row then lowest column.  When `tx` is non-null the
// invariant m == u * a * v is maintained.
inline std::vector<mpz_class> smith_reduce(DenseZ& a, SmithTransforms* tx)
{
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    std::vector<mpz_class> factors;

    auto swap_rows = [&](std::size_t i, std::size_t j) {
        if (i == j)
            return;
        std::swap(a[i], a[j]);
        if (tx)
            for (auto& row : tx->u)
                std::swap(row[i], row[j]);
    };
    auto swap_cols = [&](std::size_t i, std::size_t j) {
        if (i == j)
            return;
        for (auto& row : a)
            std::swap(row[i], row[j]);
        if (tx)
            std::swap(tx->v[i], tx->v[j]);
    };
    // row_i += k * row_j
    auto add_row = [&](std::size_t i, std::size_t j, const mpz_class& k) {
        for (std::size_t c = 0; c < cols; ++c)
            a[i][c] += k * a[j][c];
        if (tx)
            for (auto& row : tx->u)
                row[j] -= k * row[i];
    };
    // col_i += k * col_j
    auto add_col = [&](std::size_t i, std::size_t j, const mpz_class& k) {
        for (std::size_t r = 0; r < rows; ++r)
            a[r][i] += k * a[r][j];
        if (tx)
            for (std::size_t c = 0; c < tx->v[j].size(); ++c)
                tx->v[j][c] -= k * tx->v[i][c];
    };
    auto negate_row = [&](std::size_t i) {
        for (auto& x : a[i])
            x = -x;
        if (tx)
            for (auto& row : tx->u)
                row[i] = -row[i];
    };

    for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
        for (;;) {
            // pivot search over the trailing block
            std::optional<std::pair<std::size_t, std::size_t>> best;
            for (std::size_t r = t; r < rows; ++r)
                for (std::size_t c = t; c < cols; ++c)
                    if (a[r][c] != 0 && (!best || abs(a[r][c]) < abs(a[best->first][best->second])))
                        best = std::make_pair(r, c);
            if (!best)
                return factors;
            swap_rows(t, best->first);
            swap_cols(t, best->second);

            bool clean = true;
            for (std::size_t r = t + 1; r < rows; ++r) {
                if (a[r][t] == 0)
                    continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), a[r][t].get_mpz_t(), a[t][t].get_mpz_t());
                add_row(r, t, -q);
                if (a[r][t] != 0)
                    clean = false;
            }
            for (std::size_t c = t + 1; c < cols; ++c) {
                if (a[t][c] == 0)
                    continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), a[t][c].get_mpz_t(), a[t][t].get_mpz_t());
                add_col(c, t, -q);
                if (a[t][c] != 0)
                    clean = false;
            }
            if (!clean)
                continue;

            // divisibility of the trailing block
            std::optional<std::size_t> offender;
            for (std::size_t r = t + 1; r < rows && !offender; ++r)
                for (std::size_t c = t + 1; c < cols; ++c)
                    if (a[r][c] % a[t][t] != 0) {
                        offender = r;
                        break;
                    }
            if (offender) {
                add_row(t, *offender, 1);
                continue;
            }
            break;
        }
        if (a[t][t] < 0)
            negate_row(t);
        factors.push_back(a[t][t]);
    }
    return factors;
}

// Invariant factors without transforms.  Unit pivots are eliminated on the
// sparse representation first (a unimodular step that contributes a factor 1),
// the remaining block goes through the dense reduction.
inline std::vector<mpz_class> invariant_factors_sparse(const ExactMatrix& m)
{
    std::vector<std::map<std::size_t, mpz_class>> rows(m.rows());
    std::vector<std::map<std::size_t, char>> col_rows(m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (const auto& e : m.row(r)) {
            if (e.value.get_den() != 1)
                throw Error(ErrorKind::unsupported_ring, "non-integral entry in Smith normal form");
            rows[r][e.col] = e.value.get_num();
            col_rows[e.col][r] = 1;
        }
    std::vector<char> alive(m.rows(), 1);
    std::size_t units = 0;

    for (;;) {
        // Markowitz-style choice among unit entries
        std::optional<std::pair<std::size_t, std::size_t>> pick;
        std::size_t best_cost = 0;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (!alive[r])
                continue;
            for (const auto& [c, v] : rows[r]) {
                if (v != 1 && v != -1)
                    continue;
                std::size_t cost = (rows[r].size() - 1) * (col_rows[c].size() - 1);
                if (!pick || cost < best_cost) {
                    pick = std::make_pair(r, c);
                    best_cost = cost;
                }
            }
        }
        if (!pick)
            break;
        auto [pr, pc] = *pick;
        const mpz_class pivot = rows[pr][pc];
        std::vector<std::size_t> targets;
        for (const auto& [r, unused] : col_rows[pc])
            if (r != pr)
                targets.push_back(r);
        for (std::size_t r : targets) {
            mpz_class k = rows[r][pc] * pivot; // pivot is its own inverse
            for (const auto& [c, v] : rows[pr]) {
                mpz_class nv = rows[r][c] - k * v;
                if (nv == 0) {
                    rows[r].erase(c);
                    col_rows[c].erase(r);
                } else {
                    rows[r][c] = nv;
                    col_rows[c][r] = 1;
                }
            }
        }
        for (const auto& [c, v] : rows[pr])
            col_rows[c].erase(pr);
        rows[pr].clear();
        alive[pr] = 0;
        ++units;
    }

    std::vector<std::size_t> live_rows, live_cols;
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (alive[r] && !rows[r].empty())
            live_rows.push_back(r);
    for (std::size_t c = 0; c < col_rows.size(); ++c)
        if (!col_rows[c].empty())
            live_cols.push_back(c);
    DenseZ rest(live_rows.size(), std::vector<mpz_class>(live_cols.size(), 0));
    for (std::size_t i = 0; i < live_rows.size(); ++i)
        for (std::size_t j = 0; j < live_cols.size(); ++j) {
            auto it = rows[live_rows[i]].find(live_cols[j]);
            if (it != rows[live_rows[i]].end())
                rest[i][j] = it->second;
        }
    std::vector<mpz_class> factors(units, mpz_class(1));
    auto tail = smith_reduce(rest, nullptr);
    factors.insert(factors.end(), tail.begin(), tail.end());
    return factors;
}

} // namespace detail

/// Smith normal form with transforms: m = left * diagonal * right.
inline SmithForm smith_normal_form(const ExactMatrix& m)
{
    if (m.ring().kind() != CoefficientRing::Kind::integers)
        throw Error(ErrorKind::unsupported_ring, "Smith normal form requires integer coefficients, got " + m.ring().name());
    const std::size_t rows = m.rows(), cols = m.cols();
    detail::DenseZ a(rows, std::vector<mpz_class>(cols, 0));
    for (std::size_t r = 0; r < rows; ++r)
        for (const auto& e : m.row(r))
            a[r][e.col] = e.value.get_num();
    detail::SmithTransforms tx;
    tx.u.assign(rows, std::vector<mpz_class>(rows, 0));
    tx.v.assign(cols, std::vector<mpz_class>(cols, 0));
    for (std::size_t i = 0; i < rows; ++i)
        tx.u[i][i] = 1;
    for (std::size_t i = 0; i < cols; ++i)
        tx.v[i][i] = 1;

    auto factors = detail::smith_reduce(a, &tx);

    auto to_matrix = [&](const detail::DenseZ& d, std::size_t r, std::size_t c) {
        ExactMatrix out(m.ring(), r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
                if (d[i][j] != 0)
                    out.set(i, j, mpq_class(d[i][j]));
        return out;
    };
    return SmithForm{factors, to_matrix(tx.u, rows, rows), to_matrix(a, rows, cols), to_matrix(tx.v, cols, cols)};
}

/// Nonzero invariant factors only; the sparse path used by cohomology.
inline std::vector<mpz_class> invariant_factors(const ExactMatrix& m)
{
    if (m.ring().kind() != CoefficientRing::Kind::integers)
        throw Error(ErrorKind::unsupported_ring, "invariant factors require integer coefficients");
    return detail::invariant_factors_sparse(m);
}

// ---------------------------------------------------------------------------
// Cochain complexes and their cohomology
// ---------------------------------------------------------------------------

struct ModuleSummary {
    std::size_t free_rank = 0;
    std::vector<mpz_class> torsion; // invariant factors > 1, divisibility chain

    bool is_zero() const { return free_rank == 0 && torsion.empty(); }

    std::string torsion_string() const
    {
        std::string out;
        for (std::size_t k = 0; k < torsion.size(); ++k) {
            if (k)
                out += ',';
            out += torsion[k].get_str();
        }
        return out;
    }

    std::string to_string() const
    {
        std::string out = std::to_string(free_rank);
        if (!torsion.empty())
            out += " [" + torsion_string() + "]";
        return out;
    }

    ModuleSummary& operator+=(const ModuleSummary& other)
    {
        free_rank += other.free_rank;
        if (!other.torsion.empty()) {
            // Re-normalise the direct sum of cyclic groups into a divisibility chain.
            std::vector<mpz_class> all = torsion;
            all.insert(all.end(), other.torsion.begin(), other.torsion.end());
            detail::DenseZ diag(all.size(), std::vector<mpz_class>(all.size(), 0));
            for (std::size_t k = 0; k < all.size(); ++k)
                diag[k][k] = all[k];
            auto factors = detail::smith_reduce(diag, nullptr);
            torsion.clear();
            for (auto& f : factors)
                if (f > 1)
                    torsion.push_back(f);
        }
        return *this;
    }

    friend bool operator==(const ModuleSummary& a, const ModuleSummary& b)
    {
        return a.free_rank == b.free_rank && a.torsion == b.torsion;
    }
    friend bool operator!=(const ModuleSummary& a, const ModuleSummary& b) { return !(a == b); }
};

inline ModuleSummary free_summary(std::size_t rank) { return ModuleSummary{rank, {}}; }

/// Terms indexed lo..hi; differential(i) maps term i to term i+1.
class CochainComplex {
public:
    CochainComplex() : ring_(CoefficientRing::rationals()) {}

    CochainComplex(CoefficientRing ring, int lo, std::vector<std::size_t> dims, std::vector<ExactMatrix> differentials)
        : ring_(ring), lo_(lo), dims_(std::move(dims)), diffs_(std::move(differentials))
    {
        if (dims_.empty())
            throw Error(ErrorKind::invalid_complex, "a complex needs at least one term");
        if (diffs_.size() + 1 != dims_.size())
            throw Error(ErrorKind::invalid_complex, "expected " + std::to_string(dims_.size() - 1) + " differentials");
        for (std::size_t k = 0; k < diffs_.size(); ++k) {
            if (diffs_[k].cols() != dims_[k] || diffs_[k].rows() != dims_[k + 1])
                throw Error(ErrorKind::invalid_complex,
                            "differential d^" + std::to_string(lo_ + static_cast<int>(k)) + " has shape " +
                                diffs_[k].shape() + ", expected " + std::to_string(dims_[k + 1]) + "x" +
                                std::to_string(dims_[k]));
            if (diffs_[k].ring() != ring_)
                throw Error(ErrorKind::invalid_complex, "differential over the wrong ring");
        }
    }

    const CoefficientRing& ring() const { return ring_; }
    int lo() const { return lo_; }
    int hi() const { return lo_ + static_cast<int>(dims_.size()) - 1; }

    std::size_t dim(int i) const
    {
        if (i < lo() || i > hi())
            return 0;
        return dims_[static_cast<std::size_t>(i - lo_)];
    }

    /// d^i : term i -> term i+1 (a zero matrix of the right shape outside the stored range).
    ExactMatrix differential(int i) const
    {
        if (i >= lo() && i < hi())
            return diffs_[static_cast<std::size_t>(i - lo_)];
        return ExactMatrix(ring_, dim(i + 1), dim(i));
    }

    const ExactMatrix* stored_differential(int i) const
    {
        if (i >= lo() && i < hi())
            return &diffs_[static_cast<std::size_t>(i - lo_)];
        return nullptr;
    }

    /// Throws invalid-complex when d^{i+1} d^i != 0 for the given i.
    void check_square(int i) const
    {
        const ExactMatrix* a = stored_differential(i);
        const ExactMatrix* b = stored_differential(i + 1);
        if (!a || !b)
            return;
        if (!((*b) * (*a)).is_zero())
            throw Error(ErrorKind::invalid_complex,
                        "d^" + std::to_string(i + 1) + " d^" + std::to_string(i) + " != 0");
    }

    void validate() const
    {
        for (int i = lo(); i < hi(); ++i)
            check_square(i);
    }

    std::vector<std::size_t> dims() const { return dims_; }

private:
    CoefficientRing ring_;
    int lo_ = 0;
    std::vector<std::size_t> dims_;
    std::vector<ExactMatrix> diffs_;
};

namespace detail {

inline ModuleSummary summary_from(std::size_t dim, std::size_t rank_out, std::size_t rank_in,
                                  const std::vector<mpz_class>* in_factors)
{
    ModuleSummary s;
    s.free_rank = dim - rank_out - rank_in;
    if (in_factors)
        for (const auto& f : *in_factors)
            if (f > 1)
                s.torsion.push_back(f);
    return s;
}

} // namespace detail

/// H^i of the complex.  Over Z the torsion of H^i is the torsion of the
/// cokernel of d^{i-1}, because ker d^i is a direct summand of the free term.
inline ModuleSummary cohomology_at(const CochainComplex& c, int i)
{
    if (i < c.lo() || i > c.hi())
        return {};
    c.check_square(i - 1);
    const ExactMatrix out = c.differential(i);
    const ExactMatrix in = c.differential(i - 1);
    if (c.ring().kind() == CoefficientRing::Kind::integers) {
        auto in_factors = invariant_factors(in);
        return detail::summary_from(c.dim(i), rank(out), in_factors.size(), &in_factors);
    }
    return detail::summary_from(c.dim(i), rank(out), rank(in), nullptr);
}

/// All cohomology groups, indexed from c.lo(); each differential is reduced once.
inline std::vector<ModuleSummary> cohomology_all(const CochainComplex& c)
{
    const bool integral = c.ring().kind() == CoefficientRing::Kind::integers;
    const int lo = c.lo(), hi = c.hi();
    std::vector<std::size_t> ranks;
    std::vector<std::vector<mpz_class>> factors;
    for (int i = lo - 1; i <= hi; ++i) {
        c.check_square(i);
        const ExactMatrix* d = c.stored_differential(i);
        if (!d) {
            ranks.push_back(0);
            factors.emplace_back();
        } else if (integral) {
            factors.push_back(invariant_factors(*d));
            ranks.push_back(factors.back().size());
        } else {
            ranks.push_back(rank(*d));
            factors.emplace_back();
        }
    }
    std::vector<ModuleSummary> out;
    for (int i = lo; i <= hi; ++i) {
        std::size_t k = static_cast<std::size_t>(i - lo);
        out.push_back(detail::summary_from(c.dim(i), ranks[k + 1], ranks[k], integral ? &factors[k] : nullptr));
    }
    return out;
}

/// Shifted mapping cone cone(f)[-1] of a chain map f: A -> B given degreewise
/// (f[i] : A^i -> B^i, for i in A's range).  Term i is A^i (+) B^{i-1} with
/// differential [[-d_A, 0], [f, d_B]].
inline CochainComplex shifted_cone(const CochainComplex& a, const CochainComplex& b,
                                   const std::map<int, ExactMatrix>& f)
{
    if (a.ring() != b.ring())
        throw Error(ErrorKind::invalid_complex, "cone of complexes over different rings");
    const auto ring = a.ring();
    const int lo = std::min(a.lo(), b.lo() + 1);
    const int hi = std::max(a.hi(), b.hi() + 1);
    auto map_at = [&](int i) -> ExactMatrix {
        auto it = f.find(i);
        if (it != f.end()) {
            if (it->second.rows() != b.dim(i) || it->second.cols() != a.dim(i))
                throw Error(ErrorKind::shape_mismatch, "chain map component " + std::to_string(i) + " has wrong shape");
            return it->second;
        }
        return ExactMatrix(ring, b.dim(i), a.dim(i));
    };
    std::vector<std::size_t> dims;
    for (int i = lo; i <= hi; ++i)
        dims.push_back(a.dim(i) + b.dim(i - 1));
    std::vector<ExactMatrix> diffs;
    for (int i = lo; i < hi; ++i) {
        ExactMatrix d(ring, a.dim(i + 1) + b.dim(i), a.dim(i) + b.dim(i - 1));
        d.add_block(0, 0, a.differential(i), -1);
        d.add_block(a.dim(i + 1), 0, map_at(i));
        d.add_block(a.dim(i + 1), a.dim(i), b.differential(i - 1));
        diffs.push_back(std::move(d));
    }
    return CochainComplex(ring, lo, std::move(dims), std::move(diffs));
}

/// Alternating sum of term dimensions.
inline long euler_characteristic(const CochainComplex& c)
{
    long chi = 0;
    for (int i = c.lo(); i <= c.hi(); ++i)
        chi += ((i % 2 == 0) ? 1 : -1) * static_cast<long>(c.dim(i));
    return chi;
}

// ---------------------------------------------------------------------------
// Dense field linear algebra (bases of cohomology, induced maps)
// ---------------------------------------------------------------------------

namespace detail {

template <class Field>
struct Dense {
    using V = typename Field::value_type;
    std::size_t rows = 0, cols = 0;
    std::vector<V> data;

    Dense() = default;
    Dense(std::size_t r, std::size_t c, const Field& f) : rows(r), cols(c), data(r * c, f.zero()) {}

    V& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const V& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    static Dense from(const ExactMatrix& m, const Field& f)
    {
        Dense d(m.rows(), m.cols(), f);
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (const auto& e : m.row(r))
                d(r, e.col) = f.from(e.value);
        return d;
    }

    Dense column_block(const std::vector<std::size_t>& which, const Field& f) const
    {
        Dense out(rows, which.size(), f);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t k = 0; k < which.size(); ++k)
                out(r, k) = (*this)(r, which[k]);
        return out;
    }

    static Dense hconcat(const std::vector<const Dense*>& parts, std::size_t rows, const Field& f)
    {
        std::size_t cols = 0;
        for (auto* p : parts)
            cols += p->cols;
        Dense out(rows, cols, f);
        std::size_t offset = 0;
        for (auto* p : parts) {
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < p->cols; ++c)
                    out(r, offset + c) = (*p)(r, c);
            offset += p->cols;
        }
        return out;
    }
};

template <class Field>
Dense<Field> multiply(const Dense<Field>& a, const Dense<Field>& b, const Field& f)
{
    Dense<Field> out(a.rows, b.cols, f);
    for (std::size_t r = 0; r < a.rows; ++r)
        for (std::size_t k = 0; k < a.cols; ++k) {
            if (f.is_zero(a(r, k)))
                continue;
            for (std::size_t c = 0; c < b.cols; ++c)
                out(r, c) = f.add(out(r, c), f.mul(a(r, k), b(k, c)));
        }
    return out;
}

/// Reduced row echelon form in place; returns the pivot columns.
template <class Field>
std::vector<std::size_t> rref(Dense<Field>& m, const Field& f, std::size_t col_limit = SIZE_MAX)
{
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    const std::size_t limit = std::min(col_limit, m.cols);
    for (std::size_t c = 0; c < limit && row < m.rows; ++c) {
        std::size_t p = row;
        while (p < m.rows && f.is_zero(m(p, c)))
            ++p;
        if (p == m.rows)
            continue;
        if (p != row)
            for (std::size_t k = 0; k < m.cols; ++k)
                std::swap(m(p, k), m(row, k));
        auto scale = f.inv(m(row, c));
        for (std::size_t k = 0; k < m.cols; ++k)
            m(row, k) = f.mul(m(row, k), scale);
        for (std::size_t r = 0; r < m.rows; ++r) {
            if (r == row || f.is_zero(m(r, c)))
                continue;
            auto factor = m(r, c);
            for (std::size_t k = 0; k < m.cols; ++k)
                m(r, k) = f.sub(m(r, k), f.mul(factor, m(row, k)));
        }
        pivots.push_back(c);
        ++row;
    }
    return pivots;
}

/// Columns spanning the null space of m.
template <class Field>
Dense<Field> kernel_basis(const Dense<Field>& m, const Field& f)
{
    Dense<Field> r = m;
    auto pivots = rref(r, f);
    std::vector<char> is_pivot(m.cols, 0);
    for (auto c : pivots)
        is_pivot[c] = 1;
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < m.cols; ++c)
        if (!is_pivot[c])
            free_cols.push_back(c);
    Dense<Field> basis(m.cols, free_cols.size(), f);
    for (std::size_t k = 0; k < free_cols.size(); ++k) {
        basis(free_cols[k], k) = f.one();
        for (std::size_t i = 0; i < pivots.size(); ++i)
            basis(pivots[i], k) = f.neg(r(i, free_cols[k]));
    }
    return basis;
}

/// A basis of H^i: independent image columns followed by cocycle
/// representatives completing them to a basis of the cocycles.
template <class Field>
struct CohomologyBasis {
    Dense<Field> boundaries;     // basis of im d^{i-1}
    Dense<Field> representatives; // cocycles whose classes form a basis of H^i
};

template <class Field>
CohomologyBasis<Field> cohomology_basis(const CochainComplex& c, int i, const Field& f)
{
    const std::size_t dim = c.dim(i);
    Dense<Field> cocycles = kernel_basis(Dense<Field>::from(c.differential(i), f), f);
    Dense<Field> image = Dense<Field>::from(c.differential(i - 1), f);
    Dense<Field> combined = Dense<Field>::hconcat({&image, &cocycles}, dim, f);
    Dense<Field> reduced = combined;
    auto pivots = rref(reduced, f);
    std::vector<std::size_t> image_cols, rep_cols;
    for (auto p : pivots) {
        if (p < image.cols)
            image_cols.push_back(p);
        else
            rep_cols.push_back(p);
    }
    return {combined.column_block(image_cols, f), combined.column_block(rep_cols, f)};
}

/// Coordinates of the columns of `vectors` (cocycles) in the representative
/// part of `basis` (boundary components dropped).
template <class Field>
Dense<Field> class_coordinates(const CohomologyBasis<Field>& basis, const Dense<Field>& vectors, std::size_t dim,
                               const Field& f)
{
    const std::size_t nb = basis.boundaries.cols, nr = basis.representatives.cols;
    Dense<Field> system = Dense<Field>::hconcat({&basis.boundaries, &basis.representatives, &vectors}, dim, f);
    auto pivots = rref(system, f, nb + nr);
    if (pivots.size() != nb + nr)
        throw Error(ErrorKind::invalid_complex, "cohomology basis is not independent");
    Dense<Field> out(nr, vectors.cols, f);
    for (std::size_t k = 0; k < vectors.cols; ++k) {
        // check consistency: rows beyond the pivots must vanish
        for (std::size_t r = pivots.size(); r < dim; ++r)
            if (!f.is_zero(system(r, nb + nr + k)))
                throw Error(ErrorKind::invalid_complex, "image vector is not a cocycle");
        for (std::size_t j = 0; j < nr; ++j)
            out(j, k) = system(nb + j, nb + nr + k);
    }
    return out;
}

} // namespace detail

/// Matrix of the map H^i(src) -> H^j(tgt) induced by a cochain-level map
/// `f : src^i -> tgt^j`, in the deterministic bases chosen by row reduction.
/// Field coefficients only.
inline ExactMatrix induced_map(const CochainComplex& src, int i, const CochainComplex& tgt, int j, const ExactMatrix& f)
{
    if (!src.ring().is_field())
        throw Error(ErrorKind::unsupported_ring, "induced maps are computed over fields only");
    if (f.cols() != src.dim(i) || f.rows() != tgt.dim(j))
        throw Error(ErrorKind::shape_mismatch, "cochain map has shape " + f.shape());
    return with_field(src.ring(), [&](const auto& field) {
        using Field = std::decay_t<decltype(field)>;
        auto sb = detail::cohomology_basis(src, i, field);
        auto tb = detail::cohomology_basis(tgt, j, field);
        ExactMatrix out(src.ring(), tb.representatives.cols, sb.representatives.cols);
        if (out.rows() == 0 || out.cols() == 0)
            return out;
        auto images = detail::multiply(detail::Dense<Field>::from(f, field), sb.representatives, field);
        auto coords = detail::class_coordinates(tb, images, tgt.dim(j), field);
        for (std::size_t r = 0; r < coords.rows; ++r)
            for (std::size_t c = 0; c < coords.cols; ++c)
                if (!field.is_zero(coords(r, c)))
                    out.set(r, c, field.to_rational(coords(r, c)));
        return out;
    });
}

} // namespace hochster
