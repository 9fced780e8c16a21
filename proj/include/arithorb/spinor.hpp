#pragma once

// Diagonal quadratic forms over Q or Q(sqrt d), their rational isometries, and
// the spinor norm SO(f)(k) -> k^*/(k^*)^2 computed through an exact
// Cartan-Dieudonne factorisation into reflections.

#include "arithorb/exact_arith.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace arithorb {

using Vector = std::vector<FieldElement>;

/// Dense square matrix over a field, row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n) : n_(n), e_(n * n) {}

    static Matrix identity(std::size_t n)
    {
        Matrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    static Matrix diagonal(const Vector& diag)
    {
        Matrix m(diag.size());
        for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
        return m;
    }

    static Matrix from_rows(const std::vector<Vector>& rows)
    {
        Matrix m(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size()) throw std::invalid_argument("matrix must be square");
            for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t size() const noexcept { return n_; }
    FieldElement& operator()(std::size_t i, std::size_t j) { return e_[i * n_ + j]; }
    const FieldElement& operator()(std::size_t i, std::size_t j) const { return e_[i * n_ + j]; }

    Vector column(std::size_t j) const
    {
        Vector v(n_);
        for (std::size_t i = 0; i < n_; ++i) v[i] = (*this)(i, j);
        return v;
    }

    std::vector<Vector> rows() const
    {
        std::vector<Vector> out(n_, Vector(n_));
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) out[i][j] = (*this)(i, j);
        }
        return out;
    }

    Matrix transpose() const
    {
        Matrix t(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
        }
        return t;
    }

    Matrix lifted_to(const TotallyRealField& k) const
    {
        Matrix m = *this;
        for (auto& x : m.e_) x = x.lifted_to(k);
        return m;
    }

    friend Matrix operator*(const Matrix& x, const Matrix& y)
    {
        if (x.n_ != y.n_) throw std::invalid_argument("matrix size mismatch");
        Matrix r(x.n_);
        for (std::size_t i = 0; i < x.n_; ++i) {
            for (std::size_t k = 0; k < x.n_; ++k) {
                if (x(i, k).is_zero()) continue;
                for (std::size_t j = 0; j < x.n_; ++j) {
                    if (!y(k, j).is_zero()) r(i, j) += x(i, k) * y(k, j);
                }
            }
        }
        return r;
    }

    friend Vector operator*(const Matrix& m, const Vector& v)
    {
        if (m.n_ != v.size()) throw std::invalid_argument("matrix/vector size mismatch");
        Vector r(m.n_);
        for (std::size_t i = 0; i < m.n_; ++i) {
            for (std::size_t j = 0; j < m.n_; ++j) {
                if (!m(i, j).is_zero() && !v[j].is_zero()) r[i] += m(i, j) * v[j];
            }
        }
        return r;
    }

    friend bool operator==(const Matrix& x, const Matrix& y) { return x.n_ == y.n_ && x.e_ == y.e_; }

    FieldElement determinant() const
    {
        Matrix a = *this;
        FieldElement det = 1;
        for (std::size_t c = 0; c < n_; ++c) {
            std::size_t p = c;
            while (p < n_ && a(p, c).is_zero()) ++p;
            if (p == n_) return FieldElement();
            if (p != c) {
                for (std::size_t j = 0; j < n_; ++j) std::swap(a(p, j), a(c, j));
                det = -det;
            }
            det *= a(c, c);
            FieldElement inv = a(c, c).inverse();
            for (std::size_t i = c + 1; i < n_; ++i) {
                if (a(i, c).is_zero()) continue;
                FieldElement factor = a(i, c) * inv;
                for (std::size_t j = c; j < n_; ++j) a(i, j) -= factor * a(c, j);
            }
        }
        return det;
    }

private:
    std::size_t n_ = 0;
    std::vector<FieldElement> e_;
};

/// f(x) = sum a_i x_i^2 over a totally real field.
class DiagonalForm {
public:
    DiagonalForm(TotallyRealField k, const Vector& coefficients) : field_(std::move(k))
    {
        if (coefficients.size() < 3) throw std::invalid_argument("form dimension n+1 must be at least 3");
        for (const auto& a : coefficients) {
            if (a.is_zero()) throw std::invalid_argument("diagonal coefficients must be nonzero");
            coeffs_.push_back(a.lifted_to(field_));
        }
    }

    const TotallyRealField& field() const noexcept { return field_; }
    const Vector& coefficients() const noexcept { return coeffs_; }
    std::size_t dimension() const noexcept { return coeffs_.size(); }

    /// Polar form with B(x, x) = f(x).
    FieldElement bilinear(const Vector& x, const Vector& y) const
    {
        check(x);
        check(y);
        FieldElement s = FieldElement::in(field_, 0);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (!x[i].is_zero() && !y[i].is_zero()) s += coeffs_[i] * x[i] * y[i];
        }
        return s;
    }

    FieldElement value(const Vector& x) const { return bilinear(x, x); }

    Matrix gram() const { return Matrix::diagonal(coeffs_); }

    Vector basis_vector(std::size_t i) const
    {
        Vector v(dimension(), FieldElement::in(field_, 0));
        v.at(i) = FieldElement::in(field_, 1);
        return v;
    }

    bool operator==(const DiagonalForm& o) const { return field_ == o.field_ && coeffs_ == o.coeffs_; }

private:
    void check(const Vector& x) const
    {
        if (x.size() != coeffs_.size()) throw std::invalid_argument("vector dimension does not match the form");
    }

    TotallyRealField field_;
    Vector coeffs_;
};

struct Admissibility {
    bool admissible = false;
    /// The form was multiplied by -1 to reach signature (1, n) at Id.
    bool sign_flipped = false;
    /// Coordinate whose coefficient is the positive one at Id (after the flip).
    std::optional<std::size_t> positive_index;
};

/// Signature (1, n) at Id up to a global sign, definite at every other place.
inline Admissibility admissibility(const DiagonalForm& f)
{
    const auto& k = f.field();
    const auto& a = f.coefficients();
    Admissibility r;
    for (int v : k.places()) {
        if (v == k.id_place()) continue;
        int s0 = sign_at(a[0], v);
        for (const auto& c : a) {
            if (sign_at(c, v) != s0) return r;
        }
    }
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < a.size(); ++i) {
        (sign_at(a[i], k.id_place()) > 0 ? pos : neg).push_back(i);
    }
    if (pos.size() == 1) {
        r.admissible = true;
        r.positive_index = pos.front();
    } else if (neg.size() == 1) {
        r.admissible = true;
        r.sign_flipped = true;
        r.positive_index = neg.front();
    }
    return r;
}

inline bool admissibility_check(const DiagonalForm& f) { return admissibility(f).admissible; }

/// Reflection x -> x - 2 B(x, v)/f(v) v as a matrix (determinant -1).
inline Matrix reflect(const Vector& v, const DiagonalForm& f)
{
    FieldElement q = f.value(v);
    if (q.is_zero()) throw std::domain_error("isotropic reflection vector");
    std::size_t n = f.dimension();
    Matrix m = Matrix::identity(n).lifted_to(f.field());
    FieldElement scale = FieldElement(2) / q;
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i].is_zero()) continue;
        FieldElement vi = scale * v[i];
        for (std::size_t j = 0; j < n; ++j) {
            if (!v[j].is_zero()) m(i, j) -= vi * f.coefficients()[j] * v[j];
        }
    }
    return m;
}

/// An exact element of O(f)(k); `is_special()` distinguishes SO(f)(k).
class Isometry {
public:
    /// An element of SO(f)(k). Throws unless g^T F g = F and det g = 1.
    Isometry(DiagonalForm f, const Matrix& g) : Isometry(std::move(f), g, true) {}

    /// An element of O(f)(k), possibly of determinant -1.
    static Isometry orthogonal(DiagonalForm f, const Matrix& g) { return Isometry(std::move(f), g, false); }

    const DiagonalForm& form() const noexcept { return form_; }
    const Matrix& matrix() const noexcept { return m_; }
    bool is_special() const noexcept { return special_; }
    std::size_t dimension() const noexcept { return m_.size(); }

    Isometry inverse() const
    {
        // g^{-1} = F^{-1} g^T F
        Vector inv;
        for (const auto& a : form_.coefficients()) inv.push_back(a.inverse());
        Matrix r = Matrix::diagonal(inv) * m_.transpose() * form_.gram();
        return Isometry(form_, std::move(r), special_, Trusted{});
    }

    friend Isometry operator*(const Isometry& x, const Isometry& y)
    {
        if (!(x.form_ == y.form_)) throw std::invalid_argument("isometries of different forms");
        return Isometry(x.form_, x.m_ * y.m_, x.special_ == y.special_, Trusted{});
    }

private:
    struct Trusted {};
    Isometry(DiagonalForm f, Matrix g, bool special, Trusted) : form_(std::move(f)), m_(std::move(g)), special_(special) {}

    Isometry(DiagonalForm f, const Matrix& g, bool require_special) : form_(std::move(f))
    {
        if (g.size() != form_.dimension()) throw std::invalid_argument("matrix size does not match the form");
        m_ = g.lifted_to(form_.field());
        Matrix F = form_.gram();
        if (!(m_.transpose() * F * m_ == F)) throw std::invalid_argument("matrix does not preserve the form");
        FieldElement det = m_.determinant();
        special_ = det == FieldElement(1);
        if (require_special && !special_) throw std::invalid_argument("isometry has determinant -1");
    }

    DiagonalForm form_;
    Matrix m_;
    bool special_ = true;
};

struct ReflectionDecomposition {
    std::vector<Vector> vectors;

    std::size_t length() const noexcept { return vectors.size(); }
};

namespace detail {

/// Rescales v by a nonzero rational to a primitive vector over Z[sqrt d]
/// whose first nonzero coordinate is positive at place 0.
inline Vector normalized(Vector v)
{
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    auto lead = std::find_if(v.begin(), v.end(), [](const FieldElement& x) { return !x.is_zero(); });
    if (lead == v.end()) return v;
    Integer l = 1;
    for (const auto& x : v) {
        l = boost::multiprecision::lcm(l, denominator(x.rational_part()));
        l = boost::multiprecision::lcm(l, denominator(x.sqrt_part()));
    }
    Integer g = 0;
    for (const auto& x : v) {
        g = boost::multiprecision::gcd(g, numerator(x.rational_part() * l));
        g = boost::multiprecision::gcd(g, numerator(x.sqrt_part() * l));
    }
    Rational scale(l, g);
    if (sign_at(*lead, 0) < 0) scale = -scale;
    for (auto& x : v) x *= FieldElement(scale);
    return v;
}

/// h <- tau_w h, with tau_w = I - 2 w (F w)^T / f(w).
inline void reflect_left(Matrix& h, const Vector& w, const DiagonalForm& f)
{
    std::size_t n = f.dimension();
    FieldElement scale = FieldElement(2) / f.value(w);
    // row vector r = (F w)^T h
    Vector r(n, FieldElement::in(f.field(), 0));
    for (std::size_t k = 0; k < n; ++k) {
        if (w[k].is_zero()) continue;
        FieldElement fw = f.coefficients()[k] * w[k];
        for (std::size_t j = 0; j < n; ++j) {
            if (!h(k, j).is_zero()) r[j] += fw * h(k, j);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (w[i].is_zero()) continue;
        FieldElement wi = scale * w[i];
        for (std::size_t j = 0; j < n; ++j) {
            if (!r[j].is_zero()) h(i, j) -= wi * r[j];
        }
    }
}

} // namespace detail

/// Reflection vectors v_1..v_m with g = tau_{v_1} tau_{v_2} ... tau_{v_m}.
///
/// Basis vectors are fixed one at a time in `pivot_order`. For the current
/// remainder h and pivot x, the reflection in w = hx - x sends hx to x; when w
/// is isotropic, reflecting in hx + x and then in x does the same.
inline ReflectionDecomposition cartan_dieudonne_decompose(const Isometry& g, std::span<const std::size_t> pivot_order)
{
    const DiagonalForm& f = g.form();
    std::size_t n = f.dimension();
    {
        std::vector<std::size_t> check(pivot_order.begin(), pivot_order.end());
        std::sort(check.begin(), check.end());
        std::vector<std::size_t> expected(n);
        std::iota(expected.begin(), expected.end(), 0);
        if (check != expected) throw std::invalid_argument("pivot order must be a permutation of the basis");
    }
    ReflectionDecomposition out;
    Matrix h = g.matrix();
    auto apply = [&](const Vector& w) {
        detail::reflect_left(h, w, f);
        out.vectors.push_back(detail::normalized(w));
    };
    for (std::size_t i : pivot_order) {
        Vector x = f.basis_vector(i);
        Vector hx = h.column(i);
        if (hx == x) continue;
        Vector w(n);
        for (std::size_t j = 0; j < n; ++j) w[j] = hx[j] - x[j];
        if (!f.value(w).is_zero()) {
            apply(w);
        } else {
            for (std::size_t j = 0; j < n; ++j) w[j] = hx[j] + x[j];
            apply(w);
            apply(x);
        }
    }
    if (!(h == Matrix::identity(n).lifted_to(f.field()))) {
        throw InternalError("Cartan-Dieudonne remainder is not the identity");
    }
    if (out.length() > 2 * n || (out.length() % 2 == 0) != g.is_special()) {
        throw InternalError("reflection count inconsistent with the determinant");
    }
    return out;
}

inline ReflectionDecomposition cartan_dieudonne_decompose(const Isometry& g)
{
    std::vector<std::size_t> order(g.dimension());
    std::iota(order.begin(), order.end(), 0);
    return cartan_dieudonne_decompose(g, order);
}

/// Left-to-right product of the reflections.
inline Matrix recompose(const ReflectionDecomposition& dec, const DiagonalForm& f)
{
    Matrix m = Matrix::identity(f.dimension()).lifted_to(f.field());
    for (const auto& v : dec.vectors) m = m * reflect(v, f);
    return m;
}

inline SquareClass spinor_norm(const ReflectionDecomposition& dec, const DiagonalForm& f)
{
    FieldElement prod = FieldElement::in(f.field(), 1);
    for (const auto& v : dec.vectors) prod *= f.value(v);
    return SquareClass(f.field(), prod);
}

/// Class of prod f(v_i) in k^*/(k^*)^2. Meaningful as delta only when g.is_special().
inline SquareClass spinor_norm(const Isometry& g)
{
    return spinor_norm(cartan_dieudonne_decompose(g), g.form());
}

/// Whether g lies in SO_0: it keeps the positive cone component at Id.
inline bool so0_membership(const Isometry& g)
{
    Admissibility adm = admissibility(g.form());
    if (!adm.admissible) throw std::invalid_argument("SO_0 membership needs an admissible form");
    const DiagonalForm& f = g.form();
    std::size_t k = *adm.positive_index;
    Vector x = f.basis_vector(k);
    FieldElement b = f.bilinear(g.matrix() * x, x);
    if (adm.sign_flipped) b = -b;
    if (b.is_zero()) throw InternalError("timelike vector mapped orthogonal to itself");
    return sign_at(b, f.field().id_place()) > 0;
}

/// Algebraic integrality in the maximal order: integral trace and norm.
inline bool is_algebraic_integer(const FieldElement& x)
{
    using boost::multiprecision::denominator;
    return denominator(x.trace()) == 1 && denominator(x.norm()) == 1 &&
           (x.radicand() != 1 || denominator(x.rational_part()) == 1);
}

/// g maps O_k^(n+1) onto itself: integral entries and a unit determinant.
inline bool stabilizes_standard_lattice(const Matrix& g)
{
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (!is_algebraic_integer(g(i, j))) return false;
        }
    }
    FieldElement det = g.determinant();
    if (!is_algebraic_integer(det)) return false;
    Rational n = det.norm();
    return n == 1 || n == -1;
}

/// Normalizer data for the minimal-covolume cases over Q and Q(sqrt 5).
struct NormalizerReport {
    TotallyRealField field = TotallyRealField::rationals();
    int n = 0;
    DiagonalForm form{TotallyRealField::rationals(), {1, -1, -1}};
    bool sign_flipped = false;
    /// Representatives of the fixed square classes Im(delta)_Theta.
    std::vector<FieldElement> theta_set;
    Integer index_gamma_lambda;
    std::optional<Isometry> witness;
    bool witness_preserves_form = false;
    bool witness_stabilizes_lattice = false;
    bool witness_in_so0 = true;
    std::optional<SquareClass> witness_spinor_class;
    bool witness_class_in_theta_set = false;
    bool theta_set_in_k_infinity_star = false;
};

/// Index [Gamma : Lambda'] from the tabulated Theta-fixed classes, with the
/// witness diag(-1, -1, 1, ..., 1) checked against the diagonal form.
inline NormalizerReport normalizer_index_check(const TotallyRealField& k, int n)
{
    if (n < 4 || n % 2 != 0) throw std::invalid_argument("n must be even and at least 4");
    NormalizerReport r;
    r.field = k;
    r.n = n;
    FieldElement lead;
    if (k.is_rationals()) {
        lead = 1;
        r.theta_set = {FieldElement(1), FieldElement(-1)};
    } else if (k.radicand() == 5) {
        // Data written for Id = place 0; the other choice of Id conjugates it.
        FieldElement golden = FieldElement::in(k, Rational(1, 2), Rational(1, 2));
        FieldElement theta = FieldElement::in(k, Rational(1, 2), Rational(-1, 2));
        if (k.id_place() == 1) {
            golden = golden.conjugate();
            theta = theta.conjugate();
        }
        lead = golden;
        r.theta_set = {FieldElement::in(k, 1), theta};
    } else {
        throw std::invalid_argument("Theta-data available only for Q and Q(sqrt(5))");
    }
    Vector coeffs(static_cast<std::size_t>(n) + 1, FieldElement::in(k, -1));
    coeffs[0] = lead.lifted_to(k);
    r.form = DiagonalForm(k, coeffs);
    Admissibility adm = admissibility(r.form);
    if (!adm.admissible) throw InternalError("tabulated form is not admissible");
    r.sign_flipped = adm.sign_flipped;
    r.index_gamma_lambda = Integer(r.theta_set.size());

    Vector diag(coeffs.size(), FieldElement::in(k, 1));
    diag[0] = diag[1] = FieldElement::in(k, -1);
    Matrix g = Matrix::diagonal(diag);
    Matrix F = r.form.gram();
    r.witness_preserves_form = g.transpose() * F * g == F;
    r.witness_stabilizes_lattice = stabilizes_standard_lattice(g);
    r.witness.emplace(r.form, g);
    r.witness_in_so0 = so0_membership(*r.witness);
    r.witness_spinor_class = spinor_norm(*r.witness);
    r.witness_class_in_theta_set = std::any_of(r.theta_set.begin(), r.theta_set.end(), [&](const FieldElement& t) {
        return SquareClass(k, t) == *r.witness_spinor_class;
    });
    r.theta_set_in_k_infinity_star = std::all_of(r.theta_set.begin(), r.theta_set.end(), [&](const FieldElement& t) {
        return in_k_infinity_star(t, k);
    });
    return r;
}

/// Product of 2..8 reflections (an even count when `special`) in random
/// anisotropic vectors whose coordinates are a + b sqrt(d), a, b in [-5, 5]
/// (b = 0 over Q).
template <class Rng>
Isometry random_isometry(const DiagonalForm& f, Rng& rng, bool special = true)
{
    const auto& k = f.field();
    std::uniform_int_distribution<int> coord(-5, 5);
    std::uniform_int_distribution<int> count(special ? 1 : 2, 4);
    int m = special ? 2 * count(rng) : std::uniform_int_distribution<int>(2, 8)(rng);
    Matrix g = Matrix::identity(f.dimension()).lifted_to(k);
    for (int i = 0; i < m; ++i) {
        Vector v(f.dimension());
        for (;;) {
            for (auto& x : v) {
                int a = coord(rng);
                int b = k.is_rationals() ? 0 : coord(rng);
                x = FieldElement::in(k, a, b);
            }
            if (!f.value(v).is_zero()) break;
        }
        g = g * reflect(v, f);
    }
    if (special) return Isometry(f, g);
    return Isometry::orthogonal(f, g);
}

} // namespace arithorb
