#include "mamv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mamv {

namespace {

void check_dim(int n) {
    if (n < 1 || n > kMaxDim) {
        throw Error(Errc::InvalidArgument, "dimension " + std::to_string(n) + " outside [1, 8]");
    }
}

void check_same(int a, int b) {
    if (a != b) {
        throw Error(Errc::InvalidArgument,
                    "dimension mismatch " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Vec

Vec::Vec(int n, double fill) : n_(n) {
    check_dim(n);
    std::fill_n(v_.begin(), n, fill);
}

Vec::Vec(std::initializer_list<double> values) : n_(static_cast<int>(values.size())) {
    check_dim(n_);
    std::copy(values.begin(), values.end(), v_.begin());
}

Vec Vec::from(std::span<const double> values) {
    Vec v(static_cast<int>(values.size()));
    std::copy(values.begin(), values.end(), v.v_.begin());
    return v;
}

Vec Vec::unit(int n, int axis) {
    Vec v(n);
    v[axis] = 1.0;
    return v;
}

Vec& Vec::operator+=(const Vec& o) {
    check_same(n_, o.n_);
    for (int i = 0; i < n_; ++i) v_[i] += o.v_[i];
    return *this;
}

Vec& Vec::operator-=(const Vec& o) {
    check_same(n_, o.n_);
    for (int i = 0; i < n_; ++i) v_[i] -= o.v_[i];
    return *this;
}

Vec& Vec::operator*=(double s) {
    for (int i = 0; i < n_; ++i) v_[i] *= s;
    return *this;
}

double Vec::dot(const Vec& o) const {
    check_same(n_, o.n_);
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += v_[i] * o.v_[i];
    return s;
}

double Vec::norm() const { return std::sqrt(norm2()); }

std::string Vec::str() const {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (int i = 0; i < n_; ++i) os << (i ? ", " : "") << v_[i];
    os << ')';
    return os.str();
}

bool operator==(const Vec& a, const Vec& b) {
    return a.n_ == b.n_ && std::equal(a.v_.begin(), a.v_.begin() + a.n_, b.v_.begin());
}

Vec operator+(Vec a, const Vec& b) { return a += b; }
Vec operator-(Vec a, const Vec& b) { return a -= b; }
Vec operator-(Vec a) { return a *= -1.0; }
Vec operator*(double s, Vec a) { return a *= s; }
Vec operator*(Vec a, double s) { return a *= s; }

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(int n) : n_(n) { check_dim(n); }

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : n_(static_cast<int>(rows.size())) {
    check_dim(n_);
    int i = 0;
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != n_) {
            throw Error(Errc::InvalidMatrix, "matrix literal is not square");
        }
        int j = 0;
        for (double v : r) (*this)(i, j++) = v;
        ++i;
    }
}

Matrix Matrix::identity(int n) {
    Matrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(const Vec& d) {
    Matrix m(d.size());
    for (int i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix Matrix::rotation2(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return Matrix{{c, -s}, {s, c}};
}

Matrix Matrix::rotation3(const Vec& axis, double angle) {
    check_same(axis.size(), 3);
    const Vec k = (1.0 / axis.norm()) * axis;
    const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
    // Rodrigues
    return Matrix{{t * k[0] * k[0] + c, t * k[0] * k[1] - s * k[2], t * k[0] * k[2] + s * k[1]},
                  {t * k[0] * k[1] + s * k[2], t * k[1] * k[1] + c, t * k[1] * k[2] - s * k[0]},
                  {t * k[0] * k[2] - s * k[1], t * k[1] * k[2] + s * k[0], t * k[2] * k[2] + c}};
}

Matrix Matrix::from_columns(std::span<const Vec> cols) {
    const int n = static_cast<int>(cols.size());
    Matrix m(n);
    for (int j = 0; j < n; ++j) {
        check_same(cols[j].size(), n);
        for (int i = 0; i < n; ++i) m(i, j) = cols[j][i];
    }
    return m;
}

Vec Matrix::column(int j) const {
    Vec v(n_);
    for (int i = 0; i < n_; ++i) v[i] = (*this)(i, j);
    return v;
}

Vec Matrix::row(int i) const {
    Vec v(n_);
    for (int j = 0; j < n_; ++j) v[j] = (*this)(i, j);
    return v;
}

Matrix Matrix::transpose() const {
    Matrix t(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::trace() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += (*this)(i, i);
    return s;
}

double Matrix::det() const {
    Matrix lu = *this;
    double d = 1.0;
    for (int k = 0; k < n_; ++k) {
        int piv = k;
        for (int i = k + 1; i < n_; ++i)
            if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
        if (lu(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < n_; ++j) std::swap(lu(k, j), lu(piv, j));
            d = -d;
        }
        d *= lu(k, k);
        for (int i = k + 1; i < n_; ++i) {
            const double f = lu(i, k) / lu(k, k);
            for (int j = k + 1; j < n_; ++j) lu(i, j) -= f * lu(k, j);
        }
    }
    return d;
}

double Matrix::frobenius() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) s += (*this)(i, j) * (*this)(i, j);
    return std::sqrt(s);
}

Matrix& Matrix::operator+=(const Matrix& o) {
    check_same(n_, o.n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) (*this)(i, j) += o(i, j);
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    check_same(n_, o.n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) (*this)(i, j) -= o(i, j);
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) (*this)(i, j) *= s;
    return *this;
}

std::string Matrix::str() const {
    std::ostringstream os;
    os.precision(17);
    os << '[';
    for (int i = 0; i < n_; ++i) {
        os << (i ? ", [" : "[");
        for (int j = 0; j < n_; ++j) os << (j ? ", " : "") << (*this)(i, j);
        os << ']';
    }
    os << ']';
    return os.str();
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    check_same(a.dim(), b.dim());
    const int n = a.dim();
    Matrix c(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double aik = a(i, k);
            for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vec operator*(const Matrix& a, const Vec& x) {
    check_same(a.dim(), x.size());
    const int n = a.dim();
    Vec y(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix::SymMatrix(int n) : m_(n) {}

SymMatrix::SymMatrix(const Matrix& m) : m_(m) {
    for (int i = 0; i < dim(); ++i)
        for (int j = i + 1; j < dim(); ++j) m_(j, i) = m_(i, j);
}

SymMatrix::SymMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : SymMatrix(Matrix(rows)) {}

SymMatrix SymMatrix::identity(int n) { return SymMatrix(Matrix::identity(n)); }

SymMatrix SymMatrix::diagonal(const Vec& d) { return SymMatrix(Matrix::diagonal(d)); }

SymMatrix SymMatrix::outer(const Vec& v) {
    SymMatrix s(v.size());
    for (int i = 0; i < v.size(); ++i)
        for (int j = 0; j < v.size(); ++j) s.m_(i, j) = v[i] * v[j];
    return s;
}

SymMatrix SymMatrix::from_eigen(const Matrix& frame, const Vec& values) {
    check_same(frame.dim(), values.size());
    const int n = values.size();
    SymMatrix s(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += frame(i, k) * values[k] * frame(j, k);
            s.m_(i, j) = acc;
            s.m_(j, i) = acc;
        }
    return s;
}

void SymMatrix::set(int i, int j, double value) {
    m_(i, j) = value;
    m_(j, i) = value;
}

double SymMatrix::quad(const Vec& x) const { return x.dot(m_ * x); }

EigenSystem SymMatrix::eigen() const { return jacobi_eigen(*this); }

double SymMatrix::lambda_min() const {
    const EigenSystem e = eigen();
    return e.values[dim() - 1];
}

double SymMatrix::lambda_max() const { return eigen().values[0]; }

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
    m_ += o.m_;
    return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
    m_ *= s;
    return *this;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a += (-1.0) * b; }
SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
Vec operator*(const SymMatrix& a, const Vec& x) { return a.matrix() * x; }

SymMatrix congruence(const Matrix& a, const SymMatrix& b) {
    return SymMatrix(a.transpose() * b.matrix() * a);
}

Matrix EigenSystem::reconstruct() const { return SymMatrix::from_eigen(vectors, values).matrix(); }

// ---------------------------------------------------------------------------
// Jacobi eigensolver

EigenSystem jacobi_eigen(const SymMatrix& b) {
    const int n = b.dim();
    Matrix a = b.matrix();
    Matrix v = Matrix::identity(n);
    const double total = a.frobenius();

    auto off_norm = [&] {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps && off_norm() > 1e-14 * total; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::array<int, kMaxDim> order{};
    std::iota(order.begin(), order.begin() + n, 0);
    std::stable_sort(order.begin(), order.begin() + n,
                     [&](int i, int j) { return a(i, i) > a(j, j); });

    EigenSystem out{Vec(n), Matrix(n)};
    for (int k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (int i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// SpdShape

SpdShape::SpdShape(SymMatrix m, EigenSystem eig) : m_(std::move(m)), eig_(std::move(eig)) {}

SpdShape SpdShape::from(const SymMatrix& m) {
    EigenSystem e = m.eigen();
    if (!(e.values[m.dim() - 1] > 0.0)) {
        throw Error(Errc::InvalidMatrix,
                    "matrix is not positive definite (lambda_min = " +
                        std::to_string(e.values[m.dim() - 1]) + ")");
    }
    return SpdShape(m, std::move(e));
}

SpdShape SpdShape::from_eigen(const Matrix& frame, const Vec& eigenvalues) {
    const int n = eigenvalues.size();
    for (int i = 0; i < n; ++i) {
        if (!(eigenvalues[i] > 0.0)) throw Error(Errc::InvalidMatrix, "non-positive eigenvalue");
    }
    std::array<int, kMaxDim> order{};
    std::iota(order.begin(), order.begin() + n, 0);
    std::stable_sort(order.begin(), order.begin() + n,
                     [&](int i, int j) { return eigenvalues[i] > eigenvalues[j]; });
    EigenSystem e{Vec(n), Matrix(n)};
    for (int k = 0; k < n; ++k) {
        e.values[k] = eigenvalues[order[k]];
        for (int i = 0; i < n; ++i) e.vectors(i, k) = frame(i, order[k]);
    }
    SymMatrix m = SymMatrix::from_eigen(e.vectors, e.values);
    return SpdShape(std::move(m), std::move(e));
}

SpdShape SpdShape::identity(int n) { return from_eigen(Matrix::identity(n), Vec(n, 1.0)); }

double SpdShape::det() const {
    double d = 1.0;
    for (int i = 0; i < dim(); ++i) d *= eig_.values[i];
    return d;
}

bool SpdShape::det_normalized() const { return std::abs(det() - 1.0) <= 1e-12; }

SymMatrix SpdShape::power(double p) const {
    Vec v(dim());
    for (int i = 0; i < dim(); ++i) v[i] = std::pow(eig_.values[i], p);
    return SymMatrix::from_eigen(eig_.vectors, v);
}

Vec SpdShape::solve(const Vec& y) const {
    // A^{-1} y = Q diag(1/lambda) Q^T y
    const int n = dim();
    Vec out(n);
    for (int k = 0; k < n; ++k) {
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += eig_.vectors(i, k) * y[i];
        c /= eig_.values[k];
        for (int i = 0; i < n; ++i) out[i] += c * eig_.vectors(i, k);
    }
    return out;
}

double ExtendedReal::value() const {
    if (neg_inf_) throw Error(Errc::InvalidArgument, "value() on the -inf sentinel");
    return value_;
}

// ---------------------------------------------------------------------------
// Matrix facts

double det_root(const Vec& eigenvalues) {
    const int n = eigenvalues.size();
    double log_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double l = eigenvalues[i];
        if (l < 0.0 && l > -kPsdTolerance) l = 0.0;
        if (l < 0.0) throw Error(Errc::InvalidMatrix, "det_root of a matrix with a negative eigenvalue");
        if (l == 0.0) return 0.0;
        log_sum += std::log(l);
    }
    return std::exp(log_sum / n);
}

SpdShape polar_spd(const Matrix& a) {
    const int n = a.dim();
    if (n < 1) throw Error(Errc::InvalidMatrix, "empty matrix");
    const double d = a.det();
    if (!std::isfinite(d) || d == 0.0) throw Error(Errc::InvalidMatrix, "singular matrix");
    if (std::abs(std::abs(d) - 1.0) > 1e-10) {
        throw Error(Errc::InvalidMatrix, "polar_spd expects |det A| = 1, got " + std::to_string(d));
    }
    const EigenSystem e = SymMatrix(a * a.transpose()).eigen();
    Vec root(n);
    for (int i = 0; i < n; ++i) {
        if (!(e.values[i] > 0.0)) throw Error(Errc::InvalidMatrix, "A A^T is not positive definite");
        root[i] = std::sqrt(e.values[i]);
    }
    return SpdShape::from_eigen(e.vectors, root);
}

SpdShape optimal_shape(const SymMatrix& h) {
    const int n = h.dim();
    const EigenSystem e = h.eigen();
    if (!(e.values[n - 1] > 0.0)) {
        throw Error(Errc::NotStrictlyConvex,
                    "optimal_shape needs lambda_min > 0, got " + std::to_string(e.values[n - 1]));
    }
    // eigenvalues of A*: det(H)^{1/(2n)} lambda_i^{-1/2}, computed in log space
    double mean_log = 0.0;
    for (int i = 0; i < n; ++i) mean_log += std::log(e.values[i]);
    mean_log /= n;
    Vec a(n);
    for (int i = 0; i < n; ++i) a[i] = std::exp(0.5 * (mean_log - std::log(e.values[i])));
    return SpdShape::from_eigen(e.vectors, a);
}

SpdShape optimal_shape(const SpdShape& h) { return optimal_shape(h.matrix()); }

ExtendedReal trace_inf(const SymMatrix& b) {
    const EigenSystem e = b.eigen();
    const int n = b.dim();
    if (e.values[n - 1] < -kPsdTolerance) return ExtendedReal::neg_inf();
    return ExtendedReal::finite(n * det_root(e.values));
}

double theta0(const SymMatrix& h) {
    const double lmin = h.lambda_min();
    if (!(lmin > 0.0)) {
        throw Error(Errc::NotStrictlyConvex, "theta0 needs lambda_min > 0");
    }
    return std::sqrt(h.trace() / lmin);
}

double theta0(const SpdShape& h) { return theta0(h.matrix()); }

}  // namespace mamv
