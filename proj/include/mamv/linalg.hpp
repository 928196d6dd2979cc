#pragma once

// Small-dimension dense linear algebra: fixed-capacity vectors and matrices
// (n <= 8), a cyclic Jacobi symmetric eigensolver, and the matrix facts the
// mean-value operators are built on (polar factor, optimal det-1 shape,
// trace infimum, eigenvalue cutoff).

#include <array>
#include <initializer_list>
#include <span>
#include <string>

#include "mamv/error.hpp"

namespace mamv {

inline constexpr int kMaxDim = 8;

class Vec {
public:
    Vec() = default;
    explicit Vec(int n, double fill = 0.0);
    Vec(std::initializer_list<double> values);

    static Vec from(std::span<const double> values);
    static Vec unit(int n, int axis);

    int size() const noexcept { return n_; }
    double operator[](int i) const noexcept { return v_[i]; }
    double& operator[](int i) noexcept { return v_[i]; }
    std::span<const double> values() const noexcept { return {v_.data(), static_cast<std::size_t>(n_)}; }

    Vec& operator+=(const Vec& o);
    Vec& operator-=(const Vec& o);
    Vec& operator*=(double s);

    double dot(const Vec& o) const;
    double norm() const;
    double norm2() const { return dot(*this); }

    std::string str() const;

    friend bool operator==(const Vec& a, const Vec& b);

private:
    std::array<double, kMaxDim> v_{};
    int n_ = 0;
};

Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator-(Vec a);
Vec operator*(double s, Vec a);
Vec operator*(Vec a, double s);

/// General square matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(int n);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(int n);
    static Matrix diagonal(const Vec& d);
    /// Counterclockwise rotation of the plane by `angle`.
    static Matrix rotation2(double angle);
    /// Rotation of R^3 about `axis` (need not be normalized) by `angle`.
    static Matrix rotation3(const Vec& axis, double angle);
    /// Columns of the result are the given vectors.
    static Matrix from_columns(std::span<const Vec> cols);

    int dim() const noexcept { return n_; }
    double operator()(int i, int j) const noexcept { return a_[i * kMaxDim + j]; }
    double& operator()(int i, int j) noexcept { return a_[i * kMaxDim + j]; }

    Vec column(int j) const;
    Vec row(int i) const;

    Matrix transpose() const;
    double trace() const;
    /// Determinant by LU with partial pivoting.
    double det() const;
    double frobenius() const;

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(double s);

    std::string str() const;

private:
    std::array<double, kMaxDim * kMaxDim> a_{};
    int n_ = 0;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vec operator*(const Matrix& a, const Vec& x);
Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);

struct EigenSystem;

/// Symmetric matrix. Entries are symmetric by construction: building from a
/// general matrix copies the upper triangle onto the lower one.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int n);
    explicit SymMatrix(const Matrix& m);
    SymMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static SymMatrix identity(int n);
    static SymMatrix diagonal(const Vec& d);
    static SymMatrix outer(const Vec& v);
    /// Q diag(values) Q^T.
    static SymMatrix from_eigen(const Matrix& frame, const Vec& values);

    int dim() const noexcept { return m_.dim(); }
    double operator()(int i, int j) const noexcept { return m_(i, j); }
    void set(int i, int j, double value);

    const Matrix& matrix() const noexcept { return m_; }

    double trace() const { return m_.trace(); }
    double det() const { return m_.det(); }
    double quad(const Vec& x) const;
    EigenSystem eigen() const;
    double lambda_min() const;
    double lambda_max() const;

    SymMatrix& operator+=(const SymMatrix& o);
    SymMatrix& operator*=(double s);

private:
    Matrix m_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(SymMatrix a, const SymMatrix& b);
SymMatrix operator*(double s, SymMatrix a);
Vec operator*(const SymMatrix& a, const Vec& x);
/// Congruence A^T B A.
SymMatrix congruence(const Matrix& a, const SymMatrix& b);

struct EigenSystem {
    Vec values;      // descending
    Matrix vectors;  // orthonormal columns, vectors.column(i) pairs with values[i]

    Matrix reconstruct() const;
};

/// Cyclic Jacobi rotations; stops when the off-diagonal Frobenius norm drops
/// below 1e-14 of the full norm.
EigenSystem jacobi_eigen(const SymMatrix& b);

/// Symmetric positive definite matrix with its eigendecomposition cached.
/// Houses ellipsoid shapes (det 1) as well as strictly convex Hessians.
class SpdShape {
public:
    /// Throws InvalidMatrix unless every eigenvalue is strictly positive.
    static SpdShape from(const SymMatrix& m);
    static SpdShape from_eigen(const Matrix& frame, const Vec& eigenvalues);
    static SpdShape identity(int n);

    int dim() const noexcept { return m_.dim(); }
    const SymMatrix& matrix() const noexcept { return m_; }
    const Vec& eigenvalues() const noexcept { return eig_.values; }
    const Matrix& frame() const noexcept { return eig_.vectors; }
    double lambda_max() const { return eig_.values[0]; }
    double lambda_min() const { return eig_.values[dim() - 1]; }
    double det() const;
    bool det_normalized() const;

    /// Q diag(lambda^p) Q^T.
    SymMatrix power(double p) const;
    Vec apply(const Vec& y) const { return m_ * y; }
    /// A^{-1} y.
    Vec solve(const Vec& y) const;

    std::string str() const { return m_.matrix().str(); }

private:
    SpdShape(SymMatrix m, EigenSystem eig);

    SymMatrix m_;
    EigenSystem eig_;
};

/// Real number or the typed sentinel -inf. Never converts to a float
/// infinity implicitly.
class ExtendedReal {
public:
    static ExtendedReal finite(double v) { return ExtendedReal(false, v); }
    static ExtendedReal neg_inf() { return ExtendedReal(true, 0.0); }

    bool is_neg_inf() const noexcept { return neg_inf_; }
    /// Throws InvalidArgument on the sentinel.
    double value() const;

private:
    ExtendedReal(bool neg_inf, double v) : neg_inf_(neg_inf), value_(v) {}
    bool neg_inf_;
    double value_;
};

inline constexpr double kPsdTolerance = 1e-12;

/// (prod lambda_i)^{1/n} as exp(mean log lambda_i) after clamping entries in
/// (-kPsdTolerance, 0) to zero; 0 when any clamped eigenvalue is 0.
double det_root(const Vec& eigenvalues);

/// S = (A A^T)^{1/2}, the symmetric factor of the left polar decomposition.
SpdShape polar_spd(const Matrix& a);

/// A* = det(H)^{1/(2n)} H^{-1/2}; realizes inf trace(A^T H A) over det A = 1.
SpdShape optimal_shape(const SymMatrix& h);
SpdShape optimal_shape(const SpdShape& h);

/// inf over det A = 1 of trace(A^T B A): n det(B)^{1/n} for B >= 0, the -inf
/// sentinel when B has an eigenvalue below -kPsdTolerance.
ExtendedReal trace_inf(const SymMatrix& b);

/// (trace H / lambda_min H)^{1/2}: above this eigenvalue cap the constraint
/// A <= theta I no longer changes inf trace(A^T H A).
double theta0(const SymMatrix& h);
double theta0(const SpdShape& h);

}  // namespace mamv
