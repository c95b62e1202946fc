#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>

namespace slhjb {

/// Fixed-size point / vector in R^Dim.
template <int Dim>
struct Vec {
  static_assert(Dim >= 1 && Dim <= 3, "supported dimensions are 1..3");
  std::array<double, Dim> c{};

  constexpr double& operator[](std::size_t i) { return c[i]; }
  constexpr double operator[](std::size_t i) const { return c[i]; }

  static constexpr Vec zero() { return Vec{}; }
  static constexpr Vec unit(int axis) {
    Vec e{};
    e.c[axis] = 1.0;
    return e;
  }

  constexpr Vec& operator+=(const Vec& o) {
    for (int d = 0; d < Dim; ++d) c[d] += o.c[d];
    return *this;
  }
  constexpr Vec& operator-=(const Vec& o) {
    for (int d = 0; d < Dim; ++d) c[d] -= o.c[d];
    return *this;
  }
  constexpr Vec& operator*=(double s) {
    for (int d = 0; d < Dim; ++d) c[d] *= s;
    return *this;
  }

  friend constexpr Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend constexpr Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend constexpr Vec operator-(Vec a) { return a *= -1.0; }
  friend constexpr Vec operator*(Vec a, double s) { return a *= s; }
  friend constexpr Vec operator*(double s, Vec a) { return a *= s; }
  friend constexpr Vec operator/(Vec a, double s) { return a *= (1.0 / s); }
  friend constexpr bool operator==(const Vec& a, const Vec& b) = default;

  friend std::ostream& operator<<(std::ostream& os, const Vec& v) {
    os << '(';
    for (int d = 0; d < Dim; ++d) os << (d ? ", " : "") << v.c[d];
    return os << ')';
  }
};

template <int Dim>
constexpr double dot(const Vec<Dim>& a, const Vec<Dim>& b) {
  double s = 0.0;
  for (int d = 0; d < Dim; ++d) s += a[d] * b[d];
  return s;
}

template <int Dim>
inline double norm(const Vec<Dim>& a) {
  return std::sqrt(dot(a, a));
}

template <int Dim>
inline double distance(const Vec<Dim>& a, const Vec<Dim>& b) {
  return norm(a - b);
}

/// Dense square matrix stored by rows.
template <int Dim>
struct Mat {
  std::array<Vec<Dim>, Dim> row{};

  static constexpr Mat identity() {
    Mat m{};
    for (int d = 0; d < Dim; ++d) m.row[d][d] = 1.0;
    return m;
  }

  constexpr double operator()(int i, int j) const { return row[i][j]; }
  constexpr double& operator()(int i, int j) { return row[i][j]; }

  friend constexpr Vec<Dim> operator*(const Mat& m, const Vec<Dim>& v) {
    Vec<Dim> out{};
    for (int i = 0; i < Dim; ++i) out[i] = dot(m.row[i], v);
    return out;
  }
};

/// Columns sigma^l of the diffusion matrix; only the first n_sigma are used.
template <int Dim>
using DiffusionColumns = std::array<Vec<Dim>, Dim>;

/// <M a, b> for symmetric M.
template <int Dim>
constexpr double quadratic_form(const Mat<Dim>& m, const Vec<Dim>& a, const Vec<Dim>& b) {
  return dot(m * a, b);
}

/// Solves m x = rhs by Gaussian elimination with partial pivoting.
/// Returns false when the matrix is numerically singular.
template <int Dim>
bool solve_linear(Mat<Dim> m, Vec<Dim> rhs, Vec<Dim>& x) {
  for (int col = 0; col < Dim; ++col) {
    int piv = col;
    for (int r = col + 1; r < Dim; ++r)
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    if (std::abs(m(piv, col)) < 1e-300) return false;
    std::swap(m.row[col], m.row[piv]);
    std::swap(rhs[col], rhs[piv]);
    for (int r = col + 1; r < Dim; ++r) {
      const double f = m(r, col) / m(col, col);
      for (int k = col; k < Dim; ++k) m(r, k) -= f * m(col, k);
      rhs[r] -= f * rhs[col];
    }
  }
  for (int r = Dim - 1; r >= 0; --r) {
    double s = rhs[r];
    for (int k = r + 1; k < Dim; ++k) s -= m(r, k) * x[k];
    x[r] = s / m(r, r);
  }
  return true;
}

}  // namespace slhjb
