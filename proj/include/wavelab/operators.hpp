#pragma once

// Reference-element machinery on Gauss-Lobatto-Legendre nodes: quadrature,
// Lagrange basis, the SBP derivative matrix and tensor-product application
// on (N+1)x(N+1) nodal arrays. Nodal arrays are indexed field(i, j) with i
// along q (x) and j along r (y).

#include "wavelab/axis.hpp"
#include "wavelab/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace wavelab {

inline constexpr int kMaxDegree = 12;

enum class Face { west = 0, east = 1, south = 2, north = 3 };

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Legendre polynomial P_n(x) and P_{n-1}(x) by three-term recurrence.
template <typename Scalar>
std::pair<Scalar, Scalar> legendre_pair(int n, Scalar x) {
  Scalar p_prev(1);
  Scalar p = x;
  if (n == 0) return {p_prev, Scalar(0)};
  for (int k = 2; k <= n; ++k) {
    const Scalar p_next = (Scalar(2 * k - 1) * x * p - Scalar(k - 1) * p_prev) / Scalar(k);
    p_prev = p;
    p = p_next;
  }
  return {p, p_prev};
}

template <typename Scalar>
struct QuadratureRule {
  VectorX<Scalar> nodes;
  VectorX<Scalar> weights;
};

/// N+1 GLL nodes (roots of (1-q^2) P'_N) and weights 2 / (N(N+1) P_N(q)^2).
/// Newton from Chebyshev-Lobatto guesses.
template <typename Scalar = double>
QuadratureRule<Scalar> gll_nodes_weights(int degree) {
  if (degree < 1 || degree > kMaxDegree)
    throw ContractViolation("gll_nodes_weights: degree must be in [1, 12], got " +
                            std::to_string(degree));
  using std::abs;
  using std::cos;
  const int n = degree;
  const Scalar pi = Scalar(3.14159265358979323846264338327950288L);
  const Scalar tol = std::max(Scalar(1e-15), Scalar(8) * std::numeric_limits<Scalar>::epsilon());
  constexpr int max_iter = 100;

  QuadratureRule<Scalar> rule;
  rule.nodes.resize(n + 1);
  rule.weights.resize(n + 1);
  rule.nodes(0) = Scalar(-1);
  rule.nodes(n) = Scalar(1);
  for (int j = 1; j < n; ++j) {
    Scalar x = -cos(pi * Scalar(j) / Scalar(n));
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
      const auto [pn, pn1] = legendre_pair(n, x);
      // f = (1-x^2) P'_N = N (P_{N-1} - x P_N),  f' = -N(N+1) P_N
      const Scalar delta = (pn1 - x * pn) / (Scalar(n + 1) * pn);
      x += delta;
      if (abs(delta) <= tol) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw NumericalFailure("gll_nodes_weights: Newton did not converge for node " +
                             std::to_string(j));
    rule.nodes(j) = x;
  }
  // Exact antisymmetry about the origin.
  for (int j = 0; j <= n / 2; ++j) {
    const Scalar half = (rule.nodes(n - j) - rule.nodes(j)) / Scalar(2);
    rule.nodes(j) = -half;
    rule.nodes(n - j) = half;
  }
  if (n % 2 == 0) rule.nodes(n / 2) = Scalar(0);
  for (int j = 0; j <= n; ++j) {
    const Scalar pn = legendre_pair(n, rule.nodes(j)).first;
    rule.weights(j) = Scalar(2) / (Scalar(n * (n + 1)) * pn * pn);
  }
  return rule;
}

/// Barycentric weights 1 / prod_{k != j} (x_j - x_k).
template <typename Scalar>
VectorX<Scalar> barycentric_weights(const VectorX<Scalar>& nodes) {
  const Eigen::Index n = nodes.size();
  VectorX<Scalar> w = VectorX<Scalar>::Ones(n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      if (k != j) w(j) /= (nodes(j) - nodes(k));
  return w;
}

/// Values of all Lagrange basis polynomials at x.
template <typename Scalar>
VectorX<Scalar> lagrange_basis(const VectorX<Scalar>& nodes, Scalar x) {
  const Eigen::Index n = nodes.size();
  VectorX<Scalar> out = VectorX<Scalar>::Zero(n);
  const VectorX<Scalar> w = barycentric_weights(nodes);
  Scalar denom(0);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Scalar diff = x - nodes(j);
    if (diff == Scalar(0)) {
      out.setZero();
      out(j) = Scalar(1);
      return out;
    }
    out(j) = w(j) / diff;
    denom += out(j);
  }
  return out / denom;
}

template <typename Scalar = double>
struct ReferenceElement1D {
  int degree = 0;
  VectorX<Scalar> nodes;
  VectorX<Scalar> weights;  // diagonal of H
  MatrixX<Scalar> D;        // D_ij = L'_j(q_i)
  MatrixX<Scalar> Q;        // H D
  VectorX<Scalar> e_left;   // basis values at q = -1
  VectorX<Scalar> e_right;  // basis values at q = +1

  int size() const noexcept { return degree + 1; }

  /// B(1,1) - B(-1,-1)
  MatrixX<Scalar> boundary_matrix() const {
    return e_right * e_right.transpose() - e_left * e_left.transpose();
  }
};

/// GLL reference element with barycentric derivative matrix.
template <typename Scalar = double>
ReferenceElement1D<Scalar> build_reference_element(int degree) {
  ReferenceElement1D<Scalar> ref;
  auto rule = gll_nodes_weights<Scalar>(degree);
  ref.degree = degree;
  ref.nodes = std::move(rule.nodes);
  ref.weights = std::move(rule.weights);
  const int n = degree + 1;
  const VectorX<Scalar> w = barycentric_weights(ref.nodes);
  ref.D = MatrixX<Scalar>::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    Scalar diag(0);
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      ref.D(i, j) = (w(j) / w(i)) / (ref.nodes(i) - ref.nodes(j));
      diag -= ref.D(i, j);
    }
    ref.D(i, i) = diag;
  }
  ref.Q = ref.weights.asDiagonal() * ref.D;
  ref.e_left = lagrange_basis<Scalar>(ref.nodes, Scalar(-1));
  ref.e_right = lagrange_basis<Scalar>(ref.nodes, Scalar(1));
  return ref;
}

/// Apply a 1D operator along one tensor axis of a nodal array, times `metric`
/// (2/dx for derivatives). Equivalent to (I (x) op) or (op (x) I) acting on
/// the column-major vectorization.
template <typename Derived, typename OpDerived>
MatrixX<typename Derived::Scalar> tensor_apply(const Eigen::MatrixBase<OpDerived>& op,
                                               Axis axis,
                                               const Eigen::MatrixBase<Derived>& field,
                                               typename Derived::Scalar metric = 1) {
  if (op.rows() != op.cols() || field.rows() != field.cols() || op.rows() != field.rows())
    throw ContractViolation("tensor_apply: operator and field dimensions disagree");
  if (axis == Axis::x) return metric * (op * field);
  return metric * (field * op.transpose());
}

/// Nodal trace on a face. GLL nodes include the endpoints, so this is a
/// row or column of the array.
template <typename Derived>
VectorX<typename Derived::Scalar> face_trace(const Eigen::MatrixBase<Derived>& field, Face face) {
  const Eigen::Index last = field.rows() - 1;
  switch (face) {
    case Face::west: return field.row(0).transpose();
    case Face::east: return field.row(last).transpose();
    case Face::south: return field.col(0);
    case Face::north: return field.col(last);
  }
  throw ContractViolation("face_trace: invalid face");
}

inline Axis face_axis(Face f) { return (f == Face::west || f == Face::east) ? Axis::x : Axis::y; }
/// +1 for east/north, -1 for west/south.
inline int face_sign(Face f) { return (f == Face::east || f == Face::north) ? 1 : -1; }

/// Affine map [x0,x1]x[y0,y1] <- [-1,1]^2.
struct AffineMap {
  double x0 = -1.0, x1 = 1.0, y0 = -1.0, y1 = 1.0;

  double dx() const noexcept { return x1 - x0; }
  double dy() const noexcept { return y1 - y0; }
  double qx() const noexcept { return 2.0 / dx(); }
  double ry() const noexcept { return 2.0 / dy(); }
  double jacobian() const noexcept { return 0.25 * dx() * dy(); }
  double metric(Axis a) const noexcept { return a == Axis::x ? qx() : ry(); }
  double length(Axis a) const noexcept { return a == Axis::x ? dx() : dy(); }

  double x(double q) const noexcept { return x0 + 0.5 * dx() * (1.0 + q); }
  double y(double r) const noexcept { return y0 + 0.5 * dy() * (1.0 + r); }
  double q(double x) const noexcept { return 2.0 * (x - x0) / dx() - 1.0; }
  double r(double y) const noexcept { return 2.0 * (y - y0) / dy() - 1.0; }
};

}  // namespace wavelab
