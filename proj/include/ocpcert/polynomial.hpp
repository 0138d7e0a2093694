#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ocpcert/errors.hpp"

namespace ocpcert {

/// Exponent vector of a monomial, one entry per variable.
using Exponents = std::vector<int>;

/// Graded lexicographic order: lower total degree first, then larger
/// exponent of the earlier variable first (x1 > x2 > ...).
struct GradedLex {
  bool operator()(const Exponents& a, const Exponents& b) const {
    int da = 0, db = 0;
    for (int e : a) da += e;
    for (int e : b) db += e;
    if (da != db) return da < db;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
      if (a[i] != b[i]) return a[i] > b[i];
    }
    return a.size() < b.size();
  }
};

/// Sparse multivariate polynomial with exact differentiation.
template <typename Scalar>
class Polynomial {
 public:
  using Terms = std::map<Exponents, Scalar, GradedLex>;

  Polynomial() = default;
  explicit Polynomial(int num_vars) : num_vars_(num_vars) {}

  static Polynomial constant(int num_vars, Scalar c) {
    Polynomial p(num_vars);
    p.add_term(Exponents(num_vars, 0), c);
    return p;
  }

  static Polynomial variable(int num_vars, int index) {
    Polynomial p(num_vars);
    Exponents e(num_vars, 0);
    e.at(index) = 1;
    p.add_term(e, Scalar(1));
    return p;
  }

  int num_vars() const { return num_vars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
      int s = 0;
      for (int k : e) s += k;
      d = std::max(d, s);
    }
    return d;
  }

  /// Adds c to the coefficient of the monomial; exact zeros are dropped.
  void add_term(const Exponents& e, Scalar c) {
    if (static_cast<int>(e.size()) != num_vars_) {
      throw DimensionError("monomial has " + std::to_string(e.size()) +
                           " exponents, polynomial has " + std::to_string(num_vars_) +
                           " variables");
    }
    for (int k : e) {
      if (k < 0) throw DimensionError("negative exponent in monomial");
    }
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      if (c != Scalar(0)) terms_.emplace(e, c);
      return;
    }
    it->second += c;
    if (it->second == Scalar(0)) terms_.erase(it);
  }

  Scalar coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  template <typename Derived>
  Scalar operator()(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != num_vars_) {
      throw DimensionError("evaluation point has dimension " + std::to_string(x.size()) +
                           ", expected " + std::to_string(num_vars_));
    }
    Scalar sum(0);
    for (const auto& [e, c] : terms_) {
      Scalar m = c;
      for (int i = 0; i < num_vars_; ++i) {
        for (int k = 0; k < e[i]; ++k) m *= x(i);
      }
      sum += m;
    }
    return sum;
  }

  Polynomial derivative(int var) const {
    Polynomial d(num_vars_);
    for (const auto& [e, c] : terms_) {
      if (e.at(var) == 0) continue;
      Exponents de = e;
      de[var] -= 1;
      d.add_term(de, c * Scalar(e[var]));
    }
    return d;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  Polynomial& operator*=(Scalar s) {
    if (s == Scalar(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, Scalar s) { return a *= s; }
  friend Polynomial operator*(Scalar s, Polynomial a) { return a *= s; }
  friend Polynomial operator-(Polynomial a) { return a *= Scalar(-1); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_compatible(b);
    Polynomial r(a.num_vars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(ea.size());
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        r.add_term(e, ca * cb);
      }
    }
    return r;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.num_vars_ == b.num_vars_ && a.terms_ == b.terms_;
  }

  template <typename Other>
  Polynomial<Other> cast() const {
    Polynomial<Other> r(num_vars_);
    for (const auto& [e, c] : terms_) r.add_term(e, static_cast<Other>(c));
    return r;
  }

 private:
  void check_compatible(const Polynomial& o) const {
    if (o.num_vars_ != num_vars_) {
      throw DimensionError("polynomials over " + std::to_string(num_vars_) + " and " +
                           std::to_string(o.num_vars_) + " variables");
    }
  }

  int num_vars_ = 0;
  Terms terms_;
};

/// Polynomial map R^num_vars -> R^num_outputs with cached first and second
/// derivative polynomials. A vector field is the square case.
template <typename Scalar>
class PolynomialMap {
 public:
  using Poly = Polynomial<Scalar>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  PolynomialMap() = default;
  PolynomialMap(int num_vars, std::vector<Poly> components)
      : num_vars_(num_vars), components_(std::move(components)) {
    for (const auto& c : components_) {
      if (c.num_vars() != num_vars_) {
        throw DimensionError("component over " + std::to_string(c.num_vars()) +
                             " variables in a map over " + std::to_string(num_vars_));
      }
    }
    build_derivatives();
  }

  static PolynomialMap zero(int num_outputs, int num_vars) {
    return PolynomialMap(num_vars, std::vector<Poly>(num_outputs, Poly(num_vars)));
  }

  int num_vars() const { return num_vars_; }
  int num_outputs() const { return static_cast<int>(components_.size()); }
  bool is_square() const { return num_outputs() == num_vars_; }
  const std::vector<Poly>& components() const { return components_; }
  const Poly& operator[](int i) const { return components_.at(i); }
  const Poly& partial(int out, int var) const { return jac_.at(out).at(var); }
  int degree() const {
    int d = 0;
    for (const auto& c : components_) d = std::max(d, c.degree());
    return d;
  }

  template <typename Derived>
  Vector operator()(const Eigen::MatrixBase<Derived>& x) const {
    Vector r(num_outputs());
    for (int i = 0; i < num_outputs(); ++i) r(i) = components_[i](x);
    return r;
  }

  template <typename Derived>
  Matrix jacobian(const Eigen::MatrixBase<Derived>& x) const {
    Matrix J(num_outputs(), num_vars_);
    for (int i = 0; i < num_outputs(); ++i) {
      for (int j = 0; j < num_vars_; ++j) J(i, j) = jac_[i][j](x);
    }
    return J;
  }

  /// sum_i w_i * Hessian(component_i)(x); symmetric num_vars x num_vars.
  template <typename DerivedW, typename DerivedX>
  Matrix weighted_hessian(const Eigen::MatrixBase<DerivedW>& w,
                          const Eigen::MatrixBase<DerivedX>& x) const {
    if (w.size() != num_outputs()) {
      throw DimensionError("weight vector has dimension " + std::to_string(w.size()) +
                           ", expected " + std::to_string(num_outputs()));
    }
    Matrix H = Matrix::Zero(num_vars_, num_vars_);
    for (int i = 0; i < num_outputs(); ++i) {
      if (w(i) == Scalar(0)) continue;
      for (int j = 0; j < num_vars_; ++j) {
        for (int k = j; k < num_vars_; ++k) {
          const Scalar v = w(i) * hess_[i][j][k](x);
          H(j, k) += v;
          if (k != j) H(k, j) += v;
        }
      }
    }
    return H;
  }

  friend bool operator==(const PolynomialMap& a, const PolynomialMap& b) {
    return a.num_vars_ == b.num_vars_ && a.components_ == b.components_;
  }

  PolynomialMap operator+(const PolynomialMap& o) const { return combine(o, Scalar(1)); }
  PolynomialMap operator-(const PolynomialMap& o) const { return combine(o, Scalar(-1)); }
  friend PolynomialMap operator*(Scalar s, const PolynomialMap& m) {
    std::vector<Poly> c = m.components_;
    for (auto& p : c) p *= s;
    return PolynomialMap(m.num_vars_, std::move(c));
  }

 private:
  PolynomialMap combine(const PolynomialMap& o, Scalar sign) const {
    if (o.num_vars_ != num_vars_ || o.num_outputs() != num_outputs()) {
      throw DimensionError("polynomial maps of different shapes");
    }
    std::vector<Poly> c = components_;
    for (int i = 0; i < num_outputs(); ++i) c[i] += sign * o.components_[i];
    return PolynomialMap(num_vars_, std::move(c));
  }

  void build_derivatives() {
    jac_.assign(components_.size(), {});
    hess_.assign(components_.size(), {});
    for (std::size_t i = 0; i < components_.size(); ++i) {
      jac_[i].reserve(num_vars_);
      for (int j = 0; j < num_vars_; ++j) jac_[i].push_back(components_[i].derivative(j));
      hess_[i].assign(num_vars_, std::vector<Poly>(num_vars_, Poly(num_vars_)));
      for (int j = 0; j < num_vars_; ++j) {
        for (int k = j; k < num_vars_; ++k) {
          hess_[i][j][k] = jac_[i][j].derivative(k);
          hess_[i][k][j] = hess_[i][j][k];
        }
      }
    }
  }

  int num_vars_ = 0;
  std::vector<Poly> components_;
  std::vector<std::vector<Poly>> jac_;
  std::vector<std::vector<std::vector<Poly>>> hess_;
};

template <typename Scalar>
using VectorFieldT = PolynomialMap<Scalar>;

using Poly = Polynomial<double>;
using PolyMap = PolynomialMap<double>;
using VectorField = PolynomialMap<double>;

/// Lie bracket [X, Y] = X' Y - Y' X, assembled symbolically.
template <typename Scalar>
PolynomialMap<Scalar> lie_bracket(const PolynomialMap<Scalar>& X, const PolynomialMap<Scalar>& Y) {
  if (!X.is_square() || !Y.is_square() || X.num_vars() != Y.num_vars()) {
    throw DimensionError("Lie bracket needs two vector fields on the same space");
  }
  const int n = X.num_vars();
  std::vector<Polynomial<Scalar>> out(n, Polynomial<Scalar>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out[i] += X.partial(i, j) * Y[j];
      out[i] -= Y.partial(i, j) * X[j];
    }
  }
  return PolynomialMap<Scalar>(n, std::move(out));
}

/// "x1^2*x3" style monomial text over the given variable names; "1" is the
/// constant monomial.
std::string format_monomial(const Exponents& e, const std::vector<std::string>& names);
Exponents parse_monomial(const std::string& text, const std::vector<std::string>& names);

/// x1..xn
std::vector<std::string> state_variable_names(int n);
/// x0_1..x0_n, xT_1..xT_n
std::vector<std::string> endpoint_variable_names(int n);

}  // namespace ocpcert
