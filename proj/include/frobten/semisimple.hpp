#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <complex>
#include <random>

#include "frobten/frobenius.hpp"

namespace frobten {

using Complex = std::complex<double>;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// The multiplication at a point is defective: no basis of idempotents.
struct NonSemisimpleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Canonical coordinates collide: the spectrum of E-multiplication is not
// simple at the point.
struct NonTameError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DiagonalizeOptions {
  double tol = 1e-10;
  unsigned seed = 20240501;
  int max_retries = 8;
};

// Numeric semisimple frame at a point: canonical coordinates u^i, metric
// weights eta_i = g(e_i, e_i), the idempotents e_i as columns in the flat
// basis, and the first-order idempotent expansion e_i(x) = e_i + sum_a x^a
// e_i^a + O(x^2) with first_order[i].col(a) = e_i^a.
struct SemisimplePointData {
  Eigen::VectorXcd u;
  Eigen::VectorXcd eta;
  Eigen::MatrixXcd idempotents;
  std::vector<Eigen::MatrixXcd> first_order;

  int dim() const { return int(u.size()); }
};

// Special initial conditions (u, eta, v): the data determining the germ of a
// split semisimple structure, with v the matrix of the operator
// V(X) = nabla_X E - (D/2) X in the idempotent frame, V(e_i) = sum_j v_ij e_j.
struct SpecialInitialConditions {
  Eigen::VectorXcd u;
  Eigen::VectorXcd eta;
  Eigen::MatrixXcd v;

  int dim() const { return int(u.size()); }
};

namespace detail {

// Derivative of the potential at the point x with the directions `prefix`
// already taken: sum over the remaining insertions of Y with the symmetry
// weights 1/prod(mult!).
template <class Model>
Complex phi_derivative(const Model& m, const std::vector<int>& prefix,
                       const Eigen::VectorXcd& x) {
  Complex total = 0;
  const int N = m.truncation();
  for (int k = 0; k + int(prefix.size()) <= N; ++k) {
    for_each_sorted_tuple(m.dim(), k, m.basis, [&](const std::vector<int>& e) {
      std::vector<int> idx = prefix;
      idx.insert(idx.end(), e.begin(), e.end());
      Rational y = m.correlators.get(idx);
      if (y == 0) return;
      Rational w = 1;
      Complex mono = 1;
      int run = 1;
      for (size_t j = 0; j < e.size(); ++j) {
        mono *= x[e[j]];
        run = (j > 0 && e[j] == e[j - 1]) ? run + 1 : 1;
        w *= run;
      }
      total += to_double(y / w) * mono;
    });
  }
  return total;
}

inline void check_tame(const Eigen::VectorXcd& u, double tol,
                       const char* what) {
  double scale = 1.0;
  for (int i = 0; i < u.size(); ++i) scale = std::max(scale, std::abs(u[i]));
  std::string collisions;
  for (int i = 0; i < u.size(); ++i)
    for (int j = i + 1; j < u.size(); ++j)
      if (std::abs(u[i] - u[j]) <= tol * scale)
        collisions += " (" + std::to_string(i) + "," + std::to_string(j) + ")";
  if (!collisions.empty())
    throw NonTameError(std::string(what) +
                       ": colliding canonical coordinates at index pairs" +
                       collisions);
}

}  // namespace detail

// Idempotent frame of the (even) multiplication at a complex point.
// Simultaneous diagonalization through multiplication by a random generic
// vector, verified on every coordinate direction; retried on near-degenerate
// spectra.  u comes from E-multiplication when Euler data is present,
// otherwise from expanding the position vector in the idempotent frame
// (additive normalization u(0) = 0, exact for constant frames).
inline SemisimplePointData diagonalize_at_point(
    const FrobeniusModel<Rational>& m, const Eigen::VectorXcd& x,
    const DiagonalizeOptions& opt = {}) {
  const int d = m.dim();
  if (!m.basis.all_even())
    throw std::invalid_argument("semisimple analysis needs an even basis");
  if (int(x.size()) != d)
    throw std::invalid_argument("point dimension mismatch");

  Eigen::MatrixXcd g(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) g(a, b) = to_double(m.metric.g[a][b]);
  Eigen::MatrixXcd ginv = g.inverse();

  // multiplication operators: mult[a].col(b) = coordinates of d_a o d_b
  std::vector<Eigen::MatrixXcd> mult(d, Eigen::MatrixXcd::Zero(d, d));
  {
    Eigen::MatrixXcd phi3(d, d);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b)
        for (int c = b; c < d; ++c) {
          phi3(b, c) = detail::phi_derivative(m, {a, b, c}, x);
          phi3(c, b) = phi3(b, c);
        }
      mult[a] = ginv.transpose() * phi3;  // (c <- b) = sum_e phi3(b,e) ginv(e,c)
    }
  }

  std::mt19937 rng(opt.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXcd V;
  bool found = false;
  for (int attempt = 0; attempt < opt.max_retries && !found; ++attempt) {
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(d, d);
    for (int a = 0; a < d; ++a)
      M += Complex(dist(rng), dist(rng)) * mult[a];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M);
    if (es.info() != Eigen::Success) continue;
    double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    double sep = std::numeric_limits<double>::max();
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        sep = std::min(sep, std::abs(es.eigenvalues()[i] - es.eigenvalues()[j]));
    if (d > 1 && sep <= std::sqrt(opt.tol) * scale) continue;
    V = es.eigenvectors();
    found = true;
  }
  if (!found)
    throw NonSemisimpleError(
        "no generic multiplication operator with simple spectrum; "
        "the algebra is not semisimple");

  // verify that the common frame diagonalizes every direction
  Eigen::MatrixXcd Vinv = V.inverse();
  for (int a = 0; a < d; ++a) {
    Eigen::MatrixXcd W = Vinv * mult[a] * V;
    double scale = std::max(1.0, W.cwiseAbs().maxCoeff());
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (i != j && std::abs(W(i, j)) > opt.tol * scale)
          throw NonSemisimpleError(
              "multiplication operators have no common eigenframe; "
              "the algebra is not semisimple");
  }

  auto apply_mult = [&](const Eigen::VectorXcd& y, const Eigen::VectorXcd& z) {
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(d);
    for (int a = 0; a < d; ++a) w += y[a] * (mult[a] * z);
    return w;
  };

  SemisimplePointData out;
  out.idempotents.resize(d, d);
  out.eta.resize(d);
  out.u.resize(d);
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXcd v = V.col(i);
    Eigen::VectorXcd w = apply_mult(v, v);
    int jmax = 0;
    for (int j = 1; j < d; ++j)
      if (std::abs(v[j]) > std::abs(v[jmax])) jmax = j;
    Complex c = w[jmax] / v[jmax];
    if (std::abs(c) <= opt.tol * std::max(1.0, v.cwiseAbs().maxCoeff()))
      throw NonSemisimpleError(
          "nilpotent eigendirection: the algebra is not semisimple");
    Eigen::VectorXcd e = v / c;
    double res = (apply_mult(e, e) - e).cwiseAbs().maxCoeff();
    if (res > opt.tol * std::max(1.0, e.cwiseAbs().maxCoeff()))
      throw NonSemisimpleError("idempotent residual above tolerance");
    out.idempotents.col(i) = e;
    out.eta[i] = (e.transpose() * g * e)(0, 0);
    if (std::abs(out.eta[i]) <= opt.tol)
      throw NonSemisimpleError("degenerate metric weight in the eigenframe");
  }

  if (m.euler) {
    Eigen::VectorXcd ev = Eigen::VectorXcd::Zero(d);
    for (int b = 0; b < d; ++b) {
      ev[b] = to_double(m.euler->r[b]);
      for (int a = 0; a < d; ++a) ev[b] += x[a] * to_double(m.euler->d[a][b]);
    }
    for (int i = 0; i < d; ++i) {
      Eigen::VectorXcd e = out.idempotents.col(i);
      Eigen::VectorXcd w = apply_mult(ev, e);
      int jmax = 0;
      for (int j = 1; j < d; ++j)
        if (std::abs(e[j]) > std::abs(e[jmax])) jmax = j;
      out.u[i] = w[jmax] / e[jmax];
    }
    detail::check_tame(out.u, opt.tol, "diagonalize_at_point");
  } else {
    out.u = out.idempotents.fullPivLu().solve(x);
  }

  // first-order idempotent data: e_i^a solves (Id - 2 e_i o) e_i^a equal to
  // the three-fold product (e_i, e_i, d_a)
  {
    out.first_order.assign(d, Eigen::MatrixXcd::Zero(d, d));
    std::vector<std::vector<Eigen::VectorXcd>> phi4(d);
    for (int a = 0; a < d; ++a) {
      phi4[a].resize(d);
      for (int b = 0; b < d; ++b) {
        phi4[a][b].resize(d * d);
        for (int c = 0; c < d; ++c)
          for (int f = 0; f < d; ++f)
            phi4[a][b][c * d + f] =
                detail::phi_derivative(m, {a, b, c, f}, x);
      }
    }
    for (int i = 0; i < d; ++i) {
      Eigen::VectorXcd e = out.idempotents.col(i);
      Eigen::MatrixXcd me = Eigen::MatrixXcd::Zero(d, d);
      for (int a = 0; a < d; ++a) me += e[a] * mult[a];
      Eigen::MatrixXcd lhs =
          Eigen::MatrixXcd::Identity(d, d) - 2.0 * me;
      auto lu = lhs.fullPivLu();
      for (int a = 0; a < d; ++a) {
        Eigen::VectorXcd low = Eigen::VectorXcd::Zero(d);
        for (int f = 0; f < d; ++f) {
          Complex acc = 0;
          for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
              acc += e[b] * e[c] * phi4[a][b][c * d + f];
          low[f] = acc;
        }
        out.first_order[i].col(a) = lu.solve(ginv.transpose() * low);
      }
    }
  }
  return out;
}

// Special initial conditions at a tame point.  eta_{ij} = e_j . eta_i comes
// from the first-order idempotent data; the v-matrix is the idempotent-frame
// matrix of V(X) = nabla_X E - (D/2) X, i.e. v_ij = -(u^i - u^j) eta_{ij} /
// (2 eta_j), which is skew in the operator sense v_ij eta_j + v_ji eta_i = 0.
inline SpecialInitialConditions special_init(const FrobeniusModel<Rational>& m,
                                             const Eigen::VectorXcd& x,
                                             const DiagonalizeOptions& opt = {}) {
  SemisimplePointData data = diagonalize_at_point(m, x, opt);
  const int d = data.dim();
  detail::check_tame(data.u, opt.tol, "special_init");

  Eigen::MatrixXcd g(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) g(a, b) = to_double(m.metric.g[a][b]);

  // deta(i, a) = d_a eta_i = 2 g(e_i^a, e_i)
  Eigen::MatrixXcd deta(d, d);
  for (int i = 0; i < d; ++i)
    for (int a = 0; a < d; ++a)
      deta(i, a) =
          2.0 * (data.first_order[i].col(a).transpose() * g *
                 data.idempotents.col(i))(0, 0);
  Eigen::MatrixXcd etad = deta * data.idempotents;  // eta_{ij} = e_j . eta_i

  SpecialInitialConditions out;
  out.u = data.u;
  out.eta = data.eta;
  out.v = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j)
        out.v(i, j) = -0.5 * (data.u[i] - data.u[j]) * etad(i, j) / data.eta[j];
  return out;
}

// Tensor law for special initial conditions: product index (i,j) = i*dim'' + j,
//   u_{ij} = u'_i + u''_j,  eta_{ij} = eta'_i eta''_j,
//   v_{ij,kl} = delta_{jl} v'_{ik} + delta_{ik} v''_{jl}.
inline SpecialInitialConditions tensor_special_init(
    const SpecialInitialConditions& s1, const SpecialInitialConditions& s2,
    double tol = 1e-10) {
  const int n1 = s1.dim(), n2 = s2.dim(), n = n1 * n2;
  SpecialInitialConditions out;
  out.u.resize(n);
  out.eta.resize(n);
  out.v = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      out.u[i * n2 + j] = s1.u[i] + s2.u[j];
      out.eta[i * n2 + j] = s1.eta[i] * s2.eta[j];
    }
  detail::check_tame(out.u, tol, "tensor_special_init");
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n1; ++k)
        for (int l = 0; l < n2; ++l) {
          Complex v = 0;
          if (j == l) v += s1.v(i, k);
          if (i == k) v += s2.v(j, l);
          out.v(i * n2 + j, k * n2 + l) = v;
        }
  for (int p = 0; p < n; ++p) out.v(p, p) = 0;
  return out;
}

// First-order idempotent expansion of the tensor product from factor frames:
//   e_{ij}(x) = e'_i x e''_j + sum x^{a'a''} (lam''^{a''}_j e'^{a'}_i x e''_j
//                                           + lam'^{a'}_i e'_i x e''^{a''}_j)
// together with the first-order eta expansion and the derivative values
// eta_{ij,kl} = delta_{jl} eta'_{ik} eta''_j + delta_{ik} eta'_i eta''_{jl}.
struct IdempotentExpansion {
  Eigen::MatrixXcd e0;                    // column (i,j): e_{ij} in flat frame
  std::vector<Eigen::MatrixXcd> e1;       // per (i,j): column (a',a'') = first order
  Eigen::MatrixXcd eta1;                  // (i,j) x (a',a''): first-order eta coeff
  Eigen::MatrixXcd eta_deriv;             // (i,j) x (k,l): eta_{ij,kl}
};

inline IdempotentExpansion idempotent_expansion_tensor(
    const FrobeniusModel<Rational>& m1, const SemisimplePointData& d1,
    const FrobeniusModel<Rational>& m2, const SemisimplePointData& d2) {
  const int n1 = d1.dim(), n2 = d2.dim(), n = n1 * n2;
  auto lambda_of = [](const SemisimplePointData& d) {
    auto lu = d.idempotents.fullPivLu();
    if (!lu.isInvertible())
      throw std::invalid_argument("singular idempotent frame (lambda matrix)");
    return Eigen::MatrixXcd(lu.inverse());  // lam(i, a) = lam_i^a
  };
  Eigen::MatrixXcd lam1 = lambda_of(d1), lam2 = lambda_of(d2);

  auto metric_of = [](const FrobeniusModel<Rational>& m) {
    Eigen::MatrixXcd g(m.dim(), m.dim());
    for (int a = 0; a < m.dim(); ++a)
      for (int b = 0; b < m.dim(); ++b) g(a, b) = to_double(m.metric.g[a][b]);
    return g;
  };
  Eigen::MatrixXcd g1 = metric_of(m1), g2 = metric_of(m2);

  auto deta_of = [](const SemisimplePointData& d, const Eigen::MatrixXcd& g) {
    Eigen::MatrixXcd deta(d.dim(), d.dim());
    for (int i = 0; i < d.dim(); ++i)
      for (int a = 0; a < d.dim(); ++a)
        deta(i, a) = 2.0 * (d.first_order[i].col(a).transpose() * g *
                            d.idempotents.col(i))(0, 0);
    return deta;
  };
  Eigen::MatrixXcd deta1 = deta_of(d1, g1), deta2 = deta_of(d2, g2);
  Eigen::MatrixXcd etam1 = deta1 * d1.idempotents;  // eta'_{ik}
  Eigen::MatrixXcd etam2 = deta2 * d2.idempotents;

  auto kron = [&](const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    Eigen::VectorXcd r(a.size() * b.size());
    for (int p = 0; p < a.size(); ++p)
      for (int q = 0; q < b.size(); ++q) r[p * b.size() + q] = a[p] * b[q];
    return r;
  };

  IdempotentExpansion out;
  const int dflat = int(d1.idempotents.rows() * d2.idempotents.rows());
  out.e0.resize(dflat, n);
  out.e1.assign(n, Eigen::MatrixXcd::Zero(dflat, dflat));
  out.eta1.resize(n, dflat);
  out.eta_deriv.resize(n, n);
  const int f2 = int(d2.idempotents.rows());
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      const int ij = i * n2 + j;
      out.e0.col(ij) = kron(d1.idempotents.col(i), d2.idempotents.col(j));
      for (int a1 = 0; a1 < int(d1.idempotents.rows()); ++a1)
        for (int a2 = 0; a2 < f2; ++a2) {
          out.e1[ij].col(a1 * f2 + a2) =
              lam2(j, a2) * kron(d1.first_order[i].col(a1),
                                 d2.idempotents.col(j)) +
              lam1(i, a1) * kron(d1.idempotents.col(i),
                                 d2.first_order[j].col(a2));
          out.eta1(ij, a1 * f2 + a2) =
              lam2(j, a2) * deta1(i, a1) * d2.eta[j] +
              lam1(i, a1) * d1.eta[i] * deta2(j, a2);
        }
      for (int k = 0; k < n1; ++k)
        for (int l = 0; l < n2; ++l) {
          Complex v = 0;
          if (j == l) v += etam1(i, k) * d2.eta[j];
          if (i == k) v += d1.eta[i] * etam2(j, l);
          out.eta_deriv(ij, k * n2 + l) = v;
        }
    }
  return out;
}

// Schlesinger initial matrices A_j = -(V + 1/2 Id) P_j in the idempotent
// frame; only column j is populated and trace A_j = -1/2.
inline std::vector<Eigen::MatrixXcd> schlesinger_matrices(
    const SpecialInitialConditions& s) {
  const int n = s.dim();
  std::vector<Eigen::MatrixXcd> out(n, Eigen::MatrixXcd::Zero(n, n));
  for (int j = 0; j < n; ++j) {
    out[j](j, j) = -0.5;
    for (int k = 0; k < n; ++k)
      if (k != j) out[j](k, j) = -s.v(j, k);
  }
  return out;
}

// Closed-form special initial conditions for a single projective-space
// quantum cohomology factor at the point (x0, x1, 0, ...):
//   u_i = x0 + zeta^i (n+1) exp(x1/(n+1)),
//   eta_i = zeta^i/(n+1) exp(-x1 n/(n+1)),
//   v_ik = -zeta^{i-k} / (1 - zeta^{i-k}),   zeta = exp(2 pi I/(n+1)).
inline SpecialInitialConditions pn_special_init(int n, Complex x0, Complex x1,
                                                double tol = 1e-10) {
  if (n < 1) throw std::invalid_argument("projective factor needs n >= 1");
  const double pi = 3.14159265358979323846;
  Complex zeta = std::exp(Complex(0, 2 * pi / (n + 1)));
  SpecialInitialConditions out;
  out.u.resize(n + 1);
  out.eta.resize(n + 1);
  out.v = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  Complex q = std::exp(x1 / double(n + 1));
  Complex w = std::exp(-x1 * double(n) / double(n + 1)) / double(n + 1);
  for (int i = 0; i <= n; ++i) {
    Complex zi = std::pow(zeta, i);
    out.u[i] = x0 + zi * double(n + 1) * q;
    out.eta[i] = zi * w;
  }
  for (int i = 0; i <= n; ++i)
    for (int k = 0; k <= n; ++k)
      if (i != k) {
        Complex z = std::pow(zeta, ((i - k) % (n + 1) + (n + 1)) % (n + 1));
        out.v(i, k) = -z / (1.0 - z);
      }
  detail::check_tame(out.u, tol, "pn_special_init");
  return out;
}

// Special initial conditions for the product of two projective spaces at
// (x00, x10, x01, 0, ...): the tensor law applied to the factor data, with
// the closed forms
//   u_{ij} = x00 + zeta_n^i (n+1) e^{x10/(n+1)} + zeta_m^j (m+1) e^{x01/(m+1)}
//   eta_{ij} = zeta_n^i zeta_m^j / ((n+1)(m+1)) e^{-x10 n/(n+1) - x01 m/(m+1)}
//   v_{ij,kl} = -( zeta_n^{i-k}/(1-zeta_n^{i-k}) delta_{jl}
//               + zeta_m^{j-l}/(1-zeta_m^{j-l}) delta_{ik} ).
inline SpecialInitialConditions pn_pm_model(int n, int m, Complex x00,
                                            Complex x10, Complex x01,
                                            double tol = 1e-10) {
  SpecialInitialConditions f1 = pn_special_init(n, x00, x10, tol);
  SpecialInitialConditions f2 = pn_special_init(m, 0.0, x01, tol);
  return tensor_special_init(f1, f2, tol);
}

}  // namespace frobten
