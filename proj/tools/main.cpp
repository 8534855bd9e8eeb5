// frobten command-line frontend: model file I/O and one subcommand per
// pipeline.  Exit codes: 0 = pass (or partial), 1 = mathematical failure,
// 2 = usage or input error.
#include <complex>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "frobten/model_io.hpp"
#include "frobten/rank_one.hpp"
#include "frobten/semisimple.hpp"
#include "frobten/strata.hpp"
#include "frobten/tensor.hpp"

namespace {

using frobten::Json;
using frobten::Rational;

void emit(const Json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream f(out_path);
    if (!f)
      throw std::runtime_error("cannot open '" + out_path + "' for writing");
    f << j.dump(2) << "\n";
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<Rational> parse_rational_list(const std::string& s) {
  std::vector<Rational> out;
  for (auto& item : split(s, ',')) out.push_back(frobten::parse_rational(item));
  return out;
}

// complex literal: "1.5", "-2i", "1.5+2i", "1.5-2i"
std::complex<double> parse_complex(const std::string& s) {
  std::string t = s;
  double re = 0, im = 0;
  if (!t.empty() && t.back() == 'i') {
    t.pop_back();
    size_t cut = t.find_last_of("+-");
    if (cut == std::string::npos || cut == 0) {
      im = t.empty() || t == "+" || t == "-" ? (t == "-" ? -1.0 : 1.0)
                                             : std::stod(t);
    } else {
      re = std::stod(t.substr(0, cut));
      std::string imtxt = t.substr(cut);
      im = imtxt == "+" ? 1.0 : imtxt == "-" ? -1.0 : std::stod(imtxt);
    }
  } else {
    re = std::stod(t);
  }
  return {re, im};
}

Json complex_to_json(std::complex<double> z) {
  Json j;
  j["re"] = z.real();
  j["im"] = z.imag();
  return j;
}

Json vector_to_json(const Eigen::VectorXcd& v) {
  Json j = Json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(complex_to_json(v[i]));
  return j;
}

Json matrix_to_json(const Eigen::MatrixXcd& m) {
  Json j = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    j.push_back(row);
  }
  return j;
}

Json conditions_to_json(const frobten::SpecialInitialConditions& s) {
  Json j;
  j["u"] = vector_to_json(s.u);
  j["eta"] = vector_to_json(s.eta);
  j["v"] = matrix_to_json(s.v);
  Json mats = Json::array();
  for (auto& a : frobten::schlesinger_matrices(s)) mats.push_back(matrix_to_json(a));
  j["schlesinger"] = mats;
  return j;
}

int run(int argc, char** argv) {
  CLI::App app{"Exact computations with formal Frobenius manifolds: WDVV "
               "checks, tensor products via the moduli-space diagonal, "
               "rank-one calculus, base-point shifts, and semisimple initial "
               "conditions."};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  int jobs = 1;
  app.add_option("--jobs", jobs, "Worker threads for internal computations")
      ->check(CLI::PositiveNumber);

  std::string out_path;
  app.add_option("-o,--output", out_path, "Write JSON output to a file")
      ->expected(1);

  // ---- check -------------------------------------------------------------
  auto* c_check = app.add_subcommand("check", "Validate a model file and run "
                                              "the structural checks");
  std::string check_model;
  bool f_wdvv = false, f_coh = false, f_id = false, f_euler = false;
  c_check->add_option("model", check_model, "Model JSON file")->required();
  c_check->add_flag("--wdvv", f_wdvv, "Associativity equations");
  c_check->add_flag("--coherence", f_coh, "Coherence partition identities");
  c_check->add_flag("--identity", f_id, "Flat identity axioms");
  c_check->add_flag("--euler", f_euler,
                    "Conformality, quasi-homogeneity, and skewness");

  // ---- tensor ------------------------------------------------------------
  auto* c_tensor = app.add_subcommand("tensor", "Tensor product of two models");
  std::string tensor_a, tensor_b;
  int tensor_order = 0;
  c_tensor->add_option("a", tensor_a, "First model JSON file")->required();
  c_tensor->add_option("b", tensor_b, "Second model JSON file")->required();
  c_tensor->add_option("--order", tensor_order, "Output truncation order")
      ->required();

  // ---- diagonal ----------------------------------------------------------
  auto* c_diag = app.add_subcommand(
      "diagonal", "Diagonal class of the n-marked genus-zero moduli space");
  int diag_n = 0;
  c_diag->add_option("--n", diag_n, "Number of marked points (3..8)")
      ->required();

  // ---- rank1 -------------------------------------------------------------
  auto* c_rank1 = app.add_subcommand(
      "rank1", "Tensor product of one-dimensional theories");
  std::string rank1_c, rank1_c2;
  c_rank1->add_option("--c", rank1_c,
                      "First coefficient list C3,C4,... (rationals)")
      ->required();
  c_rank1->add_option("--c2", rank1_c2, "Second coefficient list")->required();

  // ---- shift -------------------------------------------------------------
  auto* c_shift = app.add_subcommand("shift", "Base-point shift of a model");
  std::string shift_model, shift_s;
  c_shift->add_option("model", shift_model, "Model JSON file")->required();
  c_shift->add_option("--s", shift_s,
                      "Shift vector as index=value pairs, e.g. \"0=1/2,1=-3\"")
      ->required();

  // ---- semisimple --------------------------------------------------------
  auto* c_semi = app.add_subcommand(
      "semisimple", "Special initial conditions (u, eta, v) at a tame point");
  std::string semi_model, semi_at;
  unsigned semi_seed = 20240501;
  double semi_tol = 1e-10;
  c_semi->add_option("model", semi_model, "Model JSON file")->required();
  c_semi->add_option("--at", semi_at,
                     "Base point, comma-separated complex values "
                     "(e.g. \"0.5,1-2i\")")
      ->required();
  c_semi->add_option("--seed", semi_seed, "Seed for the generic-vector trick");
  c_semi->add_option("--tolerance", semi_tol, "Numeric tolerance");

  // ---- pnpm --------------------------------------------------------------
  auto* c_pnpm = app.add_subcommand(
      "pnpm", "Product of two quantum projective spaces in closed form");
  int pn_n = 0, pn_m = 0;
  double x00 = 0, x10 = 0, x01 = 0;
  double pn_tol = 1e-10;
  c_pnpm->add_option("--n", pn_n, "Dimension of the first factor")->required();
  c_pnpm->add_option("--m", pn_m, "Dimension of the second factor")->required();
  c_pnpm->add_option("--x00", x00, "Identity-direction coordinate");
  c_pnpm->add_option("--x10", x10, "Divisor coordinate of the first factor");
  c_pnpm->add_option("--x01", x01, "Divisor coordinate of the second factor");
  c_pnpm->add_option("--tolerance", pn_tol, "Tameness tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors map to exit code 2
  }
  (void)jobs;  // single-threaded pipelines at present

  if (*c_check) {
    auto m = frobten::read_model(check_model);
    const bool all = !f_wdvv && !f_coh && !f_id && !f_euler;
    frobten::CheckReport rep;
    if (f_wdvv || all) rep.merge(frobten::wdvv_check(m));
    if (f_coh || all) rep.merge(frobten::coherence_check(m));
    if ((f_id || (all && m.identity.has_value())) )
      rep.merge(frobten::flat_identity_check(m));
    if (f_euler || (all && m.euler.has_value())) {
      rep.merge(frobten::conformality_check(m));
      rep.merge(frobten::quasi_homogeneity_check(m));
      rep.merge(frobten::v_skewness_check(m));
    }
    emit(frobten::report_to_json(rep), out_path);
    return rep.pass() ? 0 : 1;
  }

  if (*c_tensor) {
    auto a = frobten::read_model(tensor_a);
    auto b = frobten::read_model(tensor_b);
    auto t = frobten::tensor_model(a, b, tensor_order);
    emit(frobten::model_to_json(t), out_path);
    return 0;
  }

  if (*c_diag) {
    auto& ring = frobten::strata_ring(diag_n, /*allow_expensive=*/true);
    const auto& diag = ring.diagonal();
    Json j;
    j["n"] = diag_n;
    Json betti = Json::array();
    for (int d = 0; d <= ring.top_codim(); ++d)
      betti.push_back(ring.basis(d).size());
    j["betti"] = betti;
    Json terms = Json::array();
    for (auto& [left, right, coeff] : diag.pairs) {
      Json t;
      t["left"] = frobten::tree_to_string(left);
      t["right"] = frobten::tree_to_string(right);
      t["value"] = frobten::rational_to_string(coeff);
      terms.push_back(t);
    }
    j["terms"] = terms;
    emit(j, out_path);
    return 0;
  }

  if (*c_rank1) {
    frobten::RankOneTheory<Rational> t1(parse_rational_list(rank1_c));
    frobten::RankOneTheory<Rational> t2(parse_rational_list(rank1_c2));
    if (t1.N != t2.N)
      throw CLI::ValidationError("--c2", "coefficient lists must have equal length");
    auto t = frobten::tensor_rank1(t1, t2);
    Json j;
    j["truncation"] = t.N;
    Json coeffs = Json::object();
    for (int n = 3; n <= t.N; ++n)
      coeffs[std::to_string(n)] = frobten::rational_to_string(t.coeff(n));
    j["coefficients"] = coeffs;
    emit(j, out_path);
    return 0;
  }

  if (*c_shift) {
    auto m = frobten::read_model(shift_model);
    frobten::FormalShiftVector s;
    std::vector<Rational> svec(m.dim(), Rational(0));
    for (auto& item : split(shift_s, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos)
        throw CLI::ValidationError("--s", "expected index=value pairs");
      int a = std::stoi(item.substr(0, eq));
      if (a < 0 || a >= m.dim())
        throw CLI::ValidationError("--s", "shift index out of range");
      svec[a] = frobten::parse_rational(item.substr(eq + 1));
      s.components[a] = frobten::Polynomial(svec[a]);
    }
    auto shifted = frobten::shift_correlators(m.correlators, s);
    frobten::FrobeniusModel<Rational> out;
    out.basis = m.basis;
    out.metric = m.metric;
    out.correlators = shifted.map_values(
        [](const frobten::Polynomial& p) { return p.constant_term(); });
    out.identity = m.identity;
    if (m.euler) {
      // E = sum d_ab x^a d_b + r^b d_b picks up r'_b = r_b + sum_a s^a d_ab
      frobten::EulerData e = *m.euler;
      for (int b = 0; b < m.dim(); ++b)
        for (int a = 0; a < m.dim(); ++a) e.r[b] += svec[a] * e.d[a][b];
      out.euler = e;
    }
    emit(frobten::model_to_json(out), out_path);
    return 0;
  }

  if (*c_semi) {
    auto m = frobten::read_model(semi_model);
    auto parts = split(semi_at, ',');
    if (int(parts.size()) != m.dim())
      throw CLI::ValidationError("--at", "expected " + std::to_string(m.dim()) +
                                             " coordinates");
    Eigen::VectorXcd x(m.dim());
    for (int i = 0; i < m.dim(); ++i) x[i] = parse_complex(parts[i]);
    frobten::DiagonalizeOptions opt;
    opt.seed = semi_seed;
    opt.tol = semi_tol;
    emit(conditions_to_json(frobten::special_init(m, x, opt)), out_path);
    return 0;
  }

  if (*c_pnpm) {
    emit(conditions_to_json(
             frobten::pn_pm_model(pn_n, pn_m, x00, x10, x01, pn_tol)),
         out_path);
    return 0;
  }

  return 2;  // unreachable: a subcommand is required
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const frobten::SchemaError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const frobten::NonSemisimpleError& e) {
    std::cerr << "not semisimple: " << e.what() << "\n";
    return 1;
  } catch (const frobten::NonTameError& e) {
    std::cerr << "not tame: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
