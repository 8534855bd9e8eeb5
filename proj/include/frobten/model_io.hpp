#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "frobten/frobenius.hpp"
#include "frobten/report.hpp"

namespace frobten {

using Json = nlohmann::ordered_json;

// Input rejected by the model-file schema; `what()` carries the JSON path of
// the offending element.
struct SchemaError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline const Json& need(const Json& j, const std::string& key,
                        const std::string& path) {
  if (!j.is_object())
    throw SchemaError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "/" + key + ": missing");
  return *it;
}

inline int need_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer())
    throw SchemaError(path + ": expected an integer");
  return j.get<int>();
}

inline Rational need_rational(const Json& j, const std::string& path) {
  if (!j.is_string())
    throw SchemaError(path + ": expected a rational string \"p/q\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

inline std::vector<Rational> rational_row(const Json& j,
                                          const std::string& path, int len) {
  if (!j.is_array() || int(j.size()) != len)
    throw SchemaError(path + ": expected an array of length " +
                      std::to_string(len));
  std::vector<Rational> out;
  for (size_t k = 0; k < j.size(); ++k)
    out.push_back(need_rational(j[k], path + "/" + std::to_string(k)));
  return out;
}

inline std::vector<std::vector<Rational>> rational_matrix(
    const Json& j, const std::string& path, int len) {
  if (!j.is_array() || int(j.size()) != len)
    throw SchemaError(path + ": expected a " + std::to_string(len) + "x" +
                      std::to_string(len) + " matrix");
  std::vector<std::vector<Rational>> out;
  for (size_t k = 0; k < j.size(); ++k)
    out.push_back(rational_row(j[k], path + "/" + std::to_string(k), len));
  return out;
}

}  // namespace detail

inline Json model_to_json(const FrobeniusModel<Rational>& m) {
  Json j;
  j["dimension"] = m.dim();
  j["parity"] = m.basis.parities;
  Json labels = Json::array();
  for (int a = 0; a < m.dim(); ++a) labels.push_back(m.basis.label(a));
  j["labels"] = labels;
  Json metric = Json::array();
  for (auto& row : m.metric.g) {
    Json r = Json::array();
    for (auto& v : row) r.push_back(rational_to_string(v));
    metric.push_back(r);
  }
  j["metric"] = metric;
  j["truncation"] = m.truncation();
  Json corr = Json::object();
  for (int n = 3; n <= m.truncation(); ++n) {
    if (m.correlators.stored(n).empty()) continue;
    Json terms = Json::array();
    for (auto& [key, val] : m.correlators.stored(n)) {
      Json t;
      t["index"] = key;
      t["value"] = rational_to_string(val);
      terms.push_back(t);
    }
    corr[std::to_string(n)] = terms;
  }
  j["correlators"] = corr;
  if (m.identity) j["identity"] = *m.identity;
  if (m.euler) {
    Json e;
    Json d = Json::array();
    for (auto& row : m.euler->d) {
      Json r = Json::array();
      for (auto& v : row) r.push_back(rational_to_string(v));
      d.push_back(r);
    }
    e["d"] = d;
    Json r = Json::array();
    for (auto& v : m.euler->r) r.push_back(rational_to_string(v));
    e["r"] = r;
    e["D"] = rational_to_string(m.euler->D);
    e["d0"] = rational_to_string(m.euler->d0);
    j["euler"] = e;
  }
  return j;
}

inline FrobeniusModel<Rational> model_from_json(const Json& j) {
  using detail::need;
  const int dim = detail::need_int(need(j, "dimension", ""), "/dimension");
  if (dim < 1) throw SchemaError("/dimension: must be positive");

  GradedBasis basis;
  {
    const Json& par = need(j, "parity", "");
    if (!par.is_array() || int(par.size()) != dim)
      throw SchemaError("/parity: expected an array of length " +
                        std::to_string(dim));
    for (size_t k = 0; k < par.size(); ++k) {
      int p = detail::need_int(par[k], "/parity/" + std::to_string(k));
      if (p != 0 && p != 1)
        throw SchemaError("/parity/" + std::to_string(k) + ": must be 0 or 1");
      basis.parities.push_back(p);
    }
    if (j.contains("labels")) {
      const Json& lab = j["labels"];
      if (!lab.is_array() || int(lab.size()) != dim)
        throw SchemaError("/labels: expected an array of length " +
                          std::to_string(dim));
      for (size_t k = 0; k < lab.size(); ++k) {
        if (!lab[k].is_string())
          throw SchemaError("/labels/" + std::to_string(k) +
                            ": expected a string");
        basis.labels.push_back(lab[k].get<std::string>());
      }
    }
  }

  FrobeniusModel<Rational> m;
  m.basis = basis;
  try {
    m.metric = Metric(
        detail::rational_matrix(need(j, "metric", ""), "/metric", dim), basis);
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const SchemaError*>(&e)) throw;
    throw SchemaError(std::string("/metric: ") + e.what());
  }

  const int N = detail::need_int(need(j, "truncation", ""), "/truncation");
  if (N < 3) throw SchemaError("/truncation: must be >= 3");
  m.correlators = CorrelatorFamily<Rational>(basis, N);

  const Json& corr = need(j, "correlators", "");
  if (!corr.is_object()) throw SchemaError("/correlators: expected an object");
  for (auto it = corr.begin(); it != corr.end(); ++it) {
    const std::string path = "/correlators/" + it.key();
    int n = 0;
    try {
      size_t pos = 0;
      n = std::stoi(it.key(), &pos);
      if (pos != it.key().size()) throw std::invalid_argument(it.key());
    } catch (const std::exception&) {
      throw SchemaError(path + ": key must be an arity integer");
    }
    if (n < 3 || n > N)
      throw SchemaError(path + ": arity outside 3.." + std::to_string(N));
    if (!it.value().is_array())
      throw SchemaError(path + ": expected an array of terms");
    for (size_t t = 0; t < it.value().size(); ++t) {
      const std::string tpath = path + "/" + std::to_string(t);
      const Json& term = it.value()[t];
      const Json& idx = need(term, "index", tpath);
      if (!idx.is_array() || int(idx.size()) != n)
        throw SchemaError(tpath + "/index: expected " + std::to_string(n) +
                          " indices");
      std::vector<int> key;
      for (size_t k = 0; k < idx.size(); ++k) {
        int a = detail::need_int(idx[k], tpath + "/index/" + std::to_string(k));
        if (a < 0 || a >= dim)
          throw SchemaError(tpath + "/index/" + std::to_string(k) +
                            ": out of range");
        if (!key.empty() && a < key.back())
          throw SchemaError(tpath + "/index: indices must be sorted");
        key.push_back(a);
      }
      Rational v = detail::need_rational(need(term, "value", tpath),
                                         tpath + "/value");
      try {
        m.correlators.set(key, v);
      } catch (const std::invalid_argument& e) {
        throw SchemaError(tpath + ": " + e.what());
      }
    }
  }

  if (j.contains("identity"))
    m.identity = detail::need_int(j["identity"], "/identity");
  if (j.contains("euler")) {
    const Json& e = j["euler"];
    EulerData ed;
    ed.d = detail::rational_matrix(need(e, "d", "/euler"), "/euler/d", dim);
    ed.r = detail::rational_row(need(e, "r", "/euler"), "/euler/r", dim);
    ed.D = detail::need_rational(need(e, "D", "/euler"), "/euler/D");
    ed.d0 = detail::need_rational(need(e, "d0", "/euler"), "/euler/d0");
    m.euler = ed;
  }
  try {
    validate_model(m);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("/: ") + e.what());
  }
  return m;
}

inline std::string model_to_string(const FrobeniusModel<Rational>& m) {
  return model_to_json(m).dump(2) + "\n";
}

inline FrobeniusModel<Rational> model_from_string(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("JSON parse error: ") + e.what());
  }
  return model_from_json(j);
}

inline void write_model(const std::string& path,
                        const FrobeniusModel<Rational>& m) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << model_to_string(m);
}

inline FrobeniusModel<Rational> read_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return model_from_string(ss.str());
}

inline Json report_to_json(const CheckReport& rep) {
  Json j;
  j["status"] = rep.status();
  Json viol = Json::array();
  for (auto& v : rep.violations) {
    Json t;
    t["location"] = v.location;
    t["lhs"] = v.lhs;
    t["rhs"] = v.rhs;
    viol.push_back(t);
  }
  j["violations"] = viol;
  j["unverifiable"] = rep.unverifiable;
  return j;
}

}  // namespace frobten
