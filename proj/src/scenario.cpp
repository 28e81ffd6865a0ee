#include "specq/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "specq/quotient.hpp"
#include "specq/spectral.hpp"

namespace specq {

namespace {

struct Issues {
  std::vector<ValidationIssue>* sink;
  void add(std::string pointer, std::string message) {
    sink->push_back({std::move(pointer), std::move(message)});
  }
};

bool finite_number(const Json& j) { return j.is_number() && std::isfinite(j.get<double>()); }

std::optional<double> get_real(const Json& j, const std::string& ptr, Issues& issues,
                               const char* what) {
  if (!finite_number(j)) {
    issues.add(ptr, std::string(what) + " must be a finite number");
    return std::nullopt;
  }
  return j.get<double>();
}

std::optional<Complex> get_complex(const Json& j, const std::string& ptr, Issues& issues) {
  if (finite_number(j)) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && finite_number(j[0]) && finite_number(j[1]))
    return Complex(j[0].get<double>(), j[1].get<double>());
  issues.add(ptr, "expected a number or [re, im] pair of finite numbers");
  return std::nullopt;
}

std::optional<int> get_int(const Json& j, const std::string& ptr, Issues& issues,
                           const char* what) {
  if (!j.is_number_integer()) {
    issues.add(ptr, std::string(what) + " must be an integer");
    return std::nullopt;
  }
  return j.get<int>();
}

std::optional<std::string> get_string(const Json& j, const std::string& ptr, Issues& issues,
                                      const char* what) {
  if (!j.is_string()) {
    issues.add(ptr, std::string(what) + " must be a string");
    return std::nullopt;
  }
  return j.get<std::string>();
}

std::optional<Seminorm> parse_seminorm(const Json& j, int dim, const std::string& ptr,
                                       Issues& issues) {
  if (!j.is_object()) {
    issues.add(ptr, "seminorm must be an object");
    return std::nullopt;
  }
  if (!j.contains("support") || !j["support"].is_array() || j["support"].empty()) {
    issues.add(ptr + "/support", "support must be a nonempty array of coordinate indices");
    return std::nullopt;
  }
  if (!j.contains("weights") || !j["weights"].is_array()) {
    issues.add(ptr + "/weights", "weights must be an array");
    return std::nullopt;
  }
  std::vector<int> support;
  bool bad = false;
  for (std::size_t k = 0; k < j["support"].size(); ++k) {
    auto idx = get_int(j["support"][k], ptr + "/support/" + std::to_string(k), issues,
                       "coordinate index");
    if (!idx) {
      bad = true;
      continue;
    }
    if (*idx < 1 || *idx > dim) {
      issues.add(ptr + "/support/" + std::to_string(k),
                 "coordinate index " + std::to_string(*idx) + " outside 1.." +
                     std::to_string(dim));
      bad = true;
      continue;
    }
    support.push_back(*idx);
  }
  {
    std::vector<int> sorted = support;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      issues.add(ptr + "/support", "support contains duplicate coordinates");
      bad = true;
    }
  }
  if (j["weights"].size() != j["support"].size()) {
    issues.add(ptr + "/weights", "weights and support must have the same length");
    bad = true;
  }
  std::vector<double> weights;
  for (std::size_t k = 0; k < j["weights"].size(); ++k) {
    auto w = get_real(j["weights"][k], ptr + "/weights/" + std::to_string(k), issues, "weight");
    if (!w) {
      bad = true;
      continue;
    }
    if (!(*w > 0.0)) {
      issues.add(ptr + "/weights/" + std::to_string(k), "weight must be positive");
      bad = true;
      continue;
    }
    weights.push_back(*w);
  }
  std::string label;
  if (j.contains("label")) {
    auto s = get_string(j["label"], ptr + "/label", issues, "label");
    if (!s)
      bad = true;
    else
      label = *s;
  }
  if (bad) return std::nullopt;
  try {
    return Seminorm(dim, std::move(support), std::move(weights), std::move(label));
  } catch (const std::exception& e) {
    issues.add(ptr, e.what());
    return std::nullopt;
  }
}

std::optional<Matrix> parse_square_block(const Json& j, int dim, const std::string& ptr,
                                         Issues& issues, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    issues.add(ptr, std::string(what) + " must be a " + std::to_string(dim) + "x" +
                        std::to_string(dim) + " array");
    return std::nullopt;
  }
  Eigen::MatrixXd values(dim, dim);
  for (int r = 0; r < dim; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != dim) {
      issues.add(ptr + "/" + std::to_string(r),
                 "row must contain " + std::to_string(dim) + " numbers");
      return std::nullopt;
    }
    for (int c = 0; c < dim; ++c) {
      auto v = get_real(j[r][c], ptr + "/" + std::to_string(r) + "/" + std::to_string(c), issues,
                        "entry");
      if (!v) return std::nullopt;
      values(r, c) = *v;
    }
  }
  return values.cast<Complex>();
}

std::optional<Operator> parse_operator(const Json& j, int dim, const std::string& ptr,
                                       Issues& issues) {
  auto kind = j.contains("kind") ? get_string(j["kind"], ptr + "/kind", issues, "kind")
                                 : (issues.add(ptr, "operator is missing \"kind\""),
                                    std::optional<std::string>());
  if (!kind) return std::nullopt;

  if (j.contains("dim")) {
    auto d = get_int(j["dim"], ptr + "/dim", issues, "dim");
    if (d && *d != dim) {
      issues.add(ptr + "/dim", "operator dim " + std::to_string(*d) +
                                   " disagrees with space dim " + std::to_string(dim));
      return std::nullopt;
    }
  }

  if (*kind == "dense") {
    if (!j.contains("re")) {
      issues.add(ptr, "dense operator requires \"re\"");
      return std::nullopt;
    }
    auto re = parse_square_block(j["re"], dim, ptr + "/re", issues, "re");
    if (!re) return std::nullopt;
    Matrix m = *re;
    if (j.contains("im")) {
      auto im = parse_square_block(j["im"], dim, ptr + "/im", issues, "im");
      if (!im) return std::nullopt;
      m += Complex(0, 1) * *im;
    }
    return Operator(std::move(m));
  }
  if (*kind == "diagonal") {
    if (!j.contains("entries") || !j["entries"].is_array() ||
        static_cast<int>(j["entries"].size()) != dim) {
      issues.add(ptr + "/entries",
                 "diagonal operator requires " + std::to_string(dim) + " entries");
      return std::nullopt;
    }
    std::vector<Complex> entries;
    for (int k = 0; k < dim; ++k) {
      auto z = get_complex(j["entries"][k], ptr + "/entries/" + std::to_string(k), issues);
      if (!z) return std::nullopt;
      entries.push_back(*z);
    }
    return Operator::diagonal(entries);
  }
  if (*kind == "shift") {
    if (!j.contains("weights") || !j["weights"].is_array() ||
        static_cast<int>(j["weights"].size()) != dim - 1) {
      issues.add(ptr + "/weights",
                 "shift operator requires " + std::to_string(dim - 1) + " weights");
      return std::nullopt;
    }
    std::vector<Complex> weights;
    for (int k = 0; k < dim - 1; ++k) {
      auto z = get_complex(j["weights"][k], ptr + "/weights/" + std::to_string(k), issues);
      if (!z) return std::nullopt;
      weights.push_back(*z);
    }
    return Operator::shift(dim, weights);
  }
  issues.add(ptr + "/kind", "unknown operator kind \"" + *kind + "\"");
  return std::nullopt;
}

const std::set<std::string> kTaskTypes = {"radius",   "spectrum",   "resolvent",    "gelfand",
                                          "classify", "properties", "infimum-study"};

void parse_tolerances(const Json& j, const std::string& ptr, Tolerances& tols, Issues& issues) {
  if (!j.is_object()) {
    issues.add(ptr, "tolerances must be an object");
    return;
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = it.key();
    const std::string kp = ptr + "/" + key;
    if (key == "terms" || key == "max_terms") {
      auto v = get_int(it.value(), kp, issues, key.c_str());
      if (!v) continue;
      if (key == "terms") {
        if (*v < 2)
          issues.add(kp, "terms must be at least 2");
        else
          tols.terms = *v;
      } else {
        if (*v < 1)
          issues.add(kp, "max_terms must be at least 1");
        else
          tols.max_terms = *v;
      }
      continue;
    }
    double* slot = nullptr;
    bool nonneg_ok = false;
    if (key == "spec")
      slot = &tols.spec;
    else if (key == "lin")
      slot = &tols.lin;
    else if (key == "gelfand")
      slot = &tols.gelfand;
    else if (key == "radius")
      slot = &tols.radius;
    else if (key == "neumann")
      slot = &tols.neumann;
    else if (key == "divergence_ceiling")
      slot = &tols.divergence_ceiling;
    else if (key == "lb_floor")
      slot = &tols.lb_floor;
    else if (key == "zero_relax") {
      slot = &tols.zero_relax;
      nonneg_ok = true;
    } else {
      issues.add(kp, "unknown tolerance \"" + key + "\"");
      continue;
    }
    auto v = get_real(it.value(), kp, issues, key.c_str());
    if (!v) continue;
    if (*v < 0.0 || (*v == 0.0 && !nonneg_ok)) {
      issues.add(kp, key + " must be positive");
      continue;
    }
    *slot = *v;
  }
}

}  // namespace

const Calibration* Scenario::find_calibration(const std::string& target) const {
  for (const auto& [label, cal] : calibrations)
    if (label == target) return &cal;
  return nullptr;
}

const Operator* Scenario::find_operator(const std::string& target) const {
  for (const auto& [label, op] : operators)
    if (label == target) return &op;
  return nullptr;
}

ParseResult parse_scenario(const Json& doc) {
  ParseResult result;
  Issues issues{&result.issues};

  if (!doc.is_object()) {
    issues.add("", "scenario must be a JSON object");
    return result;
  }

  Scenario sc;
  sc.name = "scenario";
  if (doc.contains("name")) {
    if (auto s = get_string(doc["name"], "/name", issues, "name")) sc.name = *s;
  }

  if (!doc.contains("space") || !doc["space"].is_object() || !doc["space"].contains("dim")) {
    issues.add("/space", "scenario requires space.dim");
    return result;
  }
  {
    auto d = get_int(doc["space"]["dim"], "/space/dim", issues, "dim");
    if (!d) return result;
    if (*d < 1 || *d > 10000) {
      issues.add("/space/dim", "dim must lie in 1..10000");
      return result;
    }
    sc.dim = *d;
  }

  std::set<std::string> calibration_names;
  if (doc.contains("calibrations")) {
    if (!doc["calibrations"].is_array()) {
      issues.add("/calibrations", "calibrations must be an array");
    } else {
      for (std::size_t i = 0; i < doc["calibrations"].size(); ++i) {
        const Json& cj = doc["calibrations"][i];
        const std::string ptr = "/calibrations/" + std::to_string(i);
        if (!cj.is_object() || !cj.contains("name")) {
          issues.add(ptr, "calibration requires a name");
          continue;
        }
        auto name = get_string(cj["name"], ptr + "/name", issues, "name");
        if (!name) continue;
        if (!calibration_names.insert(*name).second) {
          issues.add(ptr + "/name", "duplicate calibration name \"" + *name + "\"");
          continue;
        }
        if (cj.contains("dim")) {
          auto d = get_int(cj["dim"], ptr + "/dim", issues, "dim");
          if (d && *d != sc.dim) {
            issues.add(ptr + "/dim", "calibration dim " + std::to_string(*d) +
                                         " disagrees with space dim " + std::to_string(sc.dim));
            continue;
          }
        }
        if (!cj.contains("seminorms") || !cj["seminorms"].is_array() || cj["seminorms"].empty()) {
          issues.add(ptr + "/seminorms", "calibration requires a nonempty seminorm list");
          continue;
        }
        std::vector<Seminorm> seminorms;
        bool bad = false;
        for (std::size_t k = 0; k < cj["seminorms"].size(); ++k) {
          auto sn = parse_seminorm(cj["seminorms"][k], sc.dim,
                                   ptr + "/seminorms/" + std::to_string(k), issues);
          if (!sn)
            bad = true;
          else
            seminorms.push_back(std::move(*sn));
        }
        if (bad) continue;
        try {
          sc.calibrations.emplace_back(*name, Calibration(std::move(seminorms), *name));
        } catch (const std::exception& e) {
          issues.add(ptr, e.what());
        }
      }
    }
  }

  std::set<std::string> operator_names;
  if (doc.contains("operators")) {
    if (!doc["operators"].is_array()) {
      issues.add("/operators", "operators must be an array");
    } else {
      for (std::size_t i = 0; i < doc["operators"].size(); ++i) {
        const Json& oj = doc["operators"][i];
        const std::string ptr = "/operators/" + std::to_string(i);
        if (!oj.is_object() || !oj.contains("name")) {
          issues.add(ptr, "operator requires a name");
          continue;
        }
        auto name = get_string(oj["name"], ptr + "/name", issues, "name");
        if (!name) continue;
        if (!operator_names.insert(*name).second) {
          issues.add(ptr + "/name", "duplicate operator name \"" + *name + "\"");
          continue;
        }
        if (auto op = parse_operator(oj, sc.dim, ptr, issues))
          sc.operators.emplace_back(*name, std::move(*op));
      }
    }
  }

  if (doc.contains("tasks")) {
    if (!doc["tasks"].is_array()) {
      issues.add("/tasks", "tasks must be an array");
    } else {
      for (std::size_t i = 0; i < doc["tasks"].size(); ++i) {
        const Json& tj = doc["tasks"][i];
        const std::string ptr = "/tasks/" + std::to_string(i);
        if (!tj.is_object() || !tj.contains("type")) {
          issues.add(ptr, "task requires a type");
          continue;
        }
        auto type = get_string(tj["type"], ptr + "/type", issues, "type");
        if (!type) continue;
        if (!kTaskTypes.count(*type)) {
          issues.add(ptr + "/type", "unknown task type \"" + *type + "\"");
          continue;
        }
        TaskSpec task;
        task.type = *type;

        auto need_name = [&](const char* field, const std::set<std::string>& pool,
                             const char* what) -> std::optional<std::string> {
          if (!tj.contains(field)) {
            issues.add(ptr, std::string("task requires \"") + field + "\"");
            return std::nullopt;
          }
          auto s = get_string(tj[field], ptr + "/" + field, issues, field);
          if (!s) return std::nullopt;
          if (!pool.count(*s)) {
            issues.add(ptr + "/" + field,
                       std::string("unknown ") + what + " \"" + *s + "\"");
            return std::nullopt;
          }
          return s;
        };

        bool bad = false;
        if (auto s = need_name("operator", operator_names, "operator"))
          task.op = *s;
        else
          bad = true;

        if (task.type == "infimum-study") {
          if (!tj.contains("calibrations") || !tj["calibrations"].is_array() ||
              tj["calibrations"].empty()) {
            issues.add(ptr + "/calibrations", "infimum-study requires a nonempty calibration list");
            bad = true;
          } else {
            for (std::size_t k = 0; k < tj["calibrations"].size(); ++k) {
              auto s = get_string(tj["calibrations"][k],
                                  ptr + "/calibrations/" + std::to_string(k), issues,
                                  "calibration name");
              if (!s) {
                bad = true;
                continue;
              }
              if (!calibration_names.count(*s)) {
                issues.add(ptr + "/calibrations/" + std::to_string(k),
                           "unknown calibration \"" + *s + "\"");
                bad = true;
                continue;
              }
              task.calibrations.push_back(*s);
            }
          }
          if (tj.contains("m_values")) {
            if (!tj["m_values"].is_array() || tj["m_values"].empty()) {
              issues.add(ptr + "/m_values", "m_values must be a nonempty array");
              bad = true;
            } else {
              for (std::size_t k = 0; k < tj["m_values"].size(); ++k) {
                auto v = get_real(tj["m_values"][k], ptr + "/m_values/" + std::to_string(k),
                                  issues, "m value");
                if (!v || !(*v > 0.0)) {
                  if (v) issues.add(ptr + "/m_values/" + std::to_string(k), "m value must be positive");
                  bad = true;
                  continue;
                }
                task.m_values.push_back(*v);
              }
            }
          }
        } else {
          if (auto s = need_name("calibration", calibration_names, "calibration"))
            task.calibration = *s;
          else
            bad = true;
        }

        if (task.type == "properties") {
          if (auto s = need_name("second", operator_names, "operator"))
            task.second = *s;
          else
            bad = true;
        }

        if (task.type == "resolvent") {
          if (!tj.contains("lambdas") || !tj["lambdas"].is_array() || tj["lambdas"].empty()) {
            issues.add(ptr + "/lambdas", "resolvent requires a nonempty lambda list");
            bad = true;
          } else {
            for (std::size_t k = 0; k < tj["lambdas"].size(); ++k) {
              auto z = get_complex(tj["lambdas"][k], ptr + "/lambdas/" + std::to_string(k),
                                   issues);
              if (!z) {
                bad = true;
                continue;
              }
              if (*z == Complex(0.0, 0.0)) {
                issues.add(ptr + "/lambdas/" + std::to_string(k), "lambda must be nonzero");
                bad = true;
                continue;
              }
              task.lambdas.push_back(*z);
            }
          }
        }

        if ((task.type == "radius" || task.type == "gelfand") && tj.contains("terms")) {
          auto v = get_int(tj["terms"], ptr + "/terms", issues, "terms");
          if (!v || *v < 2) {
            if (v) issues.add(ptr + "/terms", "terms must be at least 2");
            bad = true;
          } else {
            task.terms = *v;
          }
        }

        if (!bad) sc.tasks.push_back(std::move(task));
      }
    }
  }

  sc.tolerance_overrides = Json::object();
  if (doc.contains("tolerances")) {
    sc.tolerance_overrides = doc["tolerances"];
    parse_tolerances(doc["tolerances"], "/tolerances", sc.tolerances, issues);
  }

  if (result.issues.empty()) result.scenario = std::move(sc);
  return result;
}

ParseResult load_scenario(const std::string& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) {
    ParseResult result;
    result.issues.push_back({"", "cannot open scenario file: " + path});
    return result;
  }
  std::stringstream buffer;
  buffer << stream.rdbuf();
  Json doc;
  try {
    doc = Json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    ParseResult result;
    result.issues.push_back({"", e.what()});
    return result;
  }
  return parse_scenario(doc);
}

// ============================================================================
// Generation
// ============================================================================

namespace {

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  // Manual mappings: the distributions in <random> are not pinned across
  // standard library versions, and generated files must be byte-stable.
  double uniform() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int index(int n) { return static_cast<int>(gen() % static_cast<std::uint64_t>(n)); }
};

Json seminorm_json(const std::vector<int>& support, const std::vector<double>& weights,
                   const std::string& label) {
  Json j{{"support", support}, {"weights", weights}};
  if (!label.empty()) j["label"] = label;
  return j;
}

/// Nested prefix supports 1..k for up to `count` cut points, always including
/// the full space; unit weights unless a generator supplies its own.
Json nested_calibration_json(const std::string& name, int n, int count, Rng* rng) {
  std::vector<int> cuts;
  count = std::min(count, n);
  for (int j = 1; j <= count; ++j) {
    int k = (n * j + count - 1) / count;  // last cut is exactly n
    if (cuts.empty() || k > cuts.back()) cuts.push_back(k);
  }
  Json list = Json::array();
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    std::vector<int> support;
    std::vector<double> weights;
    for (int i = 1; i <= cuts[c]; ++i) {
      support.push_back(i);
      weights.push_back(rng ? rng->uniform(0.8, 1.25) : 1.0);
    }
    list.push_back(seminorm_json(support, weights, "p" + std::to_string(c + 1)));
  }
  return Json{{"name", name}, {"seminorms", list}};
}

Json dense_operator_json(const std::string& name, const Matrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  bool has_im = false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json rrow = Json::array();
    Json irow = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rrow.push_back(m(i, j).real());
      irow.push_back(m(i, j).imag());
      if (m(i, j).imag() != 0.0) has_im = true;
    }
    re.push_back(rrow);
    im.push_back(irow);
  }
  Json j{{"name", name}, {"kind", "dense"}, {"re", re}};
  if (has_im) j["im"] = im;
  return j;
}

/// Lower-triangular operator whose diagonal moduli ascend along a geometric
/// ladder; the subdiagonal couples neighbours at a tenth of the local modulus
/// and a sparse scattering of deeper entries stays two orders below that.
/// Keeps quotient spectra well separated and power sequences tame.
Matrix ladder_matrix(int n, Rng& rng, double extra_prob) {
  double r_max = rng.uniform(1.0, 3.0);
  double ratio = rng.uniform(0.75, 0.9);
  Matrix m = Matrix::Zero(n, n);
  std::vector<double> moduli(n);
  for (int i = 0; i < n; ++i) {
    moduli[i] = r_max * std::pow(ratio, n - 1 - i);
    double phi = rng.uniform(0.0, 2.0 * M_PI);
    m(i, i) = moduli[i] * Complex(std::cos(phi), std::sin(phi));
  }
  for (int i = 0; i + 1 < n; ++i) {
    double phi = rng.uniform(0.0, 2.0 * M_PI);
    m(i + 1, i) = 0.1 * moduli[i + 1] * rng.uniform(0.5, 1.0) *
                  Complex(std::cos(phi), std::sin(phi));
  }
  for (int i = 2; i < n; ++i) {
    if (rng.uniform() >= extra_prob) continue;
    int j = rng.index(i - 1);
    double phi = rng.uniform(0.0, 2.0 * M_PI);
    m(i, j) = 0.02 * moduli[i] * rng.uniform(0.5, 1.0) *
              Complex(std::cos(phi), std::sin(phi));
  }
  return m;
}

double max_modulus(const Matrix& m) {
  double peak = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) peak = std::max(peak, std::abs(m(i, i)));
  return peak;
}

Json task_refs(const char* type, const std::string& op, const std::string& cal) {
  return Json{{"type", type}, {"operator", op}, {"calibration", cal}};
}

}  // namespace

Json generate_scenario(const std::string& kind, int n, std::uint64_t seed) {
  if (n < 1 || n > 500)
    throw std::invalid_argument("generate: n must lie in 1..500");
  static const std::set<std::string> kinds = {"triangular-nested", "diagonal", "shift",
                                             "random-invariant"};
  if (!kinds.count(kind)) throw std::invalid_argument("generate: unsupported kind \"" + kind + "\"");

  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  Json doc;
  doc["name"] = kind + "-n" + std::to_string(n) + "-s" + std::to_string(seed);
  doc["space"] = Json{{"dim", n}};

  if (kind == "diagonal") {
    std::vector<Complex> entries;
    for (int i = 0; i < n; ++i) {
      double r = rng.uniform(0.3, 3.0);
      double phi = rng.uniform(0.0, 2.0 * M_PI);
      entries.emplace_back(r * std::cos(phi), r * std::sin(phi));
    }
    Json list = Json::array();
    for (const Complex& z : entries) list.push_back(Json::array({z.real(), z.imag()}));
    Json sn = Json::array();
    for (int i = 1; i <= n; ++i)
      sn.push_back(seminorm_json({i}, {1.0}, "p" + std::to_string(i)));
    doc["calibrations"] =
        Json::array({Json{{"name", "singletons"}, {"seminorms", sn}}});
    doc["operators"] = Json::array(
        {Json{{"name", "D"}, {"kind", "diagonal"}, {"entries", list}}});
    doc["tasks"] = Json::array({task_refs("classify", "D", "singletons"),
                                task_refs("spectrum", "D", "singletons"),
                                task_refs("radius", "D", "singletons")});
    return doc;
  }

  if (kind == "shift") {
    Json weights = Json::array();
    for (int i = 0; i + 1 < n; ++i) weights.push_back(rng.uniform(0.5, 2.0));
    doc["calibrations"] =
        Json::array({nested_calibration_json("nested", n, 6, nullptr)});
    doc["operators"] =
        Json::array({Json{{"name", "S"}, {"kind", "shift"}, {"weights", weights}}});
    Json gelfand = task_refs("gelfand", "S", "nested");
    gelfand["terms"] = std::max(4, 2 * n);
    Json resolvent = task_refs("resolvent", "S", "nested");
    resolvent["lambdas"] = Json::array({1.0});
    doc["tasks"] = Json::array({task_refs("classify", "S", "nested"), gelfand, resolvent,
                                task_refs("radius", "S", "nested")});
    return doc;
  }

  const bool rich = kind == "triangular-nested";
  Matrix m = ladder_matrix(n, rng, rich ? 0.4 : 0.3);
  const std::string cal_name = "nested";
  doc["calibrations"] =
      Json::array({nested_calibration_json(cal_name, n, 6, rich ? nullptr : &rng)});
  doc["operators"] = Json::array({dense_operator_json("T", m)});

  Json tasks = Json::array({task_refs("classify", "T", cal_name),
                            task_refs("radius", "T", cal_name),
                            task_refs("spectrum", "T", cal_name)});
  if (!rich) {
    Json resolvent = task_refs("resolvent", "T", cal_name);
    resolvent["lambdas"] = Json::array({1.5 * max_modulus(m)});
    tasks.push_back(resolvent);
  }
  doc["tasks"] = tasks;
  return doc;
}

// ============================================================================
// Running
// ============================================================================

namespace {

std::string task_filename(int index, const std::string& type, const char* suffix) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03d_", index);
  std::string name = buf;
  for (char c : type) name += c == '-' ? '_' : c;
  name += suffix;
  return name;
}

Json task_echo(const TaskSpec& task, int index) {
  Json j{{"index", index}, {"type", task.type}, {"operator", task.op}};
  if (!task.calibration.empty()) j["calibration"] = task.calibration;
  if (!task.second.empty()) j["second"] = task.second;
  if (!task.calibrations.empty()) j["calibrations"] = task.calibrations;
  if (!task.lambdas.empty()) {
    Json lambdas = Json::array();
    for (const Complex& z : task.lambdas) lambdas.push_back(json_complex(z));
    j["lambdas"] = lambdas;
  }
  if (!task.m_values.empty()) j["m_values"] = task.m_values;
  if (task.terms > 0) j["terms"] = task.terms;
  return j;
}

}  // namespace

RunResult run_scenario(const Scenario& scenario, const std::string& out_dir,
                       const RunOptions& options) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  Tolerances tols = scenario.tolerances;
  Json cli = Json::object();
  if (options.tol_radius) {
    tols.radius = *options.tol_radius;
    cli["radius"] = *options.tol_radius;
  }
  if (options.tol_neumann) {
    tols.neumann = *options.tol_neumann;
    cli["neumann"] = *options.tol_neumann;
  }
  if (options.zero_relax) {
    tols.zero_relax = *options.zero_relax;
    cli["zero_relax"] = *options.zero_relax;
  }
  if (options.max_terms) {
    tols.max_terms = *options.max_terms;
    cli["max_terms"] = *options.max_terms;
  }

  RunResult result;
  for (std::size_t i = 0; i < scenario.tasks.size(); ++i) {
    const TaskSpec& task = scenario.tasks[i];
    const int index = static_cast<int>(i) + 1;
    TaskOutcome outcome;
    outcome.index = index;
    outcome.type = task.type;

    Json report;
    report["schema"] = "specq-report-v1";
    report["scenario"] = scenario.name;
    report["task"] = task_echo(task, index);
    report["tolerances"] = json_tolerances(tols);
    report["overrides"] = Json{{"scenario", scenario.tolerance_overrides}, {"cli", cli}};

    std::vector<std::pair<std::string, std::string>> extra_files;  // name -> contents
    try {
      const Operator& op = *scenario.find_operator(task.op);
      if (task.type == "radius") {
        const Calibration& cal = *scenario.find_calibration(task.calibration);
        int terms = task.terms > 0 ? task.terms : tols.terms;
        RadiusReport radius = p_spectral_radius(op, cal, terms, tols);
        report["report"] = json_radius_report(radius);
        extra_files.emplace_back(task_filename(index, task.type, "_traces.csv"),
                                 traces_csv(radius.traces));
        outcome.ok = radius.estimate >= radius.oracle - tols.radius;
        if (cal.size() == 1)
          outcome.ok = outcome.ok &&
                       radius.estimate <= p_hat(op, cal[0], tols.zero_relax) + tols.radius;
      } else if (task.type == "spectrum") {
        const Calibration& cal = *scenario.find_calibration(task.calibration);
        SpectralSet set = spectral_set(op, cal, tols);
        report["report"] = json_spectral_set(set);
        extra_files.emplace_back(task_filename(index, task.type, "_points.csv"),
                                 spectral_csv(set));
      } else if (task.type == "resolvent") {
        const Calibration& cal = *scenario.find_calibration(task.calibration);
        Json results = Json::array();
        for (const Complex& lambda : task.lambdas) {
          ResolventResult res = neumann_resolvent(op, lambda, cal, tols);
          results.push_back(json_resolvent_result(res));
          if (res.status == SeriesStatus::max_terms) outcome.ok = false;
          if (res.status == SeriesStatus::converged && std::isfinite(res.cond_factor) &&
              res.direct_gap > tols.neumann * res.cond_factor)
            outcome.ok = false;
        }
        report["report"] = Json{{"results", results}};
      } else if (task.type == "gelfand") {
        const Calibration& cal = *scenario.find_calibration(task.calibration);
        int terms = task.terms > 0 ? task.terms : tols.terms;
        std::vector<GelfandTrace> traces = gelfand_traces(op, cal, terms, tols);
        Json list = Json::array();
        for (const GelfandTrace& trace : traces) {
          list.push_back(json_trace_summary(trace));
          for (std::size_t k = 1; k < trace.running_inf.size(); ++k)
            if (trace.running_inf[k] > trace.running_inf[k - 1]) outcome.ok = false;
          for (double a : trace.terms)
            if (trace.limit > a + 1e-12 * std::max(1.0, a)) outcome.ok = false;
        }
        report["report"] = Json{{"traces", list}};
        extra_files.emplace_back(task_filename(index, task.type, "_traces.csv"),
                                 traces_csv(traces));
      } else if (task.type == "classify") {
        const Calibration& cal = *scenario.find_calibration(task.calibration);
        BoundednessReport cls = classify(op, cal, tols.zero_relax);
        report["report"] = json_boundedness_report(cls);
        outcome.ok = (!cls.universally_bounded || cls.quotient_bounded) &&
                     (cls.locally_bounded == cls.witness.has_value());
      } else if (task.type == "properties") {
        const Calibration& cal = *scenario.find_calibration(task.calibration);
        const Operator& second = *scenario.find_operator(task.second);
        ArithmeticReport suite = radius_arithmetic_suite(op, second, cal, tols);
        report["report"] = json_arithmetic_report(suite);
        outcome.ok = suite.all_pass;
      } else {  // infimum-study
        std::vector<Calibration> cals;
        for (const std::string& name : task.calibrations)
          cals.push_back(*scenario.find_calibration(name));
        std::vector<double> m_values =
            task.m_values.empty() ? std::vector<double>{1.0, 2.0, 4.0} : task.m_values;
        InfimumStudy study = calibration_infimum_study(op, cals, tols, m_values);
        report["report"] = json_infimum_study(study);
        outcome.ok = study.ok;
      }
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.error = e.what();
      report["error"] = e.what();
    }

    report["ok"] = outcome.ok;
    const std::string report_name = task_filename(index, task.type, ".json");
    write_text_file((fs::path(out_dir) / report_name).string(), report.dump(2) + "\n");
    outcome.files.push_back(report_name);
    for (const auto& [name, contents] : extra_files) {
      write_text_file((fs::path(out_dir) / name).string(), contents);
      outcome.files.push_back(name);
    }
    result.outcomes.push_back(std::move(outcome));
  }

  for (const TaskOutcome& outcome : result.outcomes)
    if (!outcome.ok) result.exit_code = 1;

  Json summary;
  summary["schema"] = "specq-summary-v1";
  summary["scenario"] = scenario.name;
  summary["exit_code"] = result.exit_code;
  Json tasks = Json::array();
  for (const TaskOutcome& outcome : result.outcomes) {
    Json t{{"index", outcome.index}, {"type", outcome.type}, {"ok", outcome.ok},
           {"files", outcome.files}};
    if (!outcome.error.empty()) t["error"] = outcome.error;
    tasks.push_back(t);
  }
  summary["tasks"] = tasks;
  write_text_file((fs::path(out_dir) / "summary.json").string(), summary.dump(2) + "\n");
  return result;
}

}  // namespace specq
