#include "bosde/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <toml.hpp>

#include "bosde/diffusion.hpp"

namespace bosde {

namespace {

const std::vector<std::string> kModeNames = {"meanfield",  "sde",       "lindblad", "randomwalk",
                                             "verify",     "dnse-demo", "beta-check"};

const std::vector<std::string> kTopKeys = {"mode", "system", "sde", "observables", "output"};
const std::vector<std::string> kSystemKeys = {"kind", "N", "n", "c", "epsilon", "H0", "tensor", "Xs", "z0"};
const std::vector<std::string> kSdeKeys = {"dt", "t_final", "samples", "seed", "renormalize",
                                           "snapshot_times"};
const std::vector<std::string> kObservableKeys = {"populations", "one_body"};
const std::vector<std::string> kOutputKeys = {"path"};

std::string with_suggestion(std::string_view key, const std::vector<std::string>& options) {
  std::string msg = "unknown key \"" + std::string(key) + "\"";
  if (auto near = closest_match(key, options)) msg += " (did you mean \"" + *near + "\"?)";
  return msg;
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what,
                         const toml::source_region& where) const {
    const long line = static_cast<long>(where.begin.line);
    const long column = static_cast<long>(where.begin.column);
    std::ostringstream os;
    os << source_;
    if (line > 0) os << ':' << line << ':' << column;
    os << ": " << field << ": " << what;
    throw ConfigError(os.str(), field, line, column);
  }

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    fail(field, what, toml::source_region{});
  }

  void check_keys(const toml::table& tbl, const std::string& prefix,
                  const std::vector<std::string>& allowed) const {
    for (auto&& [key, node] : tbl) {
      const std::string name(key.str());
      if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
        fail(prefix.empty() ? name : prefix + "." + name, with_suggestion(name, allowed), key.source());
    }
  }

  const toml::table& section(const toml::table& root, const std::string& name, bool required) const {
    const toml::node* node = root.get(name);
    if (!node) {
      if (required) fail(name, "missing section [" + name + "]");
      return empty_;
    }
    if (!node->is_table()) fail(name, "expected a [" + name + "] section", node->source());
    return *node->as_table();
  }

  double real(const toml::node& node, const std::string& field) const {
    if (auto v = node.as_floating_point()) return v->get();
    if (auto v = node.as_integer()) return static_cast<double>(v->get());
    fail(field, "expected a number", node.source());
  }

  long integer(const toml::node& node, const std::string& field) const {
    if (auto v = node.as_integer()) return static_cast<long>(v->get());
    fail(field, "expected an integer", node.source());
  }

  bool boolean(const toml::node& node, const std::string& field) const {
    if (auto v = node.as_boolean()) return v->get();
    fail(field, "expected true or false", node.source());
  }

  std::string string(const toml::node& node, const std::string& field) const {
    if (auto v = node.as_string()) return v->get();
    fail(field, "expected a string", node.source());
  }

  cplx complex(const toml::node& node, const std::string& field) const {
    if (auto v = node.as_string()) {
      try {
        return parse_complex(v->get());
      } catch (const ValidationError& e) {
        fail(field, e.what(), node.source());
      }
    }
    return {real(node, field), 0.0};
  }

  const toml::array& array(const toml::node& node, const std::string& field) const {
    if (auto v = node.as_array()) return *v;
    fail(field, "expected an array", node.source());
  }

  ModeVector complex_vector(const toml::node& node, const std::string& field) const {
    const toml::array& arr = array(node, field);
    ModeVector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i)
      v(static_cast<Eigen::Index>(i)) = complex(arr[i], field + "[" + std::to_string(i) + "]");
    return v;
  }

  ComplexMatrix<double> complex_matrix(const toml::node& node, const std::string& field,
                                       Eigen::Index N) const {
    const toml::array& rows = array(node, field);
    if (static_cast<Eigen::Index>(rows.size()) != N)
      fail(field, "expected " + std::to_string(N) + " rows, got " + std::to_string(rows.size()),
           node.source());
    ComplexMatrix<double> m(N, N);
    for (Eigen::Index j = 0; j < N; ++j) {
      const std::string row_field = field + "[" + std::to_string(j) + "]";
      const ModeVector row = complex_vector(rows[static_cast<std::size_t>(j)], row_field);
      if (row.size() != N)
        fail(row_field, "expected " + std::to_string(N) + " entries, got " + std::to_string(row.size()),
             rows[static_cast<std::size_t>(j)].source());
      m.row(j) = row.transpose();
    }
    return m;
  }

  // Hermiticity with the error located at the matrix.
  void hermitian(const ComplexMatrix<double>& m, const std::string& field, const toml::node& node) const {
    if (!is_hermitian(m, kHermitianTol))
      fail(field, "matrix is not Hermitian (max |M - M^dag| = " +
                      std::to_string(hermitian_defect(m)) + ")",
           node.source());
  }

 private:
  std::string source_;
  toml::table empty_;
};

void parse_system(const Reader& rd, const toml::table& sys, RunConfig& cfg) {
  rd.check_keys(sys, "system", kSystemKeys);
  auto need = [&](const char* key) -> const toml::node& {
    const toml::node* node = sys.get(key);
    if (!node) rd.fail(std::string("system.") + key, "missing required key");
    return *node;
  };

  cfg.system_kind = rd.string(need("kind"), "system.kind");
  if (cfg.system_kind != "dnse" && cfg.system_kind != "general")
    rd.fail("system.kind", "expected \"dnse\" or \"general\"", need("kind").source());
  const bool is_dnse = cfg.system_kind == "dnse";

  const long N = rd.integer(need("N"), "system.N");
  if (N < 1) rd.fail("system.N", "need at least one mode", need("N").source());
  const long n = rd.integer(need("n"), "system.n");
  if (n < 1) rd.fail("system.n", "boson count must be positive", need("n").source());

  // H0: "ring", "zero" or an N x N matrix
  const toml::node& h0_node = need("H0");
  ComplexMatrix<double> H0;
  if (h0_node.is_string()) {
    const std::string name = rd.string(h0_node, "system.H0");
    if (name == "ring") {
      H0 = dnse::ring_hopping(static_cast<int>(N));
    } else if (name == "zero") {
      H0 = ComplexMatrix<double>::Zero(N, N);
    } else {
      rd.fail("system.H0", "expected \"ring\", \"zero\" or a matrix", h0_node.source());
    }
  } else {
    H0 = rd.complex_matrix(h0_node, "system.H0", N);
    rd.hermitian(H0, "system.H0", h0_node);
  }

  const toml::node* z0_node = sys.get("z0");
  if (!z0_node) rd.fail("system.z0", "missing required key");
  ModeVector z0 = rd.complex_vector(*z0_node, "system.z0");
  if (z0.size() != N)
    rd.fail("system.z0", "expected " + std::to_string(N) + " entries, got " + std::to_string(z0.size()),
            z0_node->source());
  const double norm = z0.norm();
  if (!(norm > 0) || !std::isfinite(norm)) rd.fail("system.z0", "must be a nonzero finite vector", z0_node->source());
  cfg.z0 = z0 / norm;

  if (is_dnse) {
    for (const char* key : {"tensor", "Xs"}) {
      if (const toml::node* node = sys.get(key))
        rd.fail(std::string("system.") + key, "not allowed when kind = \"dnse\"", node->source());
    }
    const toml::node* c_node = sys.get("c");
    const toml::node* eps_node = sys.get("epsilon");
    if (!c_node && !eps_node) rd.fail("system.c", "kind = \"dnse\" needs either c or epsilon");
    if (c_node && eps_node) rd.fail("system.epsilon", "give c or epsilon, not both", eps_node->source());
    dnse::DnseParams p;
    p.N = static_cast<int>(N);
    p.n = static_cast<int>(n);
    p.H0 = H0;
    p.t_final = cfg.sde.t_final;
    if (eps_node) {
      p.epsilon = rd.real(*eps_node, "system.epsilon");
      if (!(p.epsilon > 0)) rd.fail("system.epsilon", "must be > 0", eps_node->source());
      p.c = dnse::c_for_error(p.t_final, p.epsilon);
    } else {
      p.c = rd.real(*c_node, "system.c");
      if (!(p.c >= 0)) rd.fail("system.c", "must be >= 0", c_node->source());
      p.epsilon = p.c > 0 ? dnse::trace_error_bound(p.t_final, p.c) : std::numeric_limits<double>::infinity();
    }
    cfg.dnse = p;
    cfg.system = dnse::build_dnse_spec(p);
    return;
  }

  for (const char* key : {"c", "epsilon"}) {
    if (const toml::node* node = sys.get(key))
      rd.fail(std::string("system.") + key, "only allowed when kind = \"dnse\"", node->source());
  }
  SystemSpec spec;
  spec.H0 = H0;
  spec.n = static_cast<int>(n);

  // tensor: "zero", "kronecker" or a list of [j, k, l, m, value]
  const toml::node& t_node = need("tensor");
  if (t_node.is_string()) {
    const std::string name = rd.string(t_node, "system.tensor");
    if (name == "zero") {
      spec.tensor = InteractionTensor(N);
    } else if (name == "kronecker") {
      spec.tensor = InteractionTensor::kronecker(N);
    } else {
      rd.fail("system.tensor", "expected \"zero\", \"kronecker\" or a list of entries", t_node.source());
    }
  } else {
    spec.tensor = InteractionTensor(N);
    const toml::array& entries = rd.array(t_node, "system.tensor");
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const std::string field = "system.tensor[" + std::to_string(e) + "]";
      const toml::array& entry = rd.array(entries[e], field);
      if (entry.size() != 5) rd.fail(field, "expected [j, k, l, m, value]", entries[e].source());
      Eigen::Index idx[4];
      for (int q = 0; q < 4; ++q) {
        const long v = rd.integer(entry[static_cast<std::size_t>(q)], field);
        if (v < 0 || v >= N) rd.fail(field, "index out of range", entry[static_cast<std::size_t>(q)].source());
        idx[q] = v;
      }
      spec.tensor(idx[0], idx[1], idx[2], idx[3]) += rd.complex(entry[4], field);
    }
  }

  // Xs: "pauli" (N = 2), "none" or a list of N x N matrices
  const toml::node& x_node = need("Xs");
  if (x_node.is_string()) {
    const std::string name = rd.string(x_node, "system.Xs");
    if (name == "pauli") {
      if (N != 2) rd.fail("system.Xs", "\"pauli\" needs N = 2", x_node.source());
      for (const auto& p : pauli_matrices()) spec.Xs.push_back(p);
    } else if (name != "none") {
      rd.fail("system.Xs", "expected \"pauli\", \"none\" or a list of matrices", x_node.source());
    }
  } else {
    const toml::array& list = rd.array(x_node, "system.Xs");
    for (std::size_t m = 0; m < list.size(); ++m) {
      const std::string field = "system.Xs[" + std::to_string(m) + "]";
      ComplexMatrix<double> x = rd.complex_matrix(list[m], field, N);
      rd.hermitian(x, field, list[m]);
      spec.Xs.push_back(std::move(x));
    }
  }
  cfg.system = std::move(spec);
}

void parse_sde(const Reader& rd, const toml::table& sde, RunConfig& cfg) {
  rd.check_keys(sde, "sde", kSdeKeys);
  auto need = [&](const char* key) -> const toml::node& {
    const toml::node* node = sde.get(key);
    if (!node) rd.fail(std::string("sde.") + key, "missing required key");
    return *node;
  };
  SdeConfig& s = cfg.sde;
  s.dt = rd.real(need("dt"), "sde.dt");
  if (!(s.dt > 0)) rd.fail("sde.dt", "must be > 0", need("dt").source());
  s.t_final = rd.real(need("t_final"), "sde.t_final");
  if (!(s.t_final > 0)) rd.fail("sde.t_final", "must be > 0", need("t_final").source());
  if (s.dt > s.t_final) rd.fail("sde.dt", "must not exceed sde.t_final", need("dt").source());
  const long samples = rd.integer(need("samples"), "sde.samples");
  if (samples < 1 || samples > 100000000)
    rd.fail("sde.samples", "must be in [1, 1e8]", need("samples").source());
  s.samples = static_cast<int>(samples);
  if (const toml::node* node = sde.get("seed")) {
    const long seed = rd.integer(*node, "sde.seed");
    if (seed < 0) rd.fail("sde.seed", "must be >= 0", node->source());
    s.seed = static_cast<std::uint64_t>(seed);
    cfg.seed_given = true;
  }
  s.renormalize = true;
  if (const toml::node* node = sde.get("renormalize")) s.renormalize = rd.boolean(*node, "sde.renormalize");
  s.snapshot_times.clear();
  if (const toml::node* node = sde.get("snapshot_times")) {
    const toml::array& arr = rd.array(*node, "sde.snapshot_times");
    if (arr.empty()) rd.fail("sde.snapshot_times", "must not be empty", node->source());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string field = "sde.snapshot_times[" + std::to_string(i) + "]";
      const double t = rd.real(arr[i], field);
      if (t < 0 || t > s.t_final * (1 + 1e-12)) rd.fail(field, "outside [0, t_final]", arr[i].source());
      if (!s.snapshot_times.empty() && t < s.snapshot_times.back())
        rd.fail(field, "snapshot times must be sorted", arr[i].source());
      s.snapshot_times.push_back(t);
    }
  } else {
    for (int k = 1; k <= 10; ++k) s.snapshot_times.push_back(s.t_final * k / 10.0);
  }
}

void parse_observables(const Reader& rd, const toml::table& obs, RunConfig& cfg) {
  rd.check_keys(obs, "observables", kObservableKeys);
  const Eigen::Index N = cfg.system.modes();
  if (const toml::node* node = obs.get("populations")) {
    const toml::array& arr = rd.array(*node, "observables.populations");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string field = "observables.populations[" + std::to_string(i) + "]";
      const long j = rd.integer(arr[i], field);
      if (j < 0 || j >= N) rd.fail(field, "mode index out of range", arr[i].source());
      cfg.observables.push_back({"pop" + std::to_string(j), population(static_cast<int>(j), static_cast<int>(N))});
    }
  }
  if (const toml::node* node = obs.get("one_body")) {
    const toml::array& list = rd.array(*node, "observables.one_body");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string field = "observables.one_body[" + std::to_string(i) + "]";
      OneBodyObservable o;
      o.O = rd.complex_matrix(list[i], field, N);
      rd.hermitian(o.O, field, list[i]);
      cfg.observables.push_back({"obs" + std::to_string(i), std::move(o)});
    }
  }
}

}  // namespace

ConfigError::ConfigError(const std::string& message, std::string field, long line, long column)
    : ValidationError(message), field_(std::move(field)), line_(line), column_(column) {}

std::string_view mode_name(Mode mode) { return kModeNames[static_cast<std::size_t>(mode)]; }

const std::vector<std::string>& mode_names() { return kModeNames; }

Mode parse_mode(std::string_view name) {
  for (std::size_t i = 0; i < kModeNames.size(); ++i)
    if (kModeNames[i] == name) return static_cast<Mode>(i);
  std::string msg = "unknown mode \"" + std::string(name) + "\"";
  if (auto near = closest_match(name, kModeNames)) msg += " (did you mean \"" + *near + "\"?)";
  throw ValidationError(msg);
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::optional<std::string> closest_match(std::string_view key, const std::vector<std::string>& options) {
  std::optional<std::string> best;
  std::size_t best_d = std::max<std::size_t>(2, key.size() / 3) + 1;
  for (const auto& opt : options) {
    const std::size_t d = edit_distance(key, opt);
    if (d < best_d) {
      best_d = d;
      best = opt;
    }
  }
  return best;
}

cplx parse_complex(std::string_view text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  auto number = [&](std::string_view part) {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    std::string_view body = part;
    if (body.front() == '+') body.remove_prefix(1);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec != std::errc() || ptr != body.data() + body.size())
      throw ValidationError("cannot read \"" + std::string(text) + "\" as a complex number");
    return v;
  };
  if (s.empty()) throw ValidationError("empty complex number");
  if (s.back() != 'i') return {number(s), 0.0};
  s.pop_back();
  // split at the last sign that is not an exponent sign
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, number(s)};
  return {number(std::string_view(s).substr(0, split)), number(std::string_view(s).substr(split))};
}

RunConfig parse_config(std::string_view text, std::string_view source_name) {
  const Reader rd{std::string(source_name)};
  toml::table root;
  try {
    root = toml::parse(text, source_name);
  } catch (const toml::parse_error& e) {
    rd.fail("syntax", std::string(e.description()), e.source());
  }
  rd.check_keys(root, "", kTopKeys);

  RunConfig cfg;
  cfg.source_text = std::string(text);
  if (const toml::node* node = root.get("mode")) {
    try {
      cfg.mode = parse_mode(rd.string(*node, "mode"));
    } catch (const ConfigError&) {
      throw;
    } catch (const ValidationError& e) {
      rd.fail("mode", e.what(), node->source());
    }
  }
  // [sde] first: the dnse epsilon dial needs t_final.
  parse_sde(rd, rd.section(root, "sde", true), cfg);
  parse_system(rd, rd.section(root, "system", true), cfg);
  parse_observables(rd, rd.section(root, "observables", false), cfg);

  const toml::table& out = rd.section(root, "output", false);
  rd.check_keys(out, "output", kOutputKeys);
  if (const toml::node* node = out.get("path")) cfg.output_path = rd.string(*node, "output.path");

  try {
    cfg.system.validate();
    cfg.sde.validate();
  } catch (const ValidationError& e) {
    rd.fail("system", e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace bosde
