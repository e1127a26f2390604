#include "pbx/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace pbx {

namespace {

std::string type_name(const double*) { return "a number"; }
std::string type_name(const long long*) { return "an integer"; }
std::string type_name(const std::uint64_t*) { return "an unsigned integer"; }
std::string type_name(const std::string*) { return "a string"; }

// One mapping node; remembers which keys were read so the rest can be
// reported as unknown.
class Section {
 public:
  Section(YAML::Node node, std::string path, std::vector<std::string>& errors)
      : node_(std::move(node)), path_(std::move(path)), errors_(errors) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      errors_.push_back(path_ + ": expected a mapping");
      node_ = YAML::Node();
    }
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  YAML::Node raw(const std::string& key) {
    known_.insert(key);
    if (!node_ || !node_.IsMap()) return YAML::Node();
    return node_[key];
  }

  template <typename T>
  std::optional<T> get(const std::string& key) {
    const YAML::Node n = raw(key);
    if (!n || n.IsNull()) return std::nullopt;
    try {
      if (!n.IsScalar()) throw YAML::Exception(YAML::Mark(), "");
      return n.as<T>();
    } catch (const YAML::Exception&) {
      errors_.push_back(key_path(key) + ": expected " + type_name(static_cast<T*>(nullptr)));
      return std::nullopt;
    }
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const YAML::Node n = raw(key);
    if (!n || n.IsNull()) return std::nullopt;
    try {
      if (!n.IsSequence()) throw YAML::Exception(YAML::Mark(), "");
      return n.as<std::vector<double>>();
    } catch (const YAML::Exception&) {
      errors_.push_back(key_path(key) + ": expected a list of numbers");
      return std::nullopt;
    }
  }

  std::optional<std::vector<std::vector<double>>> rows(const std::string& key) {
    const YAML::Node n = raw(key);
    if (!n || n.IsNull()) return std::nullopt;
    try {
      if (!n.IsSequence()) throw YAML::Exception(YAML::Mark(), "");
      return n.as<std::vector<std::vector<double>>>();
    } catch (const YAML::Exception&) {
      errors_.push_back(key_path(key) + ": expected a list of rows of numbers");
      return std::nullopt;
    }
  }

  /// A complex number written as [re, im] or as a plain real.
  std::optional<cplx> complex(const std::string& key) {
    const YAML::Node n = raw(key);
    if (!n || n.IsNull()) return std::nullopt;
    try {
      if (n.IsScalar()) return cplx(n.as<double>(), 0.0);
      const auto v = n.as<std::vector<double>>();
      if (v.size() != 2) throw YAML::Exception(YAML::Mark(), "");
      return cplx(v[0], v[1]);
    } catch (const YAML::Exception&) {
      errors_.push_back(key_path(key) + ": expected a number or [re, im]");
      return std::nullopt;
    }
  }

  Section child(const std::string& key) { return Section(raw(key), key_path(key), errors_); }

  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    if (node_ && node_.IsMap())
      for (const auto& kv : node_) out.push_back(kv.first.as<std::string>());
    return out;
  }

  void finish() {
    for (const auto& k : keys())
      if (!known_.count(k)) errors_.push_back("unknown key '" + key_path(k) + "'");
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> known_;
};

template <typename T>
void assign(std::optional<T> v, T& target) {
  if (v) target = *v;
}

template <typename Int>
void assign_int(Section& s, const std::string& key, Int& target) {
  if (auto v = s.get<long long>(key)) target = Int(*v);
}

double alpha_for(int L) { return std::sqrt(2.0 * std::numbers::pi * double(L)); }

void check_alpha(Section& s, int L, std::vector<std::string>& errors) {
  if (auto a = s.get<double>("alpha")) {
    const double target = 2.0 * std::numbers::pi * double(L);
    if (std::abs(*a * *a - target) > 1e-12 * target)
      errors.push_back(s.key_path("alpha") + ": alpha² ≠ 2πL (alpha = " + std::to_string(*a) +
                       ", L = " + std::to_string(L) + ", alpha² = " + std::to_string(*a * *a) +
                       ", 2πL = " + std::to_string(target) + ")");
  }
}

std::string to_string(Expectation e) {
  switch (e) {
    case Expectation::complete: return "complete";
    case Expectation::incomplete: return "incomplete";
    case Expectation::automatic: return "auto";
  }
  return "auto";
}

}  // namespace

Expectation LatticeConfig::resolved() const {
  if (expect != Expectation::automatic) return expect;
  return spec.L == 1 ? Expectation::complete : Expectation::incomplete;
}

int LatticeConfig::factorization_range() const {
  if (factorization_n_max > 0) return factorization_n_max;
  return spec.L == 1 ? 2 : 1;
}

RunConfig parse_config(const std::string& text) {
  std::vector<std::string> errors;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  RunConfig cfg;
  cfg.source_text = text;
  Section top(root, "", errors);

  assign_int(top, "dim", cfg.dim);
  assign(top.get<std::uint64_t>("seed"), cfg.seed);
  assign(top.get<std::string>("output_dir"), cfg.output_dir);
  if (cfg.dim < 2) errors.push_back("dim: must be >= 2");
  const Index dim = std::max<Index>(cfg.dim, 2);

  // system
  {
    Section s = top.child("system");
    const std::string kind = s.get<std::string>("kind").value_or("identity");
    SystemSpec spec;
    spec.dim = dim;
    try {
      spec.kind = system_kind_from_string(kind);
    } catch (const Error& e) {
      errors.push_back(std::string("system.kind: ") + e.what());
    }
    const auto s_list = s.numbers("s");
    const auto s_profile = s.get<std::string>("s_profile");
    const auto s_constant = s.get<double>("s_constant");
    spec.s_min = s.get<double>("s_min");
    spec.s_max = s.get<double>("s_max");
    const auto m_re = s.rows("matrix_re");
    const auto m_im = s.rows("matrix_im");
    assign(s.complex("alpha"), spec.alpha_sh);
    assign(s.complex("beta"), spec.beta_sh);
    s.finish();

    if (spec.kind == SystemKind::diagonal_riesz) {
      const int given = int(bool(s_list)) + int(bool(s_profile)) + int(bool(s_constant));
      if (given != 1) {
        errors.push_back("system: diagonal_riesz needs exactly one of s, s_profile, s_constant");
      } else if (s_list) {
        spec.s = Eigen::Map<const Eigen::VectorXd>(s_list->data(), Index(s_list->size()));
      } else if (s_constant) {
        spec.s = Eigen::VectorXd::Constant(dim, *s_constant);
      } else if (*s_profile == "harmonic") {
        spec.s.resize(dim);
        for (Index n = 0; n < dim; ++n) spec.s(n) = 1.0 + 1.0 / double(n + 1);
      } else {
        errors.push_back("system.s_profile: unknown profile '" + *s_profile +
                         "' (known: harmonic)");
      }
    }
    if (spec.kind == SystemKind::custom_matrix) {
      if (!m_re) {
        errors.push_back("system: custom_matrix needs matrix_re");
      } else {
        FockMatrix m = FockMatrix::Zero(dim, dim);
        bool shape_ok = Index(m_re->size()) == dim && (!m_im || Index(m_im->size()) == dim);
        for (Index r = 0; shape_ok && r < dim; ++r) {
          shape_ok = Index((*m_re)[std::size_t(r)].size()) == dim &&
                     (!m_im || Index((*m_im)[std::size_t(r)].size()) == dim);
          for (Index c = 0; shape_ok && c < dim; ++c)
            m(r, c) = cplx((*m_re)[std::size_t(r)][std::size_t(c)],
                           m_im ? (*m_im)[std::size_t(r)][std::size_t(c)] : 0.0);
        }
        if (!shape_ok)
          errors.push_back("system: matrix_re/matrix_im must be " + std::to_string(dim) + "x" +
                           std::to_string(dim));
        spec.custom = m;
      }
    }
    if (errors.empty()) {
      try {
        spec.validate();
      } catch (const Error& e) {
        errors.push_back(std::string("system: ") + e.what());
      }
    }
    cfg.system = spec;
  }

  // quadrature
  {
    Section s = top.child("quadrature");
    double radius = DiscQuadrature::default_radius(dim);
    Index nr = 64, na = 64;
    assign(s.get<double>("radius"), radius);
    assign_int(s, "n_radial", nr);
    assign_int(s, "n_angular", na);
    assign_int(s, "max_mode", cfg.quadrature.max_mode);
    s.finish();
    try {
      cfg.quadrature.disc = DiscQuadrature(radius, nr, na);
    } catch (const Error& e) {
      errors.push_back(std::string("quadrature: ") + e.what());
    }
    if (cfg.quadrature.max_mode < 0 || cfg.quadrature.max_mode >= dim)
      errors.push_back("quadrature.max_mode: must lie in [0, dim)");
  }

  // zak
  {
    Section s = top.child("zak");
    int L = 1;
    assign_int(s, "L", L);
    Index Q = 64, Kk = 64;
    assign_int(s, "Q", Q);
    assign_int(s, "Kk", Kk);
    Index window = 0;
    if (const YAML::Node w = s.raw("n_window"); w && !w.IsNull()) {
      if (w.IsScalar() && w.Scalar() == "auto") {
        window = 0;
      } else {
        try {
          window = Index(w.as<long long>());
          if (window < 1) errors.push_back("zak.n_window: must be >= 1 or auto");
        } catch (const YAML::Exception&) {
          errors.push_back("zak.n_window: expected an integer or auto");
        }
      }
    }
    if (L < 1) errors.push_back("zak.L: must be a positive integer");
    else check_alpha(s, L, errors);
    s.finish();
    if (L >= 1) {
      if (window == 0) window = ZakParams::default_window(L, dim);
      try {
        cfg.zak = ZakParams::make(L, Q, Kk, window);
      } catch (const Error& e) {
        errors.push_back(std::string("zak: ") + e.what());
      }
    }
  }

  // lattice
  {
    Section s = top.child("lattice");
    int L = 1, W = 3;
    Index target = std::min<Index>(12, dim / 4);
    assign_int(s, "L", L);
    assign_int(s, "W", W);
    assign_int(s, "target_modes", target);
    if (auto e = s.get<std::string>("expect")) {
      if (*e == "complete") cfg.lattice.expect = Expectation::complete;
      else if (*e == "incomplete") cfg.lattice.expect = Expectation::incomplete;
      else if (*e == "auto") cfg.lattice.expect = Expectation::automatic;
      else errors.push_back("lattice.expect: expected complete, incomplete or auto");
    }
    if (auto w = s.numbers("windows")) {
      cfg.lattice.windows.clear();
      for (double v : *w) {
        if (v < 0 || v != std::floor(v)) errors.push_back("lattice.windows: expected non-negative integers");
        cfg.lattice.windows.push_back(int(v));
      }
    }
    assign(s.get<double>("complete_threshold"), cfg.lattice.complete_threshold);
    assign(s.get<double>("incomplete_threshold"), cfg.lattice.incomplete_threshold);
    assign_int(s, "factorization_n_max", cfg.lattice.factorization_n_max);
    assign_int(s, "factorization_modes", cfg.lattice.factorization_modes);
    if (L < 1) errors.push_back("lattice.L: must be a positive integer");
    else check_alpha(s, L, errors);
    s.finish();
    if (L >= 1) {
      try {
        cfg.lattice.spec = LatticeSpec::make(L, W, dim, target);
      } catch (const Error& e) {
        errors.push_back(std::string("lattice: ") + e.what());
      }
    }
    if (cfg.lattice.factorization_n_max < 0)
      errors.push_back("lattice.factorization_n_max: must be >= 0 (0 selects the default)");
    if (!(cfg.lattice.complete_threshold > 0) || !(cfg.lattice.incomplete_threshold > 0))
      errors.push_back("lattice: thresholds must be positive");
  }

  // bcs
  {
    Section s = top.child("bcs");
    assign(s.get<double>("z_radius"), cfg.bcs.z_radius);
    assign_int(s, "z_grid", cfg.bcs.z_grid);
    assign(s.get<double>("weyl_alpha"), cfg.bcs.weyl_alpha);
    assign_int(s, "weyl_modes", cfg.bcs.weyl_modes);
    assign_int(s, "sigma_n", cfg.bcs.sigma_n);
    s.finish();
    if (cfg.bcs.z_grid < 1) errors.push_back("bcs.z_grid: must be >= 1");
    if (!(cfg.bcs.z_radius >= 0)) errors.push_back("bcs.z_radius: must be >= 0");
    if (cfg.bcs.weyl_alpha == 0.0) cfg.bcs.weyl_alpha = alpha_for(cfg.zak.L);
  }

  // tolerances
  {
    Section s = top.child("tolerances");
    for (const auto& key : s.keys()) {
      const auto v = s.get<double>(key);
      if (!v) continue;
      if (!(*v > 0) || !std::isfinite(*v)) {
        errors.push_back(s.key_path(key) + ": tolerance must be a positive number");
        continue;
      }
      if (key == "fallback") cfg.tolerances.fallback = *v;
      else cfg.tolerances.per_check[key] = *v;
    }
  }

  top.finish();
  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

nlohmann::json RunConfig::echo() const {
  nlohmann::json sys = {{"kind", std::string(to_string(system.kind))}};
  if (system.kind == SystemKind::diagonal_riesz)
    sys["s"] = std::vector<double>(system.s.data(), system.s.data() + system.s.size());
  if (system.s_min) sys["s_min"] = *system.s_min;
  if (system.s_max) sys["s_max"] = *system.s_max;
  if (system.kind == SystemKind::shifted_oscillator) {
    sys["alpha"] = {system.alpha_sh.real(), system.alpha_sh.imag()};
    sys["beta"] = {system.beta_sh.real(), system.beta_sh.imag()};
  }
  if (system.kind == SystemKind::custom_matrix) {
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (Index r = 0; r < system.custom.rows(); ++r) {
      std::vector<double> rr, ii;
      for (Index c = 0; c < system.custom.cols(); ++c) {
        rr.push_back(system.custom(r, c).real());
        ii.push_back(system.custom(r, c).imag());
      }
      re.push_back(rr);
      im.push_back(ii);
    }
    sys["matrix_re"] = re;
    sys["matrix_im"] = im;
  }
  nlohmann::json tol = {{"fallback", tolerances.fallback}};
  for (const auto& [k, v] : tolerances.per_check) tol[k] = v;
  return {
      {"dim", dim},
      {"seed", seed},
      {"system", sys},
      {"quadrature",
       {{"radius", quadrature.disc.radius},
        {"n_radial", quadrature.disc.n_radial},
        {"n_angular", quadrature.disc.n_angular},
        {"max_mode", quadrature.max_mode}}},
      {"zak",
       {{"L", zak.L}, {"alpha", zak.alpha}, {"Q", zak.Q}, {"Kk", zak.Kk}, {"n_window", zak.n_window}}},
      {"lattice",
       {{"L", lattice.spec.L},
        {"alpha", lattice.spec.alpha},
        {"W", lattice.spec.W},
        {"target_modes", lattice.spec.target_modes},
        {"expect", to_string(lattice.expect)},
        {"windows", lattice.windows},
        {"complete_threshold", lattice.complete_threshold},
        {"incomplete_threshold", lattice.incomplete_threshold},
        {"factorization_n_max", lattice.factorization_n_max},
        {"factorization_modes", lattice.factorization_modes}}},
      {"bcs",
       {{"z_radius", bcs.z_radius},
        {"z_grid", bcs.z_grid},
        {"weyl_alpha", bcs.weyl_alpha},
        {"weyl_modes", bcs.weyl_modes},
        {"sigma_n", bcs.sigma_n}}},
      {"tolerances", tol},
  };
}

}  // namespace pbx
