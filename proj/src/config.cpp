#include "elasteig/config.hpp"

#include <fstream>

#include "elasteig/error.hpp"

namespace elasteig {

using nlohmann::json;

namespace {

/// Reads one JSON object, recording each leaf (or its default) in `echo`.
class Section {
public:
  Section(const json& src, json& echo, std::string path)
      : src_(src), echo_(echo), path_(std::move(path)) {
    if (!src_.is_object()) fail("", "expected an object");
    echo_ = json::object();
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    const json& sub = src_.contains(key) ? src_.at(key) : empty;
    return Section(sub, echo_[key], where(key));
  }

  [[nodiscard]] bool has(const std::string& key) const { return src_.contains(key); }

  /// Accepts `key` without reading it here.
  void known(const std::string& key) { seen_.insert(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!src_.contains(key)) fail(key, "is required");
    return src_.at(key);
  }

  /// Stores the echo entry for a value parsed by the caller.
  void echo(const std::string& key, json value, bool defaulted = false) {
    if (defaulted) {
      echo_[key] = json{{"value", std::move(value)}, {"defaulted", true}};
    } else {
      echo_[key] = std::move(value);
    }
  }

  double number(const std::string& key, std::optional<double> def = {}) {
    seen_.insert(key);
    if (!src_.contains(key)) return defaulted(key, def);
    const json& v = src_.at(key);
    if (!v.is_number()) fail(key, "must be a number");
    echo_[key] = v;
    return v.get<double>();
  }

  long integer(const std::string& key, std::optional<long> def = {}) {
    seen_.insert(key);
    if (!src_.contains(key)) return defaulted(key, def);
    const json& v = src_.at(key);
    if (!v.is_number_integer()) fail(key, "must be an integer");
    echo_[key] = v;
    return v.get<long>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t def) {
    seen_.insert(key);
    if (!src_.contains(key)) {
      echo(key, def, true);
      return def;
    }
    const json& v = src_.at(key);
    if (!v.is_number_unsigned()) fail(key, "must be a non-negative integer");
    echo_[key] = v;
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool def) {
    seen_.insert(key);
    if (!src_.contains(key)) {
      echo(key, def, true);
      return def;
    }
    const json& v = src_.at(key);
    if (!v.is_boolean()) fail(key, "must be true or false");
    echo_[key] = v;
    return v.get<bool>();
  }

  std::string string(const std::string& key, std::optional<std::string> def = {}) {
    seen_.insert(key);
    if (!src_.contains(key)) {
      if (!def) fail(key, "is required");
      echo(key, *def, true);
      return *def;
    }
    const json& v = src_.at(key);
    if (!v.is_string()) fail(key, "must be a string");
    echo_[key] = v;
    return v.get<std::string>();
  }

  std::vector<int> int_list(const std::string& key, std::optional<std::vector<int>> def = {}) {
    seen_.insert(key);
    if (!src_.contains(key)) {
      if (!def) fail(key, "is required");
      echo(key, *def, true);
      return *def;
    }
    const json& v = src_.at(key);
    if (!v.is_array()) fail(key, "must be a list of integers");
    std::vector<int> out;
    for (const auto& x : v) {
      if (!x.is_number_integer()) fail(key, "must be a list of integers");
      out.push_back(x.get<int>());
    }
    echo_[key] = v;
    return out;
  }

  /// Rejects keys that were never read (typos would otherwise be ignored).
  void finish() const {
    for (auto it = src_.begin(); it != src_.end(); ++it) {
      if (!seen_.contains(it.key())) fail(it.key(), "is not a known setting");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw InputError("config: '" + where(key) + "' " + what);
  }

private:
  template <class T>
  T defaulted(const std::string& key, const std::optional<T>& def) {
    if (!def) fail(key, "is required");
    echo(key, *def, true);
    return *def;
  }

  [[nodiscard]] std::string where(const std::string& key) const {
    if (path_.empty()) return key;
    return key.empty() ? path_ : path_ + "." + key;
  }

  const json& src_;
  json& echo_;
  std::string path_;
  std::set<std::string> seen_;
};

BoundaryKind side_kind(Section& s, const std::string& key, BoundaryKind def) {
  const std::string name =
      s.string(key, def == BoundaryKind::Dirichlet ? "dirichlet" : "neumann");
  if (name == "dirichlet") return BoundaryKind::Dirichlet;
  if (name == "neumann") return BoundaryKind::Neumann;
  s.fail(key, "must be \"dirichlet\" or \"neumann\"");
}

void parse_geometry(Section s, GeometryConfig& g, const std::filesystem::path& base_dir) {
  const std::string kind = s.string("kind", "unit_square");
  if (kind == "unit_square") {
    g.kind = GeometryKind::UnitSquare;
  } else if (kind == "three_strip_square") {
    g.kind = GeometryKind::ThreeStripSquare;
  } else if (kind == "lshape") {
    g.kind = GeometryKind::LShape;
  } else if (kind == "file") {
    g.kind = GeometryKind::File;
  } else {
    s.fail("kind", "must be unit_square, three_strip_square, lshape or file");
  }

  if (g.kind == GeometryKind::File) {
    g.path = s.string("path");
    if (g.path.is_relative()) g.path = base_dir / g.path;
    const std::string fmt = s.string("format", "native");
    if (fmt == "native") {
      g.format = MeshFormat::Native;
    } else if (fmt == "msh2") {
      g.format = MeshFormat::Msh2;
    } else {
      s.fail("format", "must be native or msh2");
    }
    const auto labels = s.int_list("dirichlet_labels", std::vector<int>{});
    g.dirichlet_labels = {labels.begin(), labels.end()};
    s.finish();
    return;
  }

  g.n = static_cast<int>(s.integer("n", 8));
  if (g.n < 1 || g.n > 2000) s.fail("n", "must lie in [1, 2000]");
  g.levels = s.int_list("levels", std::vector<int>{});
  for (int n : g.levels) {
    if (n < 1 || n > 2000) s.fail("levels", "entries must lie in [1, 2000]");
  }
  if (g.kind == GeometryKind::ThreeStripSquare) {
    if (g.levels.empty() && g.n % 3 != 0) {
      s.fail("n", "must be divisible by 3 for the three-strip square");
    }
    for (int n : g.levels) {
      if (n % 3 != 0) s.fail("levels", "entries must be divisible by 3 for the three-strip square");
    }
  }
  if (g.kind == GeometryKind::LShape) {
    const auto labels = s.int_list("dirichlet_labels", std::vector<int>{kLTop, kLLeft, kLNotchVert,
                                                                        kLNotchHoriz});
    g.dirichlet_labels = {labels.begin(), labels.end()};
  } else {
    Section sides = s.child("sides");
    g.sides.bottom = side_kind(sides, "bottom", BoundaryKind::Dirichlet);
    g.sides.right = side_kind(sides, "right", BoundaryKind::Neumann);
    g.sides.top = side_kind(sides, "top", BoundaryKind::Neumann);
    g.sides.left = side_kind(sides, "left", BoundaryKind::Neumann);
    sides.finish();
  }
  s.finish();
}

void parse_material(Section s, MaterialModel& m) {
  m.poisson = s.number("poisson");
  m.density = s.number("density", 1.0);
  const json& young = s.raw("young");
  json echo_young = json::object();
  if (young.is_number()) {
    m.young[1] = young.get<double>();
    echo_young = young;
  } else if (young.is_string()) {
    m.young[1] = Expression(young.get<std::string>());
    echo_young = young;
  } else if (young.is_object()) {
    for (auto it = young.begin(); it != young.end(); ++it) {
      int tag = 0;
      try {
        std::size_t used = 0;
        tag = std::stoi(it.key(), &used);
        if (used != it.key().size()) throw std::invalid_argument("tag");
      } catch (const std::exception&) {
        s.fail("young", "keys must be integer subdomain tags");
      }
      if (it.value().is_number()) {
        m.young[tag] = it.value().get<double>();
      } else if (it.value().is_string()) {
        m.young[tag] = Expression(it.value().get<std::string>());
      } else {
        s.fail("young", "values must be numbers or expressions in x and y");
      }
    }
    echo_young = young;
  } else {
    s.fail("young", "must be a number, an expression or a map from subdomain tag");
  }
  s.echo("young", echo_young);
  s.finish();
  m.check();
  for (const auto& [tag, field] : m.young) {
    if (const double* e = std::get_if<double>(&field); e != nullptr && !(*e > 0.0)) {
      throw InputError("config: Young's modulus must be positive (subdomain " +
                       std::to_string(tag) + ")");
    }
  }
}

void parse_eigen(Section s, EigenOptions& e) {
  e.k = static_cast<int>(s.integer("k", 6));
  if (e.k < 1 || e.k > 200) s.fail("k", "must lie in [1, 200]");
  e.shift = s.number("shift", 0.0);
  e.tol = s.number("tol", 1e-8);
  if (!(e.tol > 0.0 && e.tol <= 1e-2)) s.fail("tol", "must lie in (0, 1e-2]");
  e.max_iter = static_cast<int>(s.integer("max_iter", 300));
  if (e.max_iter < 1) s.fail("max_iter", "must be positive");
  e.seed = s.unsigned_integer("seed", 20240607);
  s.finish();
}

void parse_study(Section s, ExperimentConfig& c) {
  c.loop = loop_kind_from_string(s.string("loop", "uniform"));
  c.modes = s.int_list("modes", std::vector<int>{1});
  if (c.modes.empty()) s.fail("modes", "must list at least one mode");
  for (int m : c.modes) {
    if (m < 1 || m > 100) s.fail("modes", "entries must lie in [1, 100]");
  }
  c.fraction = s.number("fraction", 0.5);
  if (!(c.fraction > 0.0 && c.fraction <= 1.0)) s.fail("fraction", "must lie in (0, 1]");
  c.max_iterations = static_cast<int>(s.integer("max_iterations", 12));
  if (c.max_iterations < 1 || c.max_iterations > 100) {
    s.fail("max_iterations", "must lie in [1, 100]");
  }
  c.max_dofs = s.integer("max_dofs", 300000);
  if (c.max_dofs < 1) s.fail("max_dofs", "must be positive");
  c.estimate = s.boolean("estimate", true);
  s.finish();
}

void parse_references(const json& doc, json& echo, std::vector<ReferenceValue>& out) {
  if (!doc.contains("references")) {
    echo["references"] = json{{"value", json::array()}, {"defaulted", true}};
    return;
  }
  const json& refs = doc.at("references");
  if (!refs.is_array()) throw InputError("config: 'references' must be a list");
  echo["references"] = json::array();
  for (std::size_t i = 0; i < refs.size(); ++i) {
    json e;
    Section s(refs[i], e, "references[" + std::to_string(i) + "]");
    ReferenceValue r;
    r.mode = static_cast<int>(s.integer("mode"));
    if (r.mode < 1) s.fail("mode", "must be >= 1");
    if (s.has("kappa_hat") == s.has("sqrt_kappa_hat")) {
      s.fail("", "needs exactly one of kappa_hat or sqrt_kappa_hat");
    }
    if (s.has("kappa_hat")) {
      r.kappa_hat = s.number("kappa_hat");
    } else {
      const double f = s.number("sqrt_kappa_hat");
      r.kappa_hat = f * f;
    }
    if (!(r.kappa_hat > 0.0)) s.fail("", "reference eigenvalue must be positive");
    if (!s.has("provenance")) s.fail("provenance", "is required for every reference value");
    r.provenance = s.string("provenance");
    if (r.provenance.empty()) s.fail("provenance", "must not be empty");
    s.finish();
    echo["references"].push_back(e);
    out.push_back(r);
  }
}

void parse_output(Section s, OutputConfig& o, const std::filesystem::path& base_dir) {
  (void)base_dir;
  o.directory = s.string("directory", o.directory.string());
  o.table = s.boolean("table", true);
  o.plot = s.boolean("plot", true);
  o.matrices = s.boolean("matrices", false);
  o.indicators = s.boolean("indicators", false);
  s.finish();
}

} // namespace

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  json echo;
  Section root(doc, echo, "");
  c.schema_version = static_cast<int>(root.integer("schema_version"));
  if (c.schema_version != kSchemaVersion) {
    root.fail("schema_version", "must be " + std::to_string(kSchemaVersion));
  }
  c.label = root.string("label", "experiment");
  parse_geometry(root.child("geometry"), c.geometry, base_dir);
  parse_material(root.child("material"), c.model);
  c.family = element_family_from_string(root.string("element", "taylor_hood"));
  parse_eigen(root.child("eigen"), c.eigen);
  parse_study(root.child("study"), c);
  root.known("references");
  parse_output(root.child("output"), c.output, base_dir);
  root.finish();
  parse_references(doc, echo, c.references);
  for (const auto& r : c.references) {
    if (std::find(c.modes.begin(), c.modes.end(), r.mode) == c.modes.end()) {
      throw InputError("config: reference given for mode " + std::to_string(r.mode) +
                       ", which is not tracked");
    }
  }
  if (c.geometry.kind == GeometryKind::File && !std::filesystem::exists(c.geometry.path)) {
    throw InputError("mesh file not found: " + c.geometry.path.string());
  }
  if (c.loop == LoopKind::Adaptive && !c.geometry.levels.empty()) {
    throw InputError("config: 'geometry.levels' only applies to uniform studies");
  }
  c.echo = std::move(echo);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

Mesh ExperimentConfig::build_mesh(int n) const {
  switch (geometry.kind) {
    case GeometryKind::UnitSquare:
      return unit_square_mesh(n, geometry.sides);
    case GeometryKind::ThreeStripSquare:
      return three_strip_square_mesh(n, geometry.sides);
    case GeometryKind::LShape:
      return lshape_mesh(n, geometry.dirichlet_labels);
    case GeometryKind::File: {
      if (!std::filesystem::exists(geometry.path)) {
        throw InputError("mesh file not found: " + geometry.path.string());
      }
      Mesh m = load_mesh(geometry.path, geometry.format, geometry.dirichlet_labels);
      return m;
    }
  }
  throw InputError("unknown geometry kind");
}

StudyConfig ExperimentConfig::study_config() const {
  StudyConfig s;
  if (loop == LoopKind::Uniform && !geometry.levels.empty()) {
    for (int n : geometry.levels) s.meshes.push_back(build_mesh(n));
  } else {
    s.initial_mesh = build_mesh();
  }
  s.model = model;
  s.family = family;
  s.modes = modes;
  s.references = references;
  s.loop = loop;
  s.fraction = fraction;
  s.max_iterations = max_iterations;
  s.max_dofs = max_dofs;
  s.estimate = estimate;
  s.eigen = eigen;
  return s;
}

} // namespace elasteig
