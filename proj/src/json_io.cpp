#include "l2field/json_io.hpp"

#include <cmath>

#include "l2field/errors.hpp"

namespace l2field {

const json& require_field(const json& obj, const std::string& key, const std::string& context) {
  if (!obj.is_object()) throw ArgumentError(context + ": expected a JSON object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ArgumentError(context + ": missing field \"" + key + "\"");
  return *it;
}

double as_number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ArgumentError(what + ": expected a number");
  return v.get<double>();
}

double require_number(const json& obj, const std::string& key, const std::string& context) {
  return as_number(require_field(obj, key, context), context + "." + key);
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& context) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return as_number(obj.at(key), context + "." + key);
}

std::uint64_t uint_or(const json& obj, const std::string& key, std::uint64_t fallback,
                      const std::string& context) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
    throw ArgumentError(context + "." + key + ": expected a non-negative integer");
  return v.get<std::uint64_t>();
}

bool bool_or(const json& obj, const std::string& key, bool fallback, const std::string& context) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ArgumentError(context + "." + key + ": expected true or false");
  return v.get<bool>();
}

std::string string_or(const json& obj, const std::string& key, const std::string& fallback,
                      const std::string& context) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ArgumentError(context + "." + key + ": expected a string");
  return v.get<std::string>();
}

Vec vec_from_json(const json& v, const std::string& what) {
  if (v.is_number()) return Vec::Constant(1, v.get<double>());
  if (!v.is_array()) throw ArgumentError(what + ": expected an array of numbers");
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = as_number(v[i], what);
  return out;
}

std::vector<Vec> vecs_from_json(const json& v, const std::string& what) {
  if (!v.is_array()) throw ArgumentError(what + ": expected an array");
  std::vector<Vec> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(vec_from_json(v[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> doubles_from_json(const json& v, const std::string& what) {
  if (!v.is_array()) throw ArgumentError(what + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_number(x, what));
  return out;
}

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

SpacePtr space_from_json(const json& j, std::size_t atom_budget) {
  const std::string ctx = "space";
  if (!j.is_object()) throw ArgumentError(ctx + ": expected a JSON object");
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    const double d = require_number(g, "dim", "space.grid");
    const double n = require_number(g, "n", "space.grid");
    const double extent = number_or(g, "extent", 1.0, "space.grid");
    if (d != std::floor(d) || n != std::floor(n)) throw ArgumentError("space.grid: dim and n must be integers");
    return make_grid_space(static_cast<int>(d), static_cast<long long>(n), extent, atom_budget);
  }
  const std::vector<Vec> atoms = vecs_from_json(require_field(j, "atoms", ctx), "space.atoms");
  const Vec weights = vec_from_json(require_field(j, "weights", ctx), "space.weights");
  if (atoms.empty()) throw ArgumentError("space.atoms: empty");
  const auto d = static_cast<Eigen::Index>(number_or(j, "dim", static_cast<double>(atoms.front().size()), ctx));
  Mat m(static_cast<Eigen::Index>(atoms.size()), d);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].size() != d) throw ArgumentError("space.atoms: row " + std::to_string(i) + " has the wrong length");
    m.row(static_cast<Eigen::Index>(i)) = atoms[i].transpose();
  }
  return std::make_shared<const MeasureSpace>(std::move(m), weights);
}

json space_to_json(const MeasureSpace& s) {
  json atoms = json::array();
  for (Eigen::Index i = 0; i < s.size(); ++i) atoms.push_back(vec_to_json(s.atoms().row(i).transpose()));
  return {{"dim", s.dim()}, {"atoms", atoms}, {"weights", vec_to_json(s.weights())}};
}

Kernel kernel_from_json(const json& j, SpacePtr fallback_space) {
  const std::string ctx = "kernel";
  const json& fam = require_field(j, "family", ctx);
  if (!fam.is_string()) throw ArgumentError("kernel.family: expected a string");
  const Family f = family_from_string(fam.get<std::string>());
  const bool experimental = bool_or(j, "experimental", false, ctx);
  switch (f) {
    case Family::fbm1d: return Kernel::fbm1d(require_number(j, "H", ctx));
    case Family::levy: return Kernel::levy(require_number(j, "H", ctx));
    case Family::mpfbm: return Kernel::mpfbm(require_number(j, "H", ctx), experimental);
    case Family::sheet: {
      const std::vector<double> hv = doubles_from_json(require_field(j, "Hvec", ctx), "kernel.Hvec");
      return Kernel::sheet(hv);
    }
    case Family::custom_variogram: return Kernel::custom_variogram(require_number(j, "alpha", ctx));
    case Family::l2fbm: {
      const double H = require_number(j, "H", ctx);
      SpacePtr space = j.contains("space") ? space_from_json(j.at("space")) : fallback_space;
      if (!space) throw ArgumentError("kernel: l2fbm needs a \"space\"");
      return Kernel::l2fbm(space, H, experimental);
    }
  }
  throw ArgumentError("kernel: unknown family");
}

json kernel_to_json(const Kernel& k) {
  json j{{"family", to_string(k.family())}};
  switch (k.family()) {
    case Family::sheet: j["Hvec"] = k.Hvec(); break;
    case Family::custom_variogram: j["alpha"] = k.alpha(); break;
    default: j["H"] = k.H(); break;
  }
  if (k.experimental()) j["experimental"] = true;
  if (k.family() == Family::l2fbm) j["space_atoms"] = k.space()->size();
  return j;
}

FreqGrid grid_from_json(const json& j, double alpha) {
  const std::string ctx = "grid";
  const double x_min = number_or(j, "x_min", 1e-4, ctx);
  const double x_max = number_or(j, "x_max", 1e4, ctx);
  const double n = number_or(j, "n", 4096, ctx);
  if (n < 1 || n != std::floor(n)) throw ArgumentError("grid.n: expected a positive integer");
  return FreqGrid::log_spaced(x_min, x_max, static_cast<std::size_t>(n), alpha);
}

json grid_to_json(const FreqGrid& g) {
  return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"n", g.n}, {"alpha", g.alpha}};
}

json estimate_to_json(const Estimate& e) {
  return {{"value", number(e.value)}, {"stderr", number(e.std_error)}, {"n", e.n_samples}, {"seed", e.seed}};
}

}  // namespace l2field
