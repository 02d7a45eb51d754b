#pragma once

#include <optional>
#include <string>
#include <vector>

#include "l2field/kernels.hpp"
#include "l2field/measure_space.hpp"
#include "l2field/report.hpp"
#include "l2field/set_models.hpp"
#include "l2field/spectral.hpp"

namespace l2field {

// Field access with ArgumentError diagnostics naming the offending key.
const json& require_field(const json& obj, const std::string& key, const std::string& context);
double require_number(const json& obj, const std::string& key, const std::string& context);
double number_or(const json& obj, const std::string& key, double fallback, const std::string& context);
std::uint64_t uint_or(const json& obj, const std::string& key, std::uint64_t fallback,
                      const std::string& context);
bool bool_or(const json& obj, const std::string& key, bool fallback, const std::string& context);
std::string string_or(const json& obj, const std::string& key, const std::string& fallback,
                      const std::string& context);

double as_number(const json& v, const std::string& what);
Vec vec_from_json(const json& v, const std::string& what);
std::vector<Vec> vecs_from_json(const json& v, const std::string& what);
std::vector<double> doubles_from_json(const json& v, const std::string& what);
json vec_to_json(const Vec& v);

/// {"dim", "atoms", "weights"} or {"grid": {"dim", "n", "extent"}}.
SpacePtr space_from_json(const json& j, std::size_t atom_budget = kDefaultAtomBudget);
json space_to_json(const MeasureSpace& s);

/// {"family": ..., "H" | "Hvec" | "alpha", "experimental"?, "space"?}. l2fbm
/// takes its space from the kernel object, else from `fallback_space`.
Kernel kernel_from_json(const json& j, SpacePtr fallback_space = nullptr);
json kernel_to_json(const Kernel& k);

/// {"x_min", "x_max", "n"}, defaults 1e-4, 1e4, 4096.
FreqGrid grid_from_json(const json& j, double alpha);
json grid_to_json(const FreqGrid& g);

/// {"value", "stderr", "n", "seed"}.
json estimate_to_json(const Estimate& e);

}  // namespace l2field
