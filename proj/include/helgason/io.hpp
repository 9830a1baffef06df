#pragma once

// JSON forms of phantom specs and data windows, shared by the experiment
// configs, the CLI and the C API.

#include "json.hpp"

#include "helgason/phantoms.hpp"
#include "helgason/radon.hpp"

namespace helgason {

/// Reads a vector of `dim` numbers; throws ValidationError otherwise.
Vec vec_from_json(const nlohmann::json& j, int dim, const char* what);
nlohmann::ordered_json vec_to_json(const Vec& v, int dim);

/// {"kind", "dim", "center", "radius", "amplitude", "cut": {"y0", "omega0"},
///  "truncation_radius", "contact_tolerance"}.
PhantomSpec phantom_spec_from_json(const nlohmann::json& j);
nlohmann::ordered_json phantom_spec_to_json(const PhantomSpec& s);

/// {"y0", "omega0", "alpha", "beta"}.
RestrictedWindow window_from_json(const nlohmann::json& j, int dim);
nlohmann::ordered_json window_to_json(const RestrictedWindow& w, int dim);

/// Parses text, reporting syntax errors as ValidationError.
nlohmann::json parse_json_text(const std::string& text, const char* what);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace helgason
