#include "helgason/io.hpp"

#include <fstream>
#include <sstream>

namespace helgason {

Vec vec_from_json(const nlohmann::json& j, int dim, const char* what) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(dim))
    throw ValidationError(std::string(what) + " must be an array of " + std::to_string(dim) + " numbers");
  Vec v{};
  for (int k = 0; k < dim; ++k) {
    if (!j[k].is_number()) throw ValidationError(std::string(what) + " has a non-numeric entry");
    v[k] = j[k].get<double>();
  }
  return v;
}

nlohmann::ordered_json vec_to_json(const Vec& v, int dim) {
  auto out = nlohmann::ordered_json::array();
  for (int k = 0; k < dim; ++k) out.push_back(v[k]);
  return out;
}

namespace {

double number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing field \"") + key + "\"");
  if (!j[key].is_number()) throw ValidationError(std::string("field \"") + key + "\" must be a number");
  return j[key].get<double>();
}

}  // namespace

PhantomSpec phantom_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("phantom spec must be a JSON object");
  PhantomSpec s;
  if (!j.contains("kind") || !j["kind"].is_string()) throw ValidationError("phantom spec needs a string \"kind\"");
  s.kind = phantom_kind_from_string(j["kind"].get<std::string>());
  if (!j.contains("dim") || !j["dim"].is_number_integer()) throw ValidationError("phantom spec needs an integer \"dim\"");
  s.dim = j["dim"].get<int>();
  if (s.dim != 2 && s.dim != 3) throw ValidationError("phantom dimension must be 2 or 3");
  s.center = j.contains("center") ? vec_from_json(j["center"], s.dim, "center") : Vec{};
  s.radius = number(j, "radius");
  s.amplitude = j.contains("amplitude") ? number(j, "amplitude") : 1.0;
  if (j.contains("cut") && !j["cut"].is_null()) {
    const auto& c = j["cut"];
    if (!c.is_object() || !c.contains("y0") || !c.contains("omega0"))
      throw ValidationError("cut must be an object with \"y0\" and \"omega0\"");
    s.cut = std::make_pair(vec_from_json(c["y0"], s.dim, "cut.y0"), vec_from_json(c["omega0"], s.dim, "cut.omega0"));
  }
  if (j.contains("truncation_radius")) s.truncation_radius = number(j, "truncation_radius");
  if (j.contains("contact_tolerance")) s.contact_tolerance = number(j, "contact_tolerance");
  return s;
}

nlohmann::ordered_json phantom_spec_to_json(const PhantomSpec& s) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(s.kind);
  j["dim"] = s.dim;
  j["center"] = vec_to_json(s.center, s.dim);
  j["radius"] = s.radius;
  j["amplitude"] = s.amplitude;
  if (s.cut) {
    nlohmann::ordered_json c;
    c["y0"] = vec_to_json(s.cut->first, s.dim);
    c["omega0"] = vec_to_json(s.cut->second, s.dim);
    j["cut"] = c;
  }
  if (s.truncation_radius) j["truncation_radius"] = *s.truncation_radius;
  if (s.contact_tolerance) j["contact_tolerance"] = *s.contact_tolerance;
  return j;
}

RestrictedWindow window_from_json(const nlohmann::json& j, int dim) {
  if (!j.is_object()) throw ValidationError("window must be a JSON object");
  RestrictedWindow w;
  w.y0 = vec_from_json(j.value("y0", nlohmann::json()), dim, "window.y0");
  w.omega0 = vec_from_json(j.value("omega0", nlohmann::json()), dim, "window.omega0");
  w.alpha = number(j, "alpha");
  w.beta = number(j, "beta");
  w.validate(dim);
  return w;
}

nlohmann::ordered_json window_to_json(const RestrictedWindow& w, int dim) {
  nlohmann::ordered_json j;
  j["y0"] = vec_to_json(w.y0, dim);
  j["omega0"] = vec_to_json(w.omega0, dim);
  j["alpha"] = w.alpha;
  j["beta"] = w.beta;
  return j;
}

nlohmann::json parse_json_text(const std::string& text, const char* what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace helgason
