#include "helgason/constants.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "helgason/common.hpp"

#ifndef HELGASON_DATA_DIR
#define HELGASON_DATA_DIR "data"
#endif

namespace helgason {

namespace {

using ojson = nlohmann::ordered_json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ojson per_dim_json(const PerDim& p) {
  ojson j;
  j["2"] = p.n2;
  j["3"] = p.n3;
  return j;
}

PerDim per_dim_from(const ojson& j, const char* key) {
  if (!j.contains(key) || !j[key].is_object()) throw IoError(std::string("constants file lacks \"") + key + "\"");
  const auto& v = j[key];
  if (!v.contains("2") || !v.contains("3") || !v["2"].is_number() || !v["3"].is_number())
    throw IoError(std::string("constants entry \"") + key + "\" needs numeric values for n = 2 and n = 3");
  PerDim p;
  p.n2 = v["2"].get<double>();
  p.n3 = v["3"].get<double>();
  return p;
}

const std::pair<const char*, PerDim Constants::*> kFields[] = {
    {"kernel_b", &Constants::kernel_b},       {"helgason_c", &Constants::helgason_c},
    {"refined_c", &Constants::refined_c},     {"deconv_c", &Constants::deconv_c},
    {"theorem_c", &Constants::theorem_c},     {"sobolev_k", &Constants::sobolev_k},
};

}  // namespace

double PerDim::at(int n) const {
  if (n == 2) return n2;
  if (n == 3) return n3;
  throw ValidationError("constants exist for n = 2 and n = 3 only");
}

double& PerDim::at(int n) {
  if (n == 2) return n2;
  if (n == 3) return n3;
  throw ValidationError("constants exist for n = 2 and n = 3 only");
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string Constants::canonical() const {
  std::ostringstream out;
  out << "margin=" << num(margin) << ";seed=" << seed;
  for (const auto& [name, field] : kFields) {
    const PerDim& p = this->*field;
    out << ";" << name << "=" << num(p.n2) << "," << num(p.n3);
  }
  return out.str();
}

std::uint64_t Constants::checksum() const { return fnv1a64(canonical()); }

std::uint64_t seal(Constants& c) {
  const std::uint64_t sum = c.checksum();
  c.version = "c-" + hex64(sum).substr(0, 8);
  return sum;
}

std::string constants_to_json(const Constants& c) {
  ojson j;
  j["schema"] = 1;
  j["constants_version"] = c.version;
  j["margin"] = c.margin;
  j["seed"] = c.seed;
  ojson values;
  for (const auto& [name, field] : kFields) values[name] = per_dim_json(c.*field);
  j["constants"] = values;
  j["checksum"] = "fnv1a64:" + hex64(c.checksum());
  return j.dump(2) + "\n";
}

Constants constants_from_json(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("constants file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("schema", 0) != 1) throw IoError("constants file has an unsupported schema");
  Constants c;
  try {
    c.version = j.at("constants_version").get<std::string>();
    c.margin = j.at("margin").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    const auto& values = j.at("constants");
    for (const auto& [name, field] : kFields) c.*field = per_dim_from(values, name);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("constants file is malformed: ") + e.what());
  }
  const std::string want = j.value("checksum", std::string());
  const std::string got = "fnv1a64:" + hex64(c.checksum());
  if (want != got) throw RegressionError("calibration mismatch: constants checksum " + want + " does not match " + got);
  if (c.version != "c-" + hex64(c.checksum()).substr(0, 8))
    throw RegressionError("calibration mismatch: constants_version does not match the checksum");
  return c;
}

Constants load_constants(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read constants file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return constants_from_json(buf.str());
}

void save_constants(const Constants& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write constants file " + path);
  out << constants_to_json(c);
  if (!out) throw IoError("failed writing constants file " + path);
}

std::string default_constants_path() {
  if (const char* env = std::getenv("HELGASON_CONSTANTS"); env && *env) return env;
  return std::string(HELGASON_DATA_DIR) + "/constants.json";
}

}  // namespace helgason
