#include "qpwalk/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace qpwalk {

namespace {

using nlohmann::json;

Rat rat_from_json(const json& value, const std::string& what) {
  if (value.is_string()) return rat_from_string(value.get<std::string>());
  if (value.is_number_integer()) return Rat(value.get<long>());
  if (value.is_number_float()) {
    // re-serialize so a literal like 0.0405 is read as the decimal it spells,
    // not as its binary rounding
    return rat_from_string(value.dump());
  }
  raise(Errc::ParseError, what + " is not a number");
}

TransitionKernel<Rat> kernel_from_json(const json& object, const std::string& what) {
  if (!object.is_object()) raise(Errc::ParseError, what + " must be an object");
  TransitionKernel<Rat> kernel;
  for (auto it = object.begin(); it != object.end(); ++it) {
    const std::string& key = it.key();
    auto comma = key.find(',');
    if (comma == std::string::npos)
      raise(Errc::ParseError, what + " key '" + key + "' is not of the form \"k,l\"");
    int k, l;
    try {
      k = std::stoi(key.substr(0, comma));
      l = std::stoi(key.substr(comma + 1));
    } catch (const std::exception&) {
      raise(Errc::ParseError, what + " key '" + key + "' is not of the form \"k,l\"");
    }
    if (k < -1 || k > 1 || l < -1 || l > 1)
      raise(Errc::ParseError, what + " key '" + key + "' out of range");
    kernel.at(k, l) = rat_from_json(it.value(), what + "[" + key + "]");
  }
  return kernel;
}

Rat param(const json& object, const std::string& name) {
  if (!object.contains(name))
    raise(Errc::ParseError, "builder parameter '" + name + "' is missing");
  return rat_from_json(object.at(name), name);
}

ModelSource from_builder(const std::string& name, const json& object) {
  if (name == "alternating_service")
    return alternating_service<Rat>(
        {param(object, "a"), param(object, "lambda1"), param(object, "lambda2")});
  if (name == "simultaneous_arrivals")
    return simultaneous_arrivals<Rat>(param(object, "a"), param(object, "lambda"));
  if (name == "work_conserving")
    return work_conserving<Rat>(param(object, "a"), param(object, "lambda1"),
                                param(object, "lambda2"));
  if (name == "paired_service")
    return paired_service<Rat>({param(object, "a0"), param(object, "a1"), param(object, "a2"),
                                param(object, "lambda1"), param(object, "lambda2")});
  if (name == "false_initiation")
    return false_initiation<Rat>({param(object, "a"), param(object, "b"),
                                  param(object, "lambda1"), param(object, "lambda2")});
  if (name == "batch_geometric")
    return BatchGeometricParams<Rat>{param(object, "a"), param(object, "lambda1"),
                                     param(object, "lambda2")};
  if (name == "extended_neighbors") {
    if (!object.contains("interior"))
      raise(Errc::ParseError, "extended_neighbors needs an \"interior\" kernel");
    return extended_neighbors<Rat>(kernel_from_json(object.at("interior"), "interior"));
  }
  raise(Errc::ParseError, "unknown builder model '" + name + "'");
}

}  // namespace

ModelSource parse_model(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& err) {
    raise(Errc::ParseError, std::string("invalid JSON: ") + err.what());
  }
  if (!doc.is_object()) raise(Errc::ParseError, "model document must be a JSON object");
  if (doc.contains("model")) {
    if (!doc.at("model").is_string()) raise(Errc::ParseError, "\"model\" must be a string");
    return from_builder(doc.at("model").get<std::string>(), doc);
  }
  for (const char* key : {"interior", "horizontal", "vertical", "origin"})
    if (!doc.contains(key))
      raise(Errc::ParseError, std::string("model document lacks \"") + key + "\"");
  return build_spec(kernel_from_json(doc.at("interior"), "interior"),
                    kernel_from_json(doc.at("horizontal"), "horizontal"),
                    kernel_from_json(doc.at("vertical"), "vertical"),
                    kernel_from_json(doc.at("origin"), "origin"));
}

ModelSource load_model(const std::string& source) {
  // inline shorthand: "name:key=value,..." (no such file names expected)
  auto colon = source.find(':');
  std::ifstream file(source);
  if (!file && colon != std::string::npos) {
    json object;
    object["model"] = source.substr(0, colon);
    std::string rest = source.substr(colon + 1);
    std::istringstream parts(rest);
    std::string item;
    while (std::getline(parts, item, ',')) {
      auto equals = item.find('=');
      if (equals == std::string::npos)
        raise(Errc::ParseError, "shorthand parameter '" + item + "' lacks '='");
      object[item.substr(0, equals)] = item.substr(equals + 1);
    }
    return from_builder(object["model"].get<std::string>(), object);
  }
  if (!file) raise(Errc::ParseError, "cannot open model file '" + source + "'");
  std::stringstream buffer;
  buffer << file.rdbuf();
  if (buffer.str().empty()) raise(Errc::ParseError, "model file '" + source + "' is empty");
  return parse_model(buffer.str());
}

WalkSpec<Rat> load_spec(const std::string& path) {
  ModelSource model = load_model(path);
  if (auto* spec = std::get_if<WalkSpec<Rat>>(&model)) return *spec;
  raise(Errc::ParseError, "model file describes the batch model, not a walk spec");
}

std::string spec_to_json(const WalkSpec<Rat>& spec) {
  json doc;
  auto emit = [&](const char* name, const TransitionKernel<Rat>& kernel) {
    json object = json::object();
    for (auto [k, l] : kOffsets) {
      if (kernel.at(k, l) == 0) continue;
      object[std::to_string(k) + "," + std::to_string(l)] = rat_to_string(kernel.at(k, l));
    }
    doc[name] = object;
  };
  emit("interior", spec.interior);
  emit("horizontal", spec.horizontal);
  emit("vertical", spec.vertical);
  emit("origin", spec.origin);
  return doc.dump(2) + "\n";
}

void save_spec(const WalkSpec<Rat>& spec, const std::string& path) {
  std::ofstream file(path);
  if (!file) raise(Errc::ParseError, "cannot write model file '" + path + "'");
  file << spec_to_json(spec);
}

namespace {

template <typename T>
void measure_csv(std::ostream& os, const InvariantMeasure<T>& measure, long window) {
  os << "m,n,pi\n";
  char line[96];
  for (long m = 0; m <= window; ++m) {
    for (long n = 0; n <= window; ++n) {
      std::snprintf(line, sizeof line, "%ld,%ld,%.17g\n", m, n, to_double(measure.evaluate(m, n)));
      os << line;
    }
  }
}

template <typename T>
void grid_csv(std::ostream& os, const OracleGrid<T>& grid) {
  os << "m,n,p\n";
  char line[96];
  for (long m = 0; m <= grid.N; ++m) {
    for (long n = 0; n <= grid.N; ++n) {
      std::snprintf(line, sizeof line, "%ld,%ld,%.17g\n", m, n, to_double(grid.at(m, n)));
      os << line;
    }
  }
}

std::string format_scalar(const Rat& value) { return rat_to_string(value); }

std::string format_scalar(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

template <typename T>
std::string measure_text_impl(const InvariantMeasure<T>& measure) {
  std::ostringstream os;
  os << "interior terms (coeff, gamma, delta):\n";
  for (const auto& t : measure.interior)
    os << "  (" << format_scalar(t.coeff) << ", " << format_scalar(t.gamma) << ", "
       << format_scalar(t.delta) << ")\n";
  os << "h-axis terms (coeff, ratio):\n";
  for (const auto& t : measure.h_axis)
    os << "  (" << format_scalar(t.coeff) << ", " << format_scalar(t.ratio) << ")\n";
  os << "v-axis terms (coeff, ratio):\n";
  for (const auto& t : measure.v_axis)
    os << "  (" << format_scalar(t.coeff) << ", " << format_scalar(t.ratio) << ")\n";
  return os.str();
}

}  // namespace

void write_measure_csv(std::ostream& os, const InvariantMeasure<Rat>& measure, long window) {
  measure_csv(os, measure, window);
}
void write_measure_csv(std::ostream& os, const InvariantMeasure<double>& measure, long window) {
  measure_csv(os, measure, window);
}
void write_grid_csv(std::ostream& os, const OracleGrid<Rat>& grid) { grid_csv(os, grid); }
void write_grid_csv(std::ostream& os, const OracleGrid<double>& grid) { grid_csv(os, grid); }
std::string measure_text(const InvariantMeasure<Rat>& measure) {
  return measure_text_impl(measure);
}
std::string measure_text(const InvariantMeasure<double>& measure) {
  return measure_text_impl(measure);
}

}  // namespace qpwalk
