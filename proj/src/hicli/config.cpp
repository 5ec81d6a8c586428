#include "hics/hicli.hpp"
#include "hics/operator_io.hpp"
#include "hics/types.hpp"

namespace hics {

using nlohmann::json;

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ParameterError("override '" + assignment + "' is not of the form key=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }

  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) {
      throw ParameterError("override key '" + path + "' has an empty component");
    }
    if (node->is_null()) {
      *node = json::object();
    }
    if (!node->is_object()) {
      throw ParameterError("override '" + path + "': '" + key + "' is inside a non-object value");
    }
    if (dot == std::string::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

json load_config(const CliOptions& options) {
  json config;
  if (options.config_path) {
    config = read_json_file(*options.config_path);
    if (!config.is_object()) {
      throw ParameterError("config must be a JSON object");
    }
  } else {
    config = json{{"schema_version", kSchemaVersion}};
  }
  for (const auto& o : options.overrides) {
    apply_override(config, o);
  }
  if (!config.contains("schema_version")) {
    throw ParameterError("missing key 'schema_version'");
  }
  if (!config["schema_version"].is_number_integer() || config["schema_version"].get<int>() != kSchemaVersion) {
    throw ParameterError("unsupported schema_version " + config["schema_version"].dump() + " (expected " +
                         std::to_string(kSchemaVersion) + ")");
  }
  for (const auto& [key, value] : config.items()) {
    if (key != "schema_version" && key != "experiment" && key != "rip" && key != "project") {
      throw ParameterError("unknown key '" + key + "'");
    }
  }
  if (options.seed) {
    if (config.contains("experiment")) config["experiment"]["master_seed"] = *options.seed;
    if (config.contains("rip")) config["rip"]["seed"] = *options.seed;
    if (config.contains("project")) config["project"]["seed"] = *options.seed;
  }
  return config;
}

}  // namespace hics
