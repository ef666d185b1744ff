#include "incite/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "incite/error.hpp"

namespace incite {

using nlohmann::json;

namespace {

std::string canonical_key(std::string_view key) {
  if (key == "order") return "order_policy";
  if (key == "mode") return "default_mode";
  return std::string(key);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorKind::InvalidArgument,
              "invalid value '" + std::string(value) + "' for " + std::string(key));
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{"key_style", "order_policy", "target_bib",
                                             "default_mode", "api_base"};
  return keys;
}

void set_config_value(Config& config, std::string_view raw_key, std::string_view value) {
  const std::string key = canonical_key(raw_key);
  if (key == "key_style") {
    const auto style = parse_key_style(value);
    if (!style) bad_value(key, value);
    config.key_style = *style;
  } else if (key == "order_policy") {
    const auto policy = parse_order_policy(value);
    if (!policy) bad_value(key, value);
    config.order_policy = *policy;
  } else if (key == "target_bib") {
    if (value.empty()) {
      config.target_bib.reset();
    } else {
      config.target_bib = std::string(value);
    }
  } else if (key == "default_mode") {
    const auto mode = parse_search_mode(value);
    if (!mode) bad_value(key, value);
    config.default_mode = *mode;
  } else if (key == "api_base") {
    if (value.find("://") == std::string_view::npos) bad_value(key, value);
    config.api_base = std::string(value);
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown config key '" + std::string(raw_key) + "'");
  }
}

std::string get_config_value(const Config& config, std::string_view raw_key) {
  const std::string key = canonical_key(raw_key);
  if (key == "key_style") return std::string(to_string(config.key_style));
  if (key == "order_policy") return std::string(to_string(config.order_policy));
  if (key == "target_bib") return config.target_bib.value_or("");
  if (key == "default_mode") return std::string(to_string(config.default_mode));
  if (key == "api_base") return config.api_base;
  throw Error(ErrorKind::InvalidArgument, "unknown config key '" + std::string(raw_key) + "'");
}

Config config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "config must be a JSON object");
  Config config;
  for (const auto& key : config_keys()) {
    if (!j.contains(key) || j[key].is_null()) continue;
    if (!j[key].is_string()) throw Error(ErrorKind::InvalidArgument, key + " must be a string");
    set_config_value(config, key, j[key].get<std::string>());
  }
  if (j.contains("api_token") && j["api_token"].is_string()) {
    config.api_token = j["api_token"].get<std::string>();
  }
  if (j.contains("cite_commands")) {
    for (const auto& c : j["cite_commands"]) {
      if (!c.is_string()) throw Error(ErrorKind::InvalidArgument, "cite_commands must be strings");
      config.cite_commands.push_back(c.get<std::string>());
    }
  }
  if (j.contains("weights")) {
    const json& w = j["weights"];
    auto read = [&](const char* name, double& slot) {
      if (w.contains(name)) slot = w[name].get<double>();
    };
    read("first_author", config.weights.first_author);
    read("later_author", config.weights.later_author);
    read("year_exact", config.weights.year_exact);
    read("year_adjacent", config.weights.year_adjacent);
    read("initial", config.weights.initial);
    read("context", config.weights.context);
    read("popularity_cap", config.weights.popularity_cap);
  }
  return config;
}

json config_to_json(const Config& config) {
  json j = {{"key_style", to_string(config.key_style)},
            {"order_policy", to_string(config.order_policy)},
            {"target_bib", config.target_bib ? json(*config.target_bib) : json(nullptr)},
            {"default_mode", to_string(config.default_mode)},
            {"api_base", config.api_base}};
  if (!config.cite_commands.empty()) j["cite_commands"] = config.cite_commands;
  const ScoreWeights defaults;
  const ScoreWeights& w = config.weights;
  if (w.first_author != defaults.first_author || w.later_author != defaults.later_author ||
      w.year_exact != defaults.year_exact || w.year_adjacent != defaults.year_adjacent ||
      w.initial != defaults.initial || w.context != defaults.context ||
      w.popularity_cap != defaults.popularity_cap) {
    j["weights"] = {{"first_author", w.first_author},   {"later_author", w.later_author},
                    {"year_exact", w.year_exact},       {"year_adjacent", w.year_adjacent},
                    {"initial", w.initial},             {"context", w.context},
                    {"popularity_cap", w.popularity_cap}};
  }
  return j;
}

Config load_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    std::error_code ec;
    if (!std::filesystem::exists(file, ec)) return Config{};
    throw Error(ErrorKind::Io, "cannot read " + file.string());
  }
  try {
    return config_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, file.string() + ": " + e.what());
  }
}

void save_config(const std::filesystem::path& file, const Config& config) {
  json j = config_to_json(config);
  // A token that came from the file stays in the file.
  if (config.api_token) j["api_token"] = *config.api_token;
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::Io, "cannot write " + file.string());
}

}  // namespace incite
