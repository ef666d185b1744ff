#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "incite/ads_client.hpp"
#include "incite/bib_store.hpp"
#include "incite/cue_grammar.hpp"
#include "incite/ranker.hpp"

namespace incite {

inline constexpr char kConfigFileName[] = ".incite.json";

/// Project settings stored in `.incite.json`. Command-line flags and
/// per-request values take precedence over these.
struct Config {
  KeyStyle key_style = KeyStyle::AuthorYear;
  OrderPolicy order_policy = OrderPolicy::Append;
  std::optional<std::string> target_bib;
  SearchMode default_mode = SearchMode::Contextual;
  std::string api_base = kDefaultApiBase;
  std::optional<std::string> api_token;
  std::vector<std::string> cite_commands;  // extra macros for the scanner
  ScoreWeights weights;
};

/// Settable keys, in display order.
const std::vector<std::string>& config_keys();

/// Missing file yields defaults. Throws Error{InvalidArgument} on bad
/// values, Error{Io} on unreadable files.
Config load_config(const std::filesystem::path& file);
void save_config(const std::filesystem::path& file, const Config& config);

Config config_from_json(const nlohmann::json& j);
/// The token is never serialized.
nlohmann::json config_to_json(const Config& config);

/// `order` and `mode` are accepted as aliases of `order_policy` and
/// `default_mode`. Throws Error{InvalidArgument} for unknown keys or values.
void set_config_value(Config& config, std::string_view key, std::string_view value);
std::string get_config_value(const Config& config, std::string_view key);

}  // namespace incite
