#include "incite/session.hpp"

#include <iostream>

#include "incite/wire.hpp"

namespace incite {

using nlohmann::json;

namespace rpc {

int error_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotInCitation: return kNotInCitation;
    case ErrorKind::AuthFailed: return kAuthFailed;
    case ErrorKind::RateLimited: return kRateLimited;
    case ErrorKind::EmptyResults: return kEmptyResults;
    case ErrorKind::StaleFile: return kStaleFile;
    case ErrorKind::NoBibTarget: return kNoBibTarget;
    case ErrorKind::NotFound: return kNotFound;
    case ErrorKind::Transport:
    case ErrorKind::MalformedResponse: return kTransport;
    case ErrorKind::Io: return kIo;
    case ErrorKind::EmptyCue:
    case ErrorKind::BadYear:
    case ErrorKind::InvalidArgument: return kInvalidParams;
    case ErrorKind::NoAuthors:
    case ErrorKind::DuplicateKey: return kInternalError;
  }
  return kInternalError;
}

}  // namespace rpc

namespace {

struct RpcFailure {
  int code;
  std::string message;
  json data = nullptr;
};

json error_response(const json& id, int code, const std::string& message, const json& data = nullptr) {
  json err = {{"code", code}, {"message", message}};
  if (!data.is_null()) err["data"] = data;
  return {{"jsonrpc", "2.0"}, {"id", id}, {"error", err}};
}

[[noreturn]] void invalid_params(const std::string& message) {
  throw RpcFailure{rpc::kInvalidParams, message};
}

const std::string& require_string(const json& params, const char* name) {
  const auto it = params.find(name);
  if (it == params.end() || !it->is_string()) {
    invalid_params(std::string("'") + name + "' must be a string");
  }
  return it->get_ref<const std::string&>();
}

std::optional<std::string> optional_string(const json& params, const char* name) {
  const auto it = params.find(name);
  if (it == params.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) invalid_params(std::string("'") + name + "' must be a string");
  return it->get<std::string>();
}

SourceDocument document(const json& params) {
  return SourceDocument{optional_string(params, "uri").value_or(""), require_string(params, "text")};
}

std::size_t offset_in(const json& params, const SourceDocument& doc) {
  const auto it = params.find("offset");
  if (it == params.end() || !it->is_number_integer() || it->get<std::int64_t>() < 0) {
    invalid_params("'offset' must be a non-negative integer");
  }
  const auto offset = it->get<std::uint64_t>();
  if (offset > doc.text.size()) invalid_params("'offset' is past the end of 'text'");
  return static_cast<std::size_t>(offset);
}

template <typename T, typename Parse>
std::optional<T> optional_enum(const json& params, const char* name, Parse parse) {
  const auto value = optional_string(params, name);
  if (!value) return std::nullopt;
  const auto parsed = parse(*value);
  if (!parsed) invalid_params(std::string("invalid '") + name + "': " + *value);
  return parsed;
}

}  // namespace

Session::Session(Engine& engine) : engine_(engine) {}

json Session::resolve(const json& params) {
  const SourceDocument doc = document(params);
  const std::size_t offset = offset_in(params, doc);
  ResolveOptions options;
  options.mode = optional_enum<SearchMode>(params, "mode", parse_search_mode);
  if (auto it = params.find("max_results"); it != params.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() < 1) {
      invalid_params("'max_results' must be a positive integer");
    }
    options.max_results = it->get<std::size_t>();
  }
  return wire::resolve_result(engine_.resolve(doc, offset, options));
}

json Session::select(const json& params) {
  const SourceDocument doc = document(params);
  const std::size_t offset = offset_in(params, doc);
  const std::string& bibcode = require_string(params, "bibcode");
  SelectOptions options;
  options.key_style = optional_enum<KeyStyle>(params, "key_style", parse_key_style);
  options.order_policy = optional_enum<OrderPolicy>(params, "order_policy", parse_order_policy);
  options.target_bib = optional_string(params, "target_bib");
  options.apply_mode = ApplyMode::ReturnTex;
  const SelectOutcome outcome = engine_.select(doc, offset, bibcode, options);
  json touched = json::array();
  if (outcome.report) touched = outcome.report->touched;
  return {{"edits", wire::workspace_edit(outcome.edit)},
          {"final_key", outcome.edit.final_key},
          {"written", touched}};
}

json Session::scan(const json& params) {
  return wire::scan_result(engine_.scan(document(params)));
}

json Session::configure(const json& params) {
  Config next = engine_.config();
  for (const auto& [key, value] : params.items()) {
    if (key == "api_base") invalid_params("api_base cannot be changed on a running server");
    if (value.is_null()) {
      if (key == "target_bib") {
        next.target_bib.reset();
        continue;
      }
      invalid_params("'" + key + "' cannot be null");
    }
    if (!value.is_string()) invalid_params("'" + key + "' must be a string");
    try {
      set_config_value(next, key, value.get<std::string>());
    } catch (const Error& e) {
      invalid_params(e.what());
    }
  }
  engine_.config() = std::move(next);
  return config_to_json(engine_.config());
}

json Session::dispatch(const std::string& method, const json& params) {
  if (method == "overcite/resolve") return resolve(params);
  if (method == "overcite/select") return select(params);
  if (method == "overcite/scan") return scan(params);
  if (method == "overcite/config") return configure(params);
  throw RpcFailure{rpc::kMethodNotFound, "unknown method '" + method + "'"};
}

json Session::handle_one(const json& message, bool& is_notification) {
  is_notification = false;
  if (!message.is_object()) return error_response(nullptr, rpc::kInvalidRequest, "request must be an object");
  json id = nullptr;
  if (auto it = message.find("id"); it != message.end()) {
    if (!it->is_string() && !it->is_number() && !it->is_null()) {
      return error_response(nullptr, rpc::kInvalidRequest, "invalid id");
    }
    id = *it;
  } else {
    is_notification = true;
  }
  const auto version = message.find("jsonrpc");
  const auto method = message.find("method");
  if (version == message.end() || *version != "2.0" || method == message.end() || !method->is_string()) {
    is_notification = false;
    return error_response(id, rpc::kInvalidRequest, "not a JSON-RPC 2.0 request");
  }
  json params = json::object();
  if (auto it = message.find("params"); it != message.end() && !it->is_null()) {
    if (!it->is_object()) return error_response(id, rpc::kInvalidParams, "params must be an object");
    params = *it;
  }

  try {
    json result = dispatch(method->get<std::string>(), params);
    return {{"jsonrpc", "2.0"}, {"id", id}, {"result", std::move(result)}};
  } catch (const RpcFailure& f) {
    return error_response(id, f.code, f.message, f.data);
  } catch (const Error& e) {
    json data = {{"kind", to_string(e.kind())}};
    if (e.reset_at()) data["reset_at"] = *e.reset_at();
    return error_response(id, rpc::error_code(e.kind()), e.what(), data);
  } catch (const std::exception& e) {
    return error_response(id, rpc::kInternalError, e.what());
  }
}

std::optional<json> Session::handle(const json& message) {
  if (message.is_array()) {
    if (message.empty()) return error_response(nullptr, rpc::kInvalidRequest, "empty batch");
    json responses = json::array();
    for (const auto& m : message) {
      bool notification = false;
      json r = handle_one(m, notification);
      if (!notification) responses.push_back(std::move(r));
    }
    if (responses.empty()) return std::nullopt;
    return responses;
  }
  bool notification = false;
  json r = handle_one(message, notification);
  if (notification) return std::nullopt;
  return r;
}

std::optional<std::string> Session::handle_line(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  if (text::trim(line).empty()) return std::nullopt;
  json message;
  try {
    message = json::parse(line);
  } catch (const json::exception& e) {
    return error_response(nullptr, rpc::kParseError, std::string("parse error: ") + e.what())
        .dump(-1, ' ', false, json::error_handler_t::replace);
  }
  auto response = handle(message);
  if (!response) return std::nullopt;
  return response->dump(-1, ' ', false, json::error_handler_t::replace);
}

void Session::serve(std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    std::optional<std::string> response;
    try {
      response = handle_line(line);
    } catch (const std::exception& e) {
      response = error_response(nullptr, rpc::kInternalError, e.what())
                     .dump(-1, ' ', false, json::error_handler_t::replace);
    }
    if (response) {
      out << *response << '\n';
      out.flush();
    }
  }
}

}  // namespace incite
