#include "cli.hpp"

#include <signal.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "incite/ads_client.hpp"
#include "incite/config.hpp"
#include "incite/mock_server.hpp"
#include "incite/resolver.hpp"
#include "incite/session.hpp"
#include "incite/transport.hpp"
#include "incite/wire.hpp"

namespace incite::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::Transport:
    case ErrorKind::MalformedResponse:
      return kExitIo;
    case ErrorKind::AuthFailed:
      return kExitAuth;
    case ErrorKind::RateLimited:
      return kExitRateLimit;
    default:
      return kExitDomain;
  }
}

namespace {

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
  bool interactive;
};

struct GlobalOptions {
  std::string project = ".";
  std::string api_base;
};

struct NetOptions {
  std::string replay;
  std::string record;
};

fs::path project_root(const GlobalOptions& g) { return fs::absolute(g.project).lexically_normal(); }

Config project_config(const GlobalOptions& g) {
  Config config = load_config(project_root(g) / kConfigFileName);
  if (!g.api_base.empty()) config.api_base = g.api_base;
  return config;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Paths are printed relative to the project root so output is stable
/// across checkouts.
std::string display_path(const std::string& path, const fs::path& root) {
  const fs::path rel = fs::path(path).lexically_relative(root);
  if (rel.empty() || *rel.begin() == "..") return path;
  return rel.generic_string();
}

void relativize(json& j, const fs::path& root) {
  if (j.is_object()) {
    for (auto& [key, value] : j.items()) {
      if (value.is_string() && (key == "uri" || key == "path" || key == "bib_path")) {
        value = display_path(value.get<std::string>(), root);
      } else if (value.is_array() && (key == "bib_files" || key == "touched")) {
        for (auto& v : value) {
          if (v.is_string()) v = display_path(v.get<std::string>(), root);
        }
      } else {
        relativize(value, root);
      }
    }
  } else if (j.is_array()) {
    for (auto& v : j) relativize(v, root);
  }
}

std::shared_ptr<AdsClient> make_client(const Config& config, const NetOptions& net, std::ostream& err) {
  ClientOptions options;
  options.warn = [&err](const std::string& msg) { err << "incite: warning: " << msg << '\n'; };
  std::optional<std::string> token = resolve_token(config.api_token);
  std::shared_ptr<Transport> transport;
  if (!net.replay.empty()) {
    transport = std::make_shared<ReplayTransport>(net.replay);
    // Fixtures never carry the token, so any placeholder will do.
    if (!token) token = "replay";
  } else {
    if (!token) return nullptr;
    transport = std::make_shared<HttpTransport>(config.api_base);
    if (!net.record.empty()) transport = std::make_shared<RecordingTransport>(transport, net.record);
  }
  return std::make_shared<AdsClient>(std::move(transport), *token, options);
}

std::size_t offset_for(std::string_view text, long line, long col) {
  if (line < 1 || col < 1) throw Error(ErrorKind::InvalidArgument, "line and column are 1-based");
  std::size_t pos = 0;
  for (long l = 1; l < line; ++l) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      throw Error(ErrorKind::InvalidArgument, "line " + std::to_string(line) + " is past the end of the file");
    }
    pos = nl + 1;
  }
  std::size_t end = text.find('\n', pos);
  if (end == std::string_view::npos) end = text.size();
  for (long c = 1; c < col; ++c) {
    if (pos >= end) {
      throw Error(ErrorKind::InvalidArgument, "column " + std::to_string(col) + " is past the end of line " +
                                                  std::to_string(line));
    }
    ++pos;
    while (pos < end && (static_cast<unsigned char>(text[pos]) & 0xC0) == 0x80) ++pos;
  }
  return pos;
}

std::pair<std::size_t, std::size_t> line_col_of(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  std::size_t line_start = 0;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      line_start = i + 1;
    }
  }
  return {line, text::utf8_length(text.substr(line_start, offset - line_start)) + 1};
}

std::string byline(const AdsRecord& r) {
  if (r.authors.empty()) return "(no authors)";
  return r.authors.front() + (r.authors.size() > 1 ? " et al." : "");
}

void print_candidates(const ResolveOutcome& outcome, std::ostream& out) {
  out << "Cue \"" << outcome.cue.raw << "\" (" << to_string(outcome.cue.mode) << "), query: "
      << outcome.query.q << (outcome.widened ? " [widened]" : "") << '\n';
  std::size_t n = 0;
  for (const auto& c : outcome.candidates) {
    const AdsRecord& r = c.record;
    out << "  " << ++n << ". " << r.title << '\n'
        << "     " << byline(r) << " (" << r.year << ")";
    if (r.pub && !r.pub->empty()) out << ", " << *r.pub;
    out << ", " << r.citation_count << (r.citation_count == 1 ? " citation" : " citations") << "  ["
        << r.bibcode << "]\n";
  }
}

/// nullopt means the user cancelled.
std::optional<std::size_t> prompt_pick(std::size_t count, Streams& io) {
  for (;;) {
    io.out << "Select 1-" << count << " (empty to cancel): " << std::flush;
    std::string line;
    if (!std::getline(io.in, line)) return std::nullopt;
    const std::string_view choice = text::trim(line);
    if (choice.empty() || choice == "q") return std::nullopt;
    try {
      std::size_t used = 0;
      const long n = std::stol(std::string(choice), &used);
      if (used == choice.size() && n >= 1 && static_cast<std::size_t>(n) <= count) {
        return static_cast<std::size_t>(n);
      }
    } catch (const std::exception&) {
    }
    io.err << "incite: enter a number between 1 and " << count << '\n';
  }
}

template <typename T>
std::optional<T> parse_enum_flag(const std::string& value, std::optional<T> (*parse)(std::string_view),
                                 const char* what) {
  if (value.empty()) return std::nullopt;
  auto parsed = parse(value);
  if (!parsed) throw Error(ErrorKind::InvalidArgument, std::string("unknown ") + what + " '" + value + "'");
  return parsed;
}

// scan

struct ScanArgs {
  std::vector<std::string> paths;
  bool json = false;
};

std::vector<fs::path> collect_tex_files(const std::vector<std::string>& paths) {
  std::vector<fs::path> files;
  for (const auto& p : paths) {
    const fs::path path = fs::absolute(p).lexically_normal();
    std::error_code ec;
    if (fs::is_directory(path, ec)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::recursive_directory_iterator(path)) {
        if (entry.is_regular_file() && entry.path().extension() == ".tex") found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::exists(path, ec)) {
      files.push_back(path);
    } else {
      throw Error(ErrorKind::Io, "no such file or directory: " + p);
    }
  }
  return files;
}

int cmd_scan(const GlobalOptions& g, const ScanArgs& args, Streams& io) {
  const fs::path root = project_root(g);
  const Engine engine(nullptr, project_config(g), root);
  const auto files = collect_tex_files(args.paths);

  json report = json::array();
  std::size_t unresolved = 0;
  std::size_t sites = 0;
  std::ostringstream table;
  for (const auto& file : files) {
    SourceDocument doc{file.string(), read_file(file)};
    const ScanOutcome outcome = engine.scan(doc);
    unresolved += outcome.unresolved.size();
    sites += outcome.sites.size();
    if (args.json) {
      json j = wire::scan_result(outcome);
      j["path"] = display_path(doc.uri, root);
      relativize(j, root);
      report.push_back(std::move(j));
      continue;
    }
    for (const auto& key : outcome.unresolved) {
      for (const auto& site : outcome.sites) {
        const auto it = std::find_if(site.keys.begin(), site.keys.end(),
                                     [&](const CitationKey& k) { return k.raw == key; });
        if (it == site.keys.end()) continue;
        const auto [line, col] = line_col_of(doc.text, it->span.begin);
        table << display_path(doc.uri, root) << ':' << line << ':' << col << "  \\" << site.command << "  "
              << key << '\n';
        break;
      }
    }
  }

  if (args.json) {
    io.out << json{{"files", report}, {"unresolved", unresolved}}.dump(2) << '\n';
  } else {
    io.out << table.str() << unresolved << (unresolved == 1 ? " unresolved key" : " unresolved keys")
           << " in " << files.size() << (files.size() == 1 ? " file" : " files") << " (" << sites
           << (sites == 1 ? " citation site" : " citation sites") << ")\n";
  }
  return unresolved == 0 ? kExitOk : kExitDomain;
}

// resolve

struct ResolveArgs {
  std::string file;
  long line = 0;
  long col = 0;
  std::string mode;
  std::string bib;
  std::string key_style;
  std::string order;
  bool dry_run = false;
  std::size_t pick = 0;
  std::size_t max_results = kDefaultMaxResults;
  bool json = false;
  NetOptions net;
};

int cmd_resolve(const GlobalOptions& g, const ResolveArgs& args, Streams& io) {
  const fs::path root = project_root(g);
  const Config config = project_config(g);

  ResolveOptions resolve_options;
  resolve_options.mode = parse_enum_flag<SearchMode>(args.mode, &parse_search_mode, "mode");
  resolve_options.max_results = args.max_results;
  SelectOptions select_options;
  select_options.key_style = parse_enum_flag<KeyStyle>(args.key_style, &parse_key_style, "key style");
  select_options.order_policy = parse_enum_flag<OrderPolicy>(args.order, &parse_order_policy, "order policy");
  if (!args.bib.empty()) select_options.target_bib = args.bib;
  select_options.dry_run = args.dry_run;

  const fs::path file = fs::absolute(args.file).lexically_normal();
  SourceDocument doc{file.string(), read_file(file)};
  const std::size_t offset = offset_for(doc.text, args.line, args.col);

  const Engine engine(make_client(config, args.net, io.err), config, root);
  const ResolveOutcome outcome = engine.resolve(doc, offset, resolve_options);

  std::optional<std::size_t> pick;
  if (args.pick > 0) {
    if (args.pick > outcome.candidates.size()) {
      throw Error(ErrorKind::InvalidArgument, "--pick " + std::to_string(args.pick) + " but only " +
                                                  std::to_string(outcome.candidates.size()) + " candidates");
    }
    pick = args.pick;
  } else if (io.interactive && !args.json) {
    print_candidates(outcome, io.out);
    pick = prompt_pick(outcome.candidates.size(), io);
    if (!pick) {
      io.out << "Cancelled; nothing changed.\n";
      return kExitOk;
    }
  }

  json resolved = wire::resolve_result(outcome);
  relativize(resolved, root);
  if (!pick) {
    if (args.json) {
      io.out << resolved.dump(2) << '\n';
    } else {
      print_candidates(outcome, io.out);
    }
    return kExitOk;
  }

  const AdsRecord& chosen = outcome.candidates[*pick - 1].record;
  const SelectOutcome selected = engine.select_record(doc, offset, chosen, select_options);
  json edit = wire::workspace_edit(selected.edit);
  relativize(edit, root);

  if (args.json) {
    io.out << json{{"resolve", resolved},
                   {"selected", *pick},
                   {"edit", edit},
                   {"written", !args.dry_run}}
                  .dump(2)
           << '\n';
    return kExitOk;
  }
  if (args.pick > 0) print_candidates(outcome, io.out);
  if (args.dry_run) {
    io.out << "Dry run; no files written. Planned edit:\n" << edit.dump(2) << '\n';
    return kExitOk;
  }
  io.out << "Selected " << chosen.bibcode << '\n';
  io.out << "Final key: " << selected.edit.final_key << '\n';
  if (selected.edit.reused_existing) io.out << "Reused the existing bibliography entry\n";
  if (selected.report) {
    for (const auto& path : selected.report->touched) io.out << "Updated " << display_path(path, root) << '\n';
  }
  return kExitOk;
}

// config

int cmd_config_get(const GlobalOptions& g, const std::string& key, Streams& io) {
  const Config config = project_config(g);
  if (!key.empty()) {
    io.out << get_config_value(config, key) << '\n';
    return kExitOk;
  }
  for (const auto& k : config_keys()) io.out << k << '=' << get_config_value(config, k) << '\n';
  return kExitOk;
}

int cmd_config_set(const GlobalOptions& g, const std::vector<std::string>& assignments, Streams& io) {
  const fs::path file = project_root(g) / kConfigFileName;
  Config config = load_config(file);
  for (const auto& a : assignments) {
    const std::size_t eq = a.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidArgument, "expected key=value, got '" + a + "'");
    set_config_value(config, a.substr(0, eq), a.substr(eq + 1));
  }
  save_config(file, config);
  (void)io;
  return kExitOk;
}

// serve

int cmd_serve(const GlobalOptions& g, bool stdio, const NetOptions& net, Streams& io) {
  if (!stdio) throw Error(ErrorKind::InvalidArgument, "serve supports only --stdio");
  const Config config = project_config(g);
  Engine engine(make_client(config, net, io.err), config, project_root(g));
  Session session(engine);
  session.serve(io.in, io.out);
  return kExitOk;
}

// mock-server

struct MockArgs {
  std::string corpus;
  std::string host = "127.0.0.1";
  int port = 0;
  std::int64_t limit = 5000;
  std::int64_t reset_at = 0;
  std::string token;
};

int cmd_mock_server(const MockArgs& args, Streams& io) {
  MockOptions options;
  options.limit = args.limit;
  options.reset_at = args.reset_at;
  if (!args.token.empty()) options.token = args.token;

  // Block the stop signals before any server thread exists so they are
  // delivered only to sigwait below.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  MockScixServer server(load_corpus(args.corpus), options);
  server.start(args.host, args.port);
  io.out << server.base_url() << std::endl;
  int received = 0;
  sigwait(&stop_signals, &received);
  server.stop();
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
        bool interactive) {
  Streams io{in, out, err, interactive};

  CLI::App app{"Resolve rough LaTeX citation placeholders against ADS/SciX", "incite"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--project", g.project, "Project root holding .incite.json")->capture_default_str();
  app.add_option("--api-base", g.api_base, "API base URL (overrides config)");

  ScanArgs scan;
  auto* scan_cmd = app.add_subcommand("scan", "List citation sites whose keys are missing from the bibliography");
  scan_cmd->add_option("paths", scan.paths, ".tex files or directories")->required();
  scan_cmd->add_flag("--json", scan.json, "Machine-readable output");

  ResolveArgs res;
  auto* res_cmd = app.add_subcommand("resolve", "Resolve the citation at a position and apply a selection");
  res_cmd->add_option("file", res.file, ".tex file")->required();
  res_cmd->add_option("line", res.line, "1-based line")->required();
  res_cmd->add_option("col", res.col, "1-based column in characters")->required();
  res_cmd->add_option("--mode", res.mode, "contextual, simple or ads");
  res_cmd->add_option("--bib", res.bib, "Target .bib file, relative to the project root");
  res_cmd->add_option("--key-style", res.key_style, "AuthorYear, authoryear, Author:Year or Bibcode");
  res_cmd->add_option("--order", res.order, "Append, AlphaByKey or YearThenAuthor");
  res_cmd->add_flag("--dry-run", res.dry_run, "Print the planned edit without writing");
  res_cmd->add_option("--pick", res.pick, "Select candidate N without prompting")->check(CLI::PositiveNumber);
  res_cmd->add_option("--max-results", res.max_results, "Candidates to show")
      ->check(CLI::Range(1, 200))
      ->capture_default_str();
  res_cmd->add_flag("--json", res.json, "Machine-readable output");
  auto* res_replay = res_cmd->add_option("--replay", res.net.replay, "Serve API responses from recorded fixtures");
  res_cmd->add_option("--record", res.net.record, "Record API responses as fixtures")->excludes(res_replay);

  auto* config_cmd = app.add_subcommand("config", "Read or change project settings");
  config_cmd->require_subcommand(1);
  std::string get_key;
  auto* get_cmd = config_cmd->add_subcommand("get", "Print one setting, or all of them");
  get_cmd->add_option("key", get_key);
  std::vector<std::string> assignments;
  auto* set_cmd = config_cmd->add_subcommand("set", "Set key=value pairs");
  set_cmd->add_option("assignments", assignments, "key=value")->required();

  bool stdio = false;
  NetOptions serve_net;
  auto* serve_cmd = app.add_subcommand("serve", "Run the JSON-RPC server for editors");
  serve_cmd->add_flag("--stdio", stdio, "Line-delimited JSON-RPC on stdin/stdout");
  auto* serve_replay =
      serve_cmd->add_option("--replay", serve_net.replay, "Serve API responses from recorded fixtures");
  serve_cmd->add_option("--record", serve_net.record, "Record API responses as fixtures")->excludes(serve_replay);

  MockArgs mock;
  auto* mock_cmd = app.add_subcommand("mock-server", "Serve a local stand-in API over a JSON corpus");
  mock_cmd->add_option("--corpus", mock.corpus, "Corpus JSON file")->required();
  mock_cmd->add_option("--host", mock.host)->capture_default_str();
  mock_cmd->add_option("--port", mock.port, "0 picks a free port")->capture_default_str();
  mock_cmd->add_option("--limit", mock.limit, "Daily request limit")->capture_default_str();
  mock_cmd->add_option("--reset-at", mock.reset_at, "X-RateLimit-Reset value (epoch seconds)");
  mock_cmd->add_option("--token", mock.token, "Accept only this bearer token");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitDomain;
  }

  try {
    if (*scan_cmd) return cmd_scan(g, scan, io);
    if (*res_cmd) return cmd_resolve(g, res, io);
    if (*get_cmd) return cmd_config_get(g, get_key, io);
    if (*set_cmd) return cmd_config_set(g, assignments, io);
    if (*serve_cmd) return cmd_serve(g, stdio, serve_net, io);
    if (*mock_cmd) return cmd_mock_server(mock, io);
    err << app.help();
  } catch (const Error& e) {
    err << "incite: " << e.what();
    if (e.reset_at()) err << " (limit resets at " << *e.reset_at() << ")";
    err << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "incite: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitDomain;
}

}  // namespace incite::cli
