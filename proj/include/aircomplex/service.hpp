#pragma once

// Analysis service: content-addressed scenario store, synchronous runs and
// the HTTP routes the explorer UI talks to.

#include <aircomplex/error.hpp>
#include <aircomplex/pipeline.hpp>
#include <aircomplex/trajectory.hpp>

#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>

namespace aircomplex {

namespace detail {

inline std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

inline std::string shortest(double x) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

inline std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write-then-rename so concurrent readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& p, std::string_view data) {
  std::filesystem::create_directories(p.parent_path());
  auto tmp = p;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

inline bool valid_id(std::string_view id) {
  if (id.empty() || id.size() > 128) return false;
  for (char c : id)
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  return true;
}

} // namespace detail

/// Canonical CSV form of a log: header, rows ordered by (time, callsign),
/// shortest round-trip number formatting.
inline std::string canonical_csv(const TrajectoryLog& log) {
  std::string out(kLogHeader);
  out.push_back('\n');
  for (const auto& s : log.states) {
    out += detail::shortest(s.time) + ',' + s.callsign + ',' + detail::shortest(s.latitude) + ',' +
           detail::shortest(s.longitude) + ',' + detail::shortest(s.altitude) + '\n';
  }
  return out;
}

struct ScenarioInfo {
  std::string id;
  std::size_t aircraft_count = 0;
  std::size_t rows = 0;
  double t_start = 0.0;
  double t_end = 0.0;
};

inline nlohmann::ordered_json scenario_info_json(const ScenarioInfo& s) {
  return {{"id", s.id},       {"aircraft_count", s.aircraft_count}, {"rows", s.rows},
          {"t_start_s", s.t_start}, {"t_end_s", s.t_end}};
}

/// Append-only scenario store. Scenarios are addressed by the SHA-256 of
/// their canonical CSV and persisted under `<data_dir>/scenarios/` when a
/// data directory is given.
class ScenarioStore {
public:
  explicit ScenarioStore(std::filesystem::path data_dir = {}) : dir_(std::move(data_dir)) {}

  ScenarioInfo create(std::string_view bytes) {
    auto log = std::make_shared<const TrajectoryLog>(parse_log(bytes));
    const auto canonical = canonical_csv(*log);
    const auto id = detail::sha256_hex(canonical).substr(0, 32);
    {
      std::unique_lock lock(mutex_);
      if (!cache_.contains(id)) {
        if (!dir_.empty()) {
          const auto path = file_for(id);
          if (!std::filesystem::exists(path)) detail::write_file_atomic(path, canonical);
        }
        cache_.emplace(id, log);
      }
    }
    return info(id, *log);
  }

  std::shared_ptr<const TrajectoryLog> get(const std::string& id) const {
    {
      std::shared_lock lock(mutex_);
      if (auto it = cache_.find(id); it != cache_.end()) return it->second;
    }
    if (dir_.empty() || !detail::valid_id(id)) throw UnknownScenario("unknown scenario '" + id + "'");
    const auto bytes = detail::read_file(file_for(id));
    if (!bytes) throw UnknownScenario("unknown scenario '" + id + "'");
    auto log = std::make_shared<const TrajectoryLog>(parse_log(*bytes));
    std::unique_lock lock(mutex_);
    return cache_.emplace(id, std::move(log)).first->second;
  }

  ScenarioInfo describe(const std::string& id) const { return info(id, *get(id)); }

private:
  static ScenarioInfo info(const std::string& id, const TrajectoryLog& log) {
    return {id, log.aircraft_count(), log.states.size(), log.t_start, log.t_end};
  }

  std::filesystem::path file_for(const std::string& id) const { return dir_ / "scenarios" / (id + ".csv"); }

  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::string, std::shared_ptr<const TrajectoryLog>> cache_;
};

enum class RunStatus { pending, done, failed };

constexpr std::string_view to_string(RunStatus s) {
  switch (s) {
  case RunStatus::pending: return "pending";
  case RunStatus::done: return "done";
  case RunStatus::failed: return "failed";
  }
  return "?";
}

inline constexpr std::array<std::string_view, 5> kRunArtifacts{"frames", "communities", "heatmap", "summary",
                                                               "summary_file"};

struct RunRecord {
  std::string run_id;
  std::string scenario_id;
  RunRequest request;
  RunStatus status = RunStatus::pending;
  std::string error;
  std::map<std::string, std::string, std::less<>> artifacts;
};

/// Transport-independent facade; the HTTP layer and tests both drive it.
class AnalysisService {
public:
  explicit AnalysisService(std::filesystem::path data_dir = {}) : dir_(data_dir), scenarios_(std::move(data_dir)) {}

  ScenarioInfo create_scenario(std::string_view bytes) { return scenarios_.create(bytes); }
  ScenarioInfo get_scenario(const std::string& id) const { return scenarios_.describe(id); }
  ScenarioStore& scenarios() { return scenarios_; }

  /// Runs synchronously. Identical (scenario, request) pairs map to the same
  /// run id and byte-identical artifacts.
  std::string create_run(const std::string& scenario_id, RunRequest request) {
    const auto log = scenarios_.get(scenario_id);
    request.validate(log.get());
    std::sort(request.exclude.begin(), request.exclude.end());
    request.exclude.erase(std::unique(request.exclude.begin(), request.exclude.end()), request.exclude.end());
    const auto key = scenario_id + "\n" + request_json(request).dump();
    const auto run_id = detail::sha256_hex(key).substr(0, 32);
    if (find_run(run_id)) return run_id;

    auto rec = std::make_shared<RunRecord>();
    rec->run_id = run_id;
    rec->scenario_id = scenario_id;
    rec->request = request;
    try {
      const auto out = run_analysis(*log, request);
      rec->artifacts.emplace("frames", frames_json(out).dump() + "\n");
      rec->artifacts.emplace("communities", communities_json(out.archive).dump() + "\n");
      rec->artifacts.emplace("heatmap", heatmap_json(out.heatmap).dump() + "\n");
      rec->artifacts.emplace("summary", summary_json(out.summary).dump() + "\n");
      rec->artifacts.emplace("summary_file", export_summary_file(out.summary));
      rec->status = RunStatus::done;
    } catch (const std::exception& e) {
      rec->status = RunStatus::failed;
      rec->error = e.what();
      rec->artifacts.clear();
    }
    if (!dir_.empty() && rec->status == RunStatus::done) persist(*rec);
    std::unique_lock lock(mutex_);
    runs_.emplace(run_id, rec);
    return run_id;
  }

  std::shared_ptr<const RunRecord> get_run(const std::string& run_id) const {
    if (auto r = find_run(run_id)) return r;
    throw UnknownRun("unknown run '" + run_id + "'");
  }

  std::string get_run_artifact(const std::string& run_id, std::string_view which) const {
    const auto run = get_run(run_id);
    if (run->status != RunStatus::done) throw NotReady("run '" + run_id + "' is " + std::string(to_string(run->status)));
    const auto it = run->artifacts.find(which);
    if (it == run->artifacts.end()) throw InvalidParams("unknown artifact '" + std::string(which) + "'");
    return it->second;
  }

  static nlohmann::ordered_json run_json(const RunRecord& r) {
    nlohmann::ordered_json j;
    j["run_id"] = r.run_id;
    j["scenario_id"] = r.scenario_id;
    j["status"] = to_string(r.status);
    j["request"] = request_json(r.request);
    if (!r.error.empty()) j["error"] = r.error;
    nlohmann::ordered_json names = nlohmann::ordered_json::array();
    for (const auto& [name, bytes] : r.artifacts) names.push_back(name);
    j["artifacts"] = std::move(names);
    return j;
  }

private:
  std::shared_ptr<const RunRecord> find_run(const std::string& run_id) const {
    {
      std::shared_lock lock(mutex_);
      if (auto it = runs_.find(run_id); it != runs_.end()) return it->second;
    }
    if (dir_.empty() || !detail::valid_id(run_id)) return nullptr;
    const auto base = dir_ / "runs" / run_id;
    const auto meta = detail::read_file(base / "run.json");
    if (!meta) return nullptr;
    auto rec = std::make_shared<RunRecord>();
    try {
      const auto j = nlohmann::json::parse(*meta);
      rec->run_id = run_id;
      rec->scenario_id = j.at("scenario_id").get<std::string>();
      rec->request = request_from_json(j.at("request"));
      rec->status = RunStatus::done;
      for (auto name : kRunArtifacts) {
        auto bytes = detail::read_file(base / (std::string(name) + ".json"));
        if (!bytes) return nullptr;
        rec->artifacts.emplace(std::string(name), std::move(*bytes));
      }
    } catch (const std::exception&) {
      return nullptr;
    }
    std::unique_lock lock(mutex_);
    return runs_.emplace(run_id, std::move(rec)).first->second;
  }

  void persist(const RunRecord& rec) const {
    const auto base = dir_ / "runs" / rec.run_id;
    for (const auto& [name, bytes] : rec.artifacts) detail::write_file_atomic(base / (name + ".json"), bytes);
    // run.json last: its presence marks a complete run directory.
    detail::write_file_atomic(base / "run.json", run_json(rec).dump(2) + "\n");
  }

  std::filesystem::path dir_;
  ScenarioStore scenarios_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::string, std::shared_ptr<const RunRecord>> runs_;
};

namespace detail {

inline int http_status(const Error& e) {
  const std::string_view kind = e.kind();
  if (kind == "UnknownScenario" || kind == "UnknownRun") return 404;
  if (kind == "NotReady") return 409;
  return 422;
}

inline void send_json(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline void send_error(httplib::Response& res, const Error& e) {
  nlohmann::ordered_json body{{"error", e.kind()}, {"message", e.what()}};
  if (const auto* row = dynamic_cast<const MalformedRow*>(&e)) body["line"] = row->line();
  send_json(res, http_status(e), body);
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    send_error(res, e);
  } catch (const nlohmann::json::exception& e) {
    send_json(res, 400, {{"error", "BadRequest"}, {"message", e.what()}});
  } catch (const std::exception& e) {
    send_json(res, 500, {{"error", "Internal"}, {"message", e.what()}});
  }
}

} // namespace detail

/// Registers the HTTP API on `server`. When `ui_dir` names a directory it is
/// served at "/".
inline void mount_routes(httplib::Server& server, AnalysisService& service,
                         const std::filesystem::path& ui_dir = {}) {
  using detail::guarded;
  using detail::send_json;

  server.Post("/scenarios", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::string csv = req.body;
      if (req.get_header_value("Content-Type").starts_with("application/json"))
        csv = nlohmann::json::parse(req.body).at("csv").get<std::string>();
      send_json(res, 201, scenario_info_json(service.create_scenario(csv)));
    });
  });

  server.Get(R"(/scenarios/([0-9a-zA-Z]+))", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, scenario_info_json(service.get_scenario(req.matches[1]))); });
  });

  server.Post("/runs", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = nlohmann::json::parse(req.body);
      const auto scenario_id = body.at("scenario_id").get<std::string>();
      const auto run_id = service.create_run(scenario_id, request_from_json(body));
      send_json(res, 201, AnalysisService::run_json(*service.get_run(run_id)));
    });
  });

  server.Get(R"(/runs/([0-9a-zA-Z]+))", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, AnalysisService::run_json(*service.get_run(req.matches[1]))); });
  });

  const auto artifact_route = [&server, &service](const std::string& path, std::string which) {
    server.Get(R"(/runs/([0-9a-zA-Z]+)/)" + path,
               [&service, which](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   const std::string run_id = req.matches[1];
                   res.set_content(service.get_run_artifact(run_id, which), "application/json");
                   if (which == "summary_file") {
                     res.set_header("Content-Disposition",
                                    "attachment; filename=\"summary-" + run_id + ".json\"");
                   }
                 });
               });
  };
  artifact_route("frames", "frames");
  artifact_route("communities", "communities");
  artifact_route("heatmap", "heatmap");
  artifact_route("summary", "summary");
  artifact_route("summary-file", "summary_file");

  if (!ui_dir.empty() && std::filesystem::is_directory(ui_dir)) server.set_mount_point("/", ui_dir.string());
}

struct ServiceConfig {
  std::filesystem::path data_dir = "data";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path ui_dir;

  /// AIRCOMPLEX_DATA_DIR, AIRCOMPLEX_BIND (host:port), AIRCOMPLEX_UI_DIR.
  static ServiceConfig from_environment() {
    ServiceConfig c;
    if (const char* d = std::getenv("AIRCOMPLEX_DATA_DIR")) c.data_dir = d;
    if (const char* b = std::getenv("AIRCOMPLEX_BIND")) {
      const std::string bind = b;
      const auto colon = bind.rfind(':');
      if (colon == std::string::npos) throw InvalidParams("AIRCOMPLEX_BIND must be host:port");
      c.host = bind.substr(0, colon);
      c.port = std::stoi(bind.substr(colon + 1));
    }
    if (const char* u = std::getenv("AIRCOMPLEX_UI_DIR")) c.ui_dir = u;
    return c;
  }
};

} // namespace aircomplex
