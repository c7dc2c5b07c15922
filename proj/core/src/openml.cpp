#include "fairens/openml.hpp"

#include <chrono>
#include <fcntl.h>
#include <fstream>
#include <sstream>
#include <thread>
#include <unistd.h>

#include <httplib.h>
#include <json.hpp>

#include "fairens/arff.hpp"
#include "fairens/csvio.hpp"

namespace fairens {

namespace fs = std::filesystem;
using nlohmann::json;

HttpResponse default_http_get(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw FetchError("bad url: " + url);
  std::string scheme = url.substr(0, scheme_end);
  std::string rest = url.substr(scheme_end + 3);
  auto slash = rest.find('/');
  std::string host = slash == std::string::npos ? rest : rest.substr(0, slash);
  std::string path = slash == std::string::npos ? "/" : rest.substr(slash);

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https")
    throw FetchError("https not available in this build (OpenSSL missing): " + url);
#endif
  auto run = [&](auto& cli) -> HttpResponse {
    cli.set_follow_location(true);
    cli.set_connection_timeout(10);
    cli.set_read_timeout(60);
    auto res = cli.Get(path.c_str());
    if (!res) throw FetchError("request failed for " + url);
    return HttpResponse{res->status, res->body};
  };
  if (scheme == "https") {
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
    httplib::SSLClient cli(host);
    cli.enable_server_certificate_verification(false);
    return run(cli);
#endif
  }
  httplib::Client cli(host);
  return run(cli);
}

fs::path resolve_cache_dir(const fs::path& configured) {
  if (const char* env = std::getenv("FAIRENS_CACHE"); env && *env) return fs::path(env);
  if (!configured.empty()) return configured;
  return fs::path(".fairens-cache");
}

namespace {

/// Exclusive-create lock file released on destruction.
class FileLock {
 public:
  explicit FileLock(fs::path p) : path_(std::move(p)) {
    for (int attempt = 0; attempt < 300; ++attempt) {
      int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
      if (fd >= 0) { ::close(fd); held_ = true; return; }
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    throw FetchError("could not acquire cache lock " + path_.string() +
                     " (stale lock? remove it manually)");
  }
  ~FileLock() {
    if (held_) {
      std::error_code ec;
      fs::remove(path_, ec);
    }
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  fs::path path_;
  bool held_ = false;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FetchError("cannot read cache file " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw FetchError("cannot write cache file " + p.string());
  out << content;
}

}  // namespace

OpenMlClient::OpenMlClient(fs::path cache_dir, HttpGet http)
    : dir_(std::move(cache_dir)), http_(std::move(http)) {}

bool OpenMlClient::cached(long id) const {
  fs::path base = dir_ / "openml";
  return fs::exists(base / (std::to_string(id) + ".raw")) &&
         fs::exists(base / (std::to_string(id) + ".meta.json"));
}

OpenMlFetchResult OpenMlClient::fetch(long id) const {
  fs::path base = dir_ / "openml";
  fs::create_directories(base);
  fs::path raw_path = base / (std::to_string(id) + ".raw");
  fs::path meta_path = base / (std::to_string(id) + ".meta.json");

  json meta;
  std::string raw;
  bool from_cache = false;
  if (fs::exists(raw_path) && fs::exists(meta_path)) {
    raw = read_file(raw_path);
    try {
      meta = json::parse(read_file(meta_path));
    } catch (const json::exception& e) {
      throw FetchError("corrupt cache meta for openml id " + std::to_string(id) + ": " + e.what());
    }
    from_cache = true;
  } else {
    std::string desc_url =
        "https://www.openml.org/api/v1/json/data/" + std::to_string(id);
    HttpResponse desc = http_(desc_url);
    if (desc.status != 200)
      throw FetchError("openml id " + std::to_string(id) + ": description request returned " +
                       std::to_string(desc.status));
    json dj;
    try {
      dj = json::parse(desc.body);
    } catch (const json::exception&) {
      throw FetchError("openml id " + std::to_string(id) + ": description is not JSON");
    }
    if (!dj.contains("data_set_description"))
      throw FetchError("openml id " + std::to_string(id) + ": unknown dataset id");
    const json& dd = dj["data_set_description"];
    std::string url = dd.value("url", "");
    if (url.empty())
      throw FetchError("openml id " + std::to_string(id) + ": description lacks a data url");
    HttpResponse payload = http_(url);
    if (payload.status != 200)
      throw FetchError("openml id " + std::to_string(id) + ": data request returned " +
                       std::to_string(payload.status));
    raw = payload.body;
    meta = json{{"id", id},
                {"name", dd.value("name", "")},
                {"url", url},
                {"format", dd.value("format", "ARFF")},
                {"default_target_attribute", dd.value("default_target_attribute", "")}};
    FileLock lock(base / (std::to_string(id) + ".lock"));
    write_file(raw_path, raw);
    write_file(meta_path, meta.dump(2));
  }

  OpenMlFetchResult out;
  out.name = meta.value("name", "");
  out.target = meta.value("default_target_attribute", "");
  out.from_cache = from_cache;
  std::string format = meta.value("format", "ARFF");
  for (auto& ch : format) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  // multi-target descriptions list targets comma-separated; take the first
  std::string target = out.target;
  if (auto comma = target.find(','); comma != std::string::npos) target = target.substr(0, comma);
  if (format == "csv") {
    out.data = parse_csv(raw, target);
  } else {
    out.data = parse_arff(raw, target);
  }
  return out;
}

}  // namespace fairens
