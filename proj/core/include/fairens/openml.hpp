#pragma once
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "fairens/dataset.hpp"

namespace fairens {

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Pluggable GET so tests can stub out the network.
using HttpGet = std::function<HttpResponse(const std::string& url)>;

/// GET via the bundled HTTP client (HTTPS when built with OpenSSL).
HttpResponse default_http_get(const std::string& url);

/// Resolve the dataset cache directory: the FAIRENS_CACHE environment
/// variable wins over the configured value, which defaults to
/// ".fairens-cache" in the working directory.
std::filesystem::path resolve_cache_dir(const std::filesystem::path& configured);

struct OpenMlFetchResult {
  Dataset data;
  std::string name;
  std::string target;  // default target attribute advertised by the repository
  bool from_cache = false;
};

/// Downloads a dataset description plus its ARFF/CSV payload, keeping the
/// raw bytes in <cache>/openml/<id>.raw with a <id>.meta.json sidecar.
/// With a warm cache no network request is made. A lock file serializes
/// concurrent writers of the same cache entry.
class OpenMlClient {
 public:
  explicit OpenMlClient(std::filesystem::path cache_dir, HttpGet http = default_http_get);

  OpenMlFetchResult fetch(long id) const;

  /// True when both cache files for the id exist.
  bool cached(long id) const;

 private:
  std::filesystem::path dir_;
  HttpGet http_;
};

}  // namespace fairens
