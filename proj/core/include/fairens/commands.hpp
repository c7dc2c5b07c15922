#pragma once
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace fairens::cli {

/// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_runtime = 3;

struct ValidateArgs {
  std::filesystem::path config;
};

struct RunArgs {
  std::filesystem::path config;
  /// Flag overrides; only scalars can be overridden.
  std::optional<std::string> output_dir;
  std::optional<int> jobs;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
};

struct SelectArgs {
  std::filesystem::path config;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
};

struct AnalyzeArgs {
  std::filesystem::path records;
  /// standardize | tables | resources | guidance
  std::string mode = "tables";
  std::optional<std::filesystem::path> out_dir;
  /// Dataset facts for guidance; defaults to run_meta.json next to the
  /// record file.
  std::optional<std::filesystem::path> meta;
};

struct DemoArgs {
  std::filesystem::path output_dir = "demo-out";
  std::uint64_t seed = 7;
  int jobs = 1;
};

struct FetchArgs {
  /// Catalog id or a numeric OpenML dataset id.
  std::string id;
  std::optional<std::filesystem::path> cache_dir;
};

/// Each command returns its process exit code. Machine-readable output
/// goes to `out`, human logs and the structured error object to `err`.
int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err);
int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err);
int cmd_select(const SelectArgs& a, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err);
int cmd_guidance(const AnalyzeArgs& a, std::ostream& out, std::ostream& err);
int cmd_demo(const DemoArgs& a, std::ostream& out, std::ostream& err);
int cmd_fetch(const FetchArgs& a, std::ostream& out, std::ostream& err);

}  // namespace fairens::cli
