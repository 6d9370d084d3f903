#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "hypermane/json_io.hpp"

namespace hypermane {

enum class Command { geodesic, hyperbolic, verify };

const char* command_name(Command c);

/// One self-describing problem file.
struct ProblemSpec {
  Command command = Command::geodesic;
  Layout layout;
  PotentialSpec potential;
  double lambda = 0.5;
  std::optional<Vec> x;
  std::optional<Vec> y;
  /// Unit direction (normalized by the parser).
  std::optional<Vec> a;
  Mode mode = Mode::exploratory;
  int n_from = 0;
  int n_to = 0;
  std::optional<int> j_max;
  double horizon = 0.0;
  SolveOptions solver;
  std::filesystem::path output_dir = "out";
  int workers = 1;
  std::uint64_t seed = 0;
  /// Sample count for the verification suite.
  int samples = 20;

  /// Throws InputDomainError naming the offending field.
  void validate() const;
};

ProblemSpec parse_problem_spec(const Json& j, const std::filesystem::path& base_dir = ".");
ProblemSpec load_problem_spec(const std::filesystem::path& path);

}  // namespace hypermane
