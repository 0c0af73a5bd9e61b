#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mtms::cli {

// Toy sizes; frames is capped at 16 and filters at 8.
struct GradcheckOptions {
  std::uint64_t seed = 0;
  int frames = 12;
  int filters = 6;
  double tolerance = 1e-4;
  double step = 1e-5;  // central difference step
  // Corrupts one analytic gradient entry per op, to prove failures surface.
  bool inject_fault = false;
};

struct GradcheckLine {
  std::string op;
  double max_rel_error = 0.0;
  std::size_t entries = 0;
  bool passed = false;
  // Input index, flat entry index and both gradients at the worst entry.
  std::size_t worst_input = 0;
  long worst_entry = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Every differentiable tape op plus the full architectures, each checked
// against central differences with respect to all of its inputs.
std::vector<GradcheckLine> run_gradcheck_suite(const GradcheckOptions& options);

}  // namespace mtms::cli
