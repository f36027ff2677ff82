#pragma once

#include <functional>

#include "common.hpp"

namespace rydsim {

// Each command reads its options from the config first (so every config
// error surfaces before any work starts) and returns the work to run.
using Runner = std::function<void()>;

Runner parse_ghz_optimize(Node root, const RunContext& ctx);
Runner parse_ghz_evolve(Node root, const RunContext& ctx);
Runner parse_gate_bench(Node root, const RunContext& ctx);
Runner parse_decay(Node root, const RunContext& ctx);
Runner parse_mpp(Node root, const RunContext& ctx);
Runner parse_analyze(Node root, const RunContext& ctx);

}  // namespace rydsim
