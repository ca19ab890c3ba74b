#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "psvr/metrics.hpp"

namespace psvr {

enum class Baseline { kNaiveRing, kTd, kTs, kShen };

inline constexpr Baseline kAllBaselines[] = {Baseline::kNaiveRing, Baseline::kTd, Baseline::kTs, Baseline::kShen};

std::string to_string(Baseline b);
/// Accepts ring, td, ts and shen.
std::optional<Baseline> baseline_from_string(const std::string& text);

struct SweepGrid {
  std::vector<std::size_t> nodes;
  std::vector<double> edge_probs;
  std::vector<std::size_t> subscribers;
  std::size_t seeds = 1;
  std::uint64_t base_seed = 1;
  /// 0 uses the hardware concurrency.
  std::size_t threads = 1;
};

/// One generated topology with one publisher and `subscribers` subscribers,
/// routed by the ring protocol and by every baseline.
struct InstanceOutcome {
  std::size_t nodes = 0;
  double edge_prob = 0.0;
  std::size_t subscribers = 0;
  std::uint64_t seed = 0;
  /// False when generation failed; `note` says why.
  bool ok = false;
  std::string note;

  std::size_t ring_length = 0;
  std::size_t psvr_tx = 0;
  double psvr_hops = 0.0;
  bool psvr_exactly_once = false;
  bool shen_exactly_once = false;
  /// Indexed by Baseline.
  std::size_t baseline_tx[4] = {};
  double baseline_hops[4] = {};

  std::size_t tx(Baseline b) const { return baseline_tx[static_cast<int>(b)]; }
  double hops(Baseline b) const { return baseline_hops[static_cast<int>(b)]; }
};

struct CellSummary {
  std::size_t nodes = 0;
  double edge_prob = 0.0;
  std::size_t subscribers = 0;
  Baseline baseline = Baseline::kTd;
  /// Instances without a defined gain (generation failure or zero baseline messages).
  std::size_t skipped = 0;
  Summary gain;
  double psvr_hops = 0.0;
  double baseline_hops = 0.0;
};

struct SweepResult {
  std::vector<InstanceOutcome> instances;
  std::vector<CellSummary> cells;
};

/// Builds and routes one instance; never throws for generation failures.
InstanceOutcome run_instance(std::size_t nodes, double edge_prob, std::size_t subscribers, std::uint64_t seed);

/// Every grid cell × seed. Output order is the grid order regardless of threads.
SweepResult sweep(const SweepGrid& grid);

/// Per-cell statistics for one baseline over a set of instances.
CellSummary summarize_cell(const std::vector<const InstanceOutcome*>& instances, Baseline baseline);

void write_instances_csv(std::ostream& out, const SweepResult& result);
/// Restricted to one baseline when `only` is set.
void write_cells_csv(std::ostream& out, const SweepResult& result, std::optional<Baseline> only = std::nullopt);

}  // namespace psvr
