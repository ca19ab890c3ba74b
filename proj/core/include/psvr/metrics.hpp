#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psvr/ledger.hpp"

namespace psvr {

/// Message gain in percent, 100·B/A − 100. Throws MetricError when A = 0.
double gain(std::size_t b, std::size_t a);

/// Two decimals, e.g. "-41.67".
std::string format_fixed(double value, int decimals = 2);

struct HopHistogram {
  /// counts[h] = deliveries that took h hops; counts[0] stays 0 for routed deliveries.
  std::vector<std::size_t> counts;
  std::size_t total = 0;
  double mean = 0.0;
};

HopHistogram hop_histogram(std::span<const std::size_t> hops);
/// Over every delivery recorded in the ledger.
HopHistogram hop_histogram(const TraceLedger& ledger);

struct WindowRatio {
  Tick start = 0;
  Tick end = 0;
  /// (publication, expected subscriber) pairs published in the window.
  std::size_t expected = 0;
  /// Pairs among those with at least one delivery.
  std::size_t delivered = 0;
  /// Empty when nothing was expected.
  std::optional<double> percent;
  /// A fault, rebuild or loss change happened inside the window.
  bool disturbed = false;
};

/// Delivery ratio per window of publication time, from time 0 to the last
/// publication. Throws MetricError when `window` is not positive.
std::vector<WindowRatio> delivery_ratio(const TraceLedger& ledger, Tick window);

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Mean and linearly interpolated quartiles. Empty input gives a zero summary.
Summary summarize(std::vector<double> values);

}  // namespace psvr
