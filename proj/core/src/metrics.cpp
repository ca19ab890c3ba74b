#include "psvr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "psvr/errors.hpp"

namespace psvr {

double gain(std::size_t b, std::size_t a) {
  if (a == 0) throw MetricError("gain is undefined against a zero message count");
  return 100.0 * static_cast<double>(b) / static_cast<double>(a) - 100.0;
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string out(buf);
  // Avoid printing "-0.00".
  if (out.find_first_not_of("-0.") == std::string::npos && out.front() == '-') out.erase(0, 1);
  return out;
}

HopHistogram hop_histogram(std::span<const std::size_t> hops) {
  HopHistogram h;
  for (std::size_t x : hops) {
    if (x >= h.counts.size()) h.counts.resize(x + 1, 0);
    ++h.counts[x];
  }
  h.total = hops.size();
  if (h.total) {
    h.mean = static_cast<double>(std::accumulate(hops.begin(), hops.end(), std::size_t{0})) /
             static_cast<double>(h.total);
  }
  return h;
}

HopHistogram hop_histogram(const TraceLedger& ledger) {
  std::vector<std::size_t> hops;
  for (const auto& rec : ledger.publications()) {
    for (const auto& d : rec.deliveries) hops.push_back(d.hops);
  }
  return hop_histogram(hops);
}

std::vector<WindowRatio> delivery_ratio(const TraceLedger& ledger, Tick window) {
  if (window <= 0) throw MetricError("window must be positive");
  std::vector<WindowRatio> out;
  if (ledger.publications().empty()) return out;

  Tick last = 0;
  for (const auto& rec : ledger.publications()) last = std::max(last, rec.time);
  const auto count = static_cast<std::size_t>(last / window) + 1;
  out.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k].start = static_cast<Tick>(k) * window;
    out[k].end = out[k].start + window;
  }
  for (const auto& rec : ledger.publications()) {
    auto& w = out[static_cast<std::size_t>(rec.time / window)];
    w.expected += rec.expected.size();
    for (NodeId v : rec.expected) {
      if (rec.delivery_count(v) > 0) ++w.delivered;
    }
  }
  for (const auto& e : ledger.events()) {
    const bool disturbance =
        e.kind == EventKind::kFault || e.kind == EventKind::kEpoch || e.kind == EventKind::kLossChange;
    if (!disturbance || e.time < 0) continue;
    const auto k = static_cast<std::size_t>(e.time / window);
    if (k < out.size()) out[k].disturbed = true;
  }
  for (auto& w : out) {
    if (w.expected) w.percent = 100.0 * static_cast<double>(w.delivered) / static_cast<double>(w.expected);
  }
  return out;
}

Summary summarize(std::vector<double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.median = quantile(0.5);
  s.q1 = quantile(0.25);
  s.q3 = quantile(0.75);
  s.min = values.front();
  s.max = values.back();
  return s;
}

}  // namespace psvr
