#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace faota {

/// A sampled closed-form function together with the parameters that produced it.
///
/// CSV form: header `abscissa,value`, one row per sample.
/// JSON form: {"meta": {...}, "abscissae": [...], "values": [...]}.
struct AnalyticCurve {
  std::vector<double> abscissae;
  std::vector<double> values;
  nlohmann::json meta = nlohmann::json::object();

  /// Throws DimensionError/ValidationError if lengths differ or abscissae are unsorted.
  void validate() const;
  /// Additionally checks values in [0, 1] and nondecreasing.
  void validate_cdf() const;

  void write_csv(std::ostream& os) const;
  nlohmann::json to_json() const;
  static AnalyticCurve from_json(const nlohmann::json& j);
};

/// Shortest decimal text that round-trips the double, used by every CSV writer
/// so output bytes are stable. Nonfinite values print as "nan"/"inf"/"-inf".
std::string format_double(double v);

/// `n` points log-spaced over [lo, hi], endpoints exact.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

}  // namespace faota
