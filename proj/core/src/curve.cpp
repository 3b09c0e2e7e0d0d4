#include "faota/curve.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "faota/errors.hpp"

namespace faota {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo)) throw DomainError("log grid needs 0 < lo <= hi");
  if (n == 0) throw DomainError("log grid needs at least one point");
  if (n == 1) return {lo};
  std::vector<double> grid(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

void AnalyticCurve::validate() const {
  if (abscissae.size() != values.size()) {
    throw DimensionError("curve abscissae and values differ in length");
  }
  for (std::size_t i = 1; i < abscissae.size(); ++i) {
    if (!(abscissae[i - 1] <= abscissae[i])) throw ValidationError("curve abscissae not sorted");
  }
}

void AnalyticCurve::validate_cdf() const {
  validate();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0 && values[i] <= 1.0)) {
      throw ValidationError("CDF value outside [0, 1]");
    }
    if (i > 0 && values[i] < values[i - 1]) throw ValidationError("CDF decreases");
  }
}

void AnalyticCurve::write_csv(std::ostream& os) const {
  validate();
  os << "abscissa,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    os << format_double(abscissae[i]) << ',' << format_double(values[i]) << '\n';
  }
}

nlohmann::json AnalyticCurve::to_json() const {
  validate();
  return {{"meta", meta}, {"abscissae", abscissae}, {"values", values}};
}

AnalyticCurve AnalyticCurve::from_json(const nlohmann::json& j) {
  AnalyticCurve c;
  c.abscissae = j.at("abscissae").get<std::vector<double>>();
  c.values = j.at("values").get<std::vector<double>>();
  if (j.contains("meta")) c.meta = j.at("meta");
  c.validate();
  return c;
}

}  // namespace faota
