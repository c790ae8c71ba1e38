#include "plb/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace plb {

namespace {

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

double t_critical(double confidence, double df) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must be in (0, 1)");
  boost::math::students_t dist(df);
  return boost::math::quantile(dist, 1.0 - (1.0 - confidence) / 2.0);
}

Summary summarize(std::span<const double> samples, double confidence) {
  if (samples.size() < 2) throw std::invalid_argument("summarize needs at least two samples");
  auto n = static_cast<double>(samples.size());
  double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  double sd = std::sqrt(ss / (n - 1.0));
  return {mean, t_critical(confidence, n - 1.0) * sd / std::sqrt(n)};
}

RatioCell ratio(const Summary& num, const Summary& den) {
  if (!(den.mean > 0.0)) throw std::invalid_argument("ratio denominator must be positive");
  double value = num.mean / den.mean;
  double rn = num.mean != 0.0 ? num.ci / num.mean : 0.0;
  double rd = den.ci / den.mean;
  return {value, std::abs(value) * std::sqrt(rn * rn + rd * rd), false};
}

RatioCell reference_ratio() { return {1.0, 0.0, true}; }

std::string format_absolute(const Summary& s) { return fixed3(s.mean) + "s ± " + fixed3(s.ci); }

std::string format_ratio(const RatioCell& r) {
  std::string v = fixed3(r.value) + "×";
  return r.reference ? v : v + " ± " + fixed3(r.ci);
}

std::string latex_absolute(const Summary& s) {
  return fixed3(s.mean) + "s & {\\tiny$\\pm " + fixed3(s.ci) + "$}";
}

std::string latex_ratio(const RatioCell& r) {
  std::string v = fixed3(r.value) + "$\\times$ & ";
  return r.reference ? v + "~~" : v + "{\\tiny$\\pm " + fixed3(r.ci) + "$}";
}

}  // namespace plb
