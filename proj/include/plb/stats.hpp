#pragma once

#include <span>
#include <string>

namespace plb {

/// Mean and confidence-interval half-width, in seconds.
struct Summary {
  double mean = 0.0;
  double ci = 0.0;
};

/// Student-t summary; needs at least two samples.
Summary summarize(std::span<const double> samples, double confidence = 0.99);

/// Two-sided Student-t critical value for `df` degrees of freedom.
double t_critical(double confidence, double df);

struct RatioCell {
  double value = 0.0;
  double ci = 0.0;
  bool reference = false;  // x over x: rendered without a CI
};

/// num.mean / den.mean with relative half-widths combined in quadrature.
RatioCell ratio(const Summary& num, const Summary& den);
RatioCell reference_ratio();

// Cell text. Plain: "0.933s ± 0.002", "2.189× ± 0.009", "1.000×", "n/a".
std::string format_absolute(const Summary& s);
std::string format_ratio(const RatioCell& r);
// LaTeX: "0.933s & {\tiny$\pm 0.002$}", "2.189$\times$ & {\tiny$\pm 0.009$}",
// "1.000$\times$ & ~~", "n/a & ~~".
std::string latex_absolute(const Summary& s);
std::string latex_ratio(const RatioCell& r);
inline constexpr const char* kNotAvailable = "n/a";
inline constexpr const char* kLatexNotAvailable = "n/a & ~~";

}  // namespace plb
