#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gbeam/rng.hpp"
#include "gbeam/types.hpp"

namespace gbeam {

enum class MediumKind { constant, gaussian_bump, multi_bump };

struct GaussianBump {
  double amplitude = 0.0;  // A, |A| < 1
  double sigma = 0.25;
  Vec center;
};

// Smooth index of refraction n(x) with n^2 = 1 + sum_i A_i g_i(x) chi(|x|/R),
// g_i a Gaussian of width sigma_i centered at c_i and chi the plateau cutoff
// (identically 1 on [0,1/2], 0 on [1,inf)), so n == 1 exactly for |x| > R.
struct MediumModel {
  MediumKind kind = MediumKind::constant;
  std::vector<GaussianBump> bumps;
  double support_radius = 1.0;  // R
  int dim = 2;

  // Certified lower bound on n (conservative: ignores positive bumps).
  double min_index() const;
  bool is_constant() const { return kind == MediumKind::constant || bumps.empty(); }
};

struct MediumEval {
  double n = 1.0;
  double n2 = 1.0;
  Vec grad_n2;
  Mat hess_n2;
};

MediumModel make_constant_medium(int dim, double R = 1.0);
MediumModel make_gaussian_bump_medium(int dim, double A, double sigma, const Vec& center, double R);

// Throws SchemaError on invalid data (|A| >= 1, total negative perturbation
// too close to -1, bad dimension, nonpositive widths).
void validate_medium(const MediumModel& m);

MediumEval eval_medium(const MediumModel& m, const Vec& x);
double eval_n2(const MediumModel& m, const Vec& x);
inline double eval_n(const MediumModel& m, const Vec& x) { return std::sqrt(eval_n2(m, x)); }

// JSON schema: {"kind": "...", "bumps": [{"A":..,"sigma":..,"center":[..]}],
//               "R":.., "dim":..}
MediumModel medium_from_json(const nlohmann::json& j);
nlohmann::json medium_to_json(const MediumModel& m);

struct EscapeReport {
  double L = 0.0;  // max parameter at which a sampled ray first has |x| > 2R
  bool ok = false;
  int samples = 0;
  double s_max = 0.0;
  std::uint64_t seed = 0;
  struct RaySample {
    Vec x0, p0;
    double escape_s = -1.0;
    bool escaped = false;
  };
  std::vector<RaySample> rays;
};

// Integrates the bicharacteristic flow from a quasi-uniform sample of starts
// |x(0)| < R with |p(0)| = n(x(0)). Throws NonTrappingUncertain (with the
// report retrievable via certify_nontrapping_report) when a ray fails to
// leave |x| <= 2R before s_max.
EscapeReport certify_nontrapping(const MediumModel& m, int samples, double s_max,
                                 std::uint64_t seed = kDefaultProbeSeed);

// Same, but returns the report instead of throwing (report.ok = false).
EscapeReport certify_nontrapping_report(const MediumModel& m, int samples, double s_max,
                                        std::uint64_t seed = kDefaultProbeSeed);

}  // namespace gbeam
