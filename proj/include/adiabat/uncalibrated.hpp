#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "adiabat/calibrated.hpp"
#include "adiabat/transform.hpp"

namespace adiabat {

/// Result of the two-adiabat reconstruction: the transformed adiabats
/// Yt = f0(Xt) and Yt = f1(Xt), the recalibration phi(Xt) (the primitive of
/// f1 - f0, anchored to 0 at the left end of the overlap), the normalized
/// entropy (Yt - f0)/(f1 - f0), and the recalibrated temperature phi(f(x,y)).
///
/// All evaluations are restricted to the common Xt overlap of the two
/// transformed adiabats and refused outside it. The normalized entropy is a
/// monotone relabeling of entropy, not the absolute one; only its level
/// curves are meaningful.
class RecalibrationResult {
 public:
  RecalibrationResult(std::shared_ptr<const TransformContext> ctx,
                      GraphFunction f0, GraphFunction f1, GraphFunction phi);

  double normalized_entropy_at(double x, double y) const;
  std::optional<double> try_normalized_entropy_at(double x, double y) const;

  /// phi(f(x,y)); defined up to an affine map (anchor and scale are gauge).
  double recalibrated_temperature_at(double x, double y) const;
  std::optional<double> try_recalibrated_temperature_at(double x,
                                                        double y) const;

  std::vector<LevelCurves> level_curves(const std::vector<double>& levels,
                                        int nx, int ny) const;

  const GraphFunction& f0() const { return f0_; }
  const GraphFunction& f1() const { return f1_; }
  const GraphFunction& phi() const { return phi_; }
  double overlap_min() const { return phi_.x_min(); }
  double overlap_max() const { return phi_.x_max(); }
  const TransformContext& ctx() const { return *ctx_; }
  const char* mode() const { return "uncalibrated"; }

 private:
  std::shared_ptr<const TransformContext> ctx_;
  GraphFunction f0_, f1_, phi_;
};

/// Builds both transformed adiabats, restricts them to their common Xt
/// overlap, integrates f1 - f0 into the recalibration phi, and assembles the
/// normalized entropy. Errors: empty overlap; adiabats crossing inside the
/// overlap (sign change of the denominator).
RecalibrationResult reconstruct_uncalibrated(
    std::shared_ptr<const TransformContext> ctx, const CurveSpec& a0,
    const CurveSpec& a1, int samples = 129);

/// Least-squares exponent p of a power-law fit c*Xt^p to (f1 - f0) sampled
/// across the overlap. Requires a positive Xt range and a difference of
/// constant sign.
double fit_power_law_exponent(const GraphFunction& f0, const GraphFunction& f1,
                              int n_samples = 65);

}  // namespace adiabat
