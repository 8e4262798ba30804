#pragma once

#include <random>

#include "lpdr/cochain.hpp"
#include "lpdr/polyform.hpp"

namespace lpdr {

/// W(chi_sigma) = k! sum_i (-1)^i t_i dt_0^..^dt_{i-1}^dt_{i+1}^..^dt_k on every maximal
/// simplex containing sigma, extended linearly to c.
PolyForm whitney(const Cochain& c);

/// Whitney map rescaled per simplex so that integrate(W~(chi_sigma), sigma, conv) = 1.
/// Under kOriented the factor is 1; under kVolumeDensity it is 1 / (k! vol sigma), which
/// on regular unit simplices is sqrt(2^k) / sqrt(k + 1).
PolyForm whitney_normalized(const Cochain& c, Integral conv = Integral::kOriented);

/// sqrt(k + 1) / sqrt(2^k): the volume-density integral of W(chi_sigma) over a regular unit k-simplex.
double whitney_split_constant(int k);

/// sigma -> integral of w over sigma.
Cochain derham_map(const PolyForm& w, Integral conv = Integral::kOriented);

struct SplitReport {
  double max_identity_error = 0.0;
  double max_stokes_error = 0.0;
  int sample_count = 0;
  // Largest observed ||I w||_2 / ||w||_2 and ||W c||_2 / ||c||_2 (reported, not asserted).
  double max_derham_ratio = 0.0;
  double max_whitney_ratio = 0.0;
};

/// Draws `samples` sparse random k-cochains c and records max |I(W~ c) - c| and
/// max |I(d W~ c) - dI(W~ c)|.
SplitReport verify_split(const MetricComplex& K, int k, int samples, std::mt19937_64& rng,
                         Integral conv = Integral::kOriented);

/// max over (k+1)-simplices of |I(dw) - dI(w)| under the oriented integral.
SplitReport verify_stokes(const PolyForm& w);

}  // namespace lpdr
