#pragma once

#include "talaseg/types.hpp"

namespace talaseg {

/// Pairwise L2 distance matrix of the feature rows.
Matrix ssm(const Matrix& features);

/// 2L x 2L checkerboard for distance matrices: (past,past) and
/// (future,future) quadrants get -1, cross quadrants +1, radially
/// Gaussian-tapered (sigma = L/2), zero-sum, unit L1 norm.
Matrix checkerboard_kernel(int half_width);

/// Correlation of the kernel along the SSM diagonal; edges replicate, negative
/// responses clip to zero.
NoveltyCurve novelty_from_ssm(const Matrix& ssm, const Matrix& kernel,
                              NoveltyKind kind, const FeatureGrid& grid);

/// Same values as ssm() + novelty_from_ssm() but touching only the diagonal
/// band the kernel sees; used by the pipeline so full SSMs of long concerts
/// never have to be materialized.
NoveltyCurve novelty_from_features(const Matrix& features, const Matrix& kernel,
                                   NoveltyKind kind, const FeatureGrid& grid);

/// First difference followed by the Hilbert envelope (ASD-D / STE-D).
NoveltyCurve derivative_novelty(const std::vector<double>& curve, NoveltyKind kind,
                                const FeatureGrid& grid);

/// L2 norm of consecutive row differences, then the Hilbert envelope (NF-RF).
NoveltyCurve rhythmogram_flux(const Rhythmogram& rg);

/// All six curves of the front end, each max-normalized to 1 (zero curves
/// stay zero).
NoveltySet compute_novelty_set(const AsdCurve& asd, const SteCurve& ste,
                               const Rhythmogram& rg, const PosteriorSequence& post,
                               const MfccMatrix& mfcc, int kernel_half_width = 50);

/// In-place max normalization; all-zero curves are left untouched.
void max_normalize(std::vector<double>& values);

}  // namespace talaseg
