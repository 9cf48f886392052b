#pragma once

#include <vector>

#include "fpkit/fields.hpp"
#include "fpkit/image.hpp"

namespace fpkit {

// Block-wise ridge orientation from squared Sobel gradients, smoothed by
// averaging doubled-angle vectors over 3x3 block neighbourhoods. Flat blocks
// report theta 0 and coherence 0.
OrientationField estimate_orientation(const GrayImage& img, int block_size = 16);

// Ridge frequency per block from the x-signature: project the block onto the
// axis orthogonal to its orientation and measure the mean spacing between
// dark peaks. Blocks without a usable estimate (fewer than two peaks or a
// period outside [3, 25] px) are left absent.
FrequencyMap estimate_frequency(const GrayImage& img, const OrientationField& of);

// Variance-based segmentation: a block is foreground when its intensity
// variance exceeds variance_factor times the global variance, followed by a
// morphological open/close on the block grid and retention of the largest
// 4-connected component.
ForegroundMask segment(const GrayImage& img, int block_size = 16,
                       double variance_factor = 0.1);

// Even-symmetric Gabor kernel (zero-mean), row-major ksize x ksize. theta is
// the ridge direction; the cosine oscillates across the ridges.
std::vector<double> gabor_kernel(double theta, double freq, double sigma = 4.0,
                                 int ksize = 11);

// Contextual enhancement: each foreground pixel is filtered with the Gabor
// kernel of its block; background is pushed to white. Blocks without a
// frequency estimate borrow the mean of the present ones (fallback 1/9).
GrayImage gabor_enhance(const GrayImage& img, const OrientationField& of,
                        const FrequencyMap& fm, const ForegroundMask& mask);

// Adaptive threshold at the block mean; 1 = ridge (darker than the block
// mean), background blocks stay 0.
BinaryImage binarize(const GrayImage& img, const ForegroundMask& mask);

// Zhang-Suen thinning iterated to a fixpoint, with a final sweep that breaks
// any remaining 2x2 squares so the one-pixel-wide invariant holds exactly.
Skeleton thin(const BinaryImage& bin);

}  // namespace fpkit
