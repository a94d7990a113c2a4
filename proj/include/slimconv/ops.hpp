#pragma once

#include <cstdint>
#include <vector>

#include "slimconv/tensor.hpp"

namespace slimconv {

// Tensor primitives. All functions are pure and deterministic: every reduction
// visits its terms in one fixed order (channel, then kernel row, then kernel
// col), so repeated evaluation is byte-identical.

// Direct grouped cross-correlation, "same" padding (pad = k/2). Padding cells
// contribute 0 to the sum; every output element accumulates exactly
// (in_c/groups)*k*k products. Oracle for all other conv paths.
// bias must be empty or have out_c entries (used only when p.has_bias).
Tensor conv2d_naive(const Tensor& x, const Tensor& weight, const std::vector<float>& bias,
                    const ConvParams& p);

// Same contract, with a MAC counter: *macs is incremented once per
// multiply-accumulate actually executed.
Tensor conv2d_naive(const Tensor& x, const Tensor& weight, const std::vector<float>& bias,
                    const ConvParams& p, std::uint64_t* macs);

// Patch-gather (im2col) fast path. Bit-identical to conv2d_naive: each output
// element's inner sum runs over the same values in the same order; the speedup
// comes from contiguous access, not from reassociation.
Tensor conv2d_im2col(const Tensor& x, const Tensor& weight, const std::vector<float>& bias,
                     const ConvParams& p);

// Default conv path used by blocks and graph execution.
inline Tensor conv2d(const Tensor& x, const Tensor& weight, const std::vector<float>& bias,
                     const ConvParams& p) {
    return conv2d_im2col(x, weight, bias, p);
}

// Max pooling, odd kernel, pad defaults to k/2. Padding never wins: only
// in-bounds cells are candidates, which is equivalent to padding with -inf.
Tensor maxpool2d(const Tensor& x, int k, int stride = 1, int pad = -1);

// Counting variant for cost-model cross-checks. Adds to *comparisons one unit
// per pairwise max taken, and to *interior_pixels / *interior_comparisons the
// per-output-pixel tallies restricted to windows that are fully in bounds.
Tensor maxpool2d_counted(const Tensor& x, int k, int stride, int pad,
                         std::uint64_t* interior_comparisons, std::uint64_t* interior_pixels);

Tensor global_avg_pool(const Tensor& x); // (n,c,1,1) channel means

enum class Axis { height, width };
enum class PoolMode { avg, max };

// Collapses the named axis to 1: Axis::height -> (n,c,1,w),
// Axis::width -> (n,c,h,1).
Tensor directional_pool(const Tensor& x, Axis axis, PoolMode mode);

// Per-pixel statistics across channels: (n,1,h,w).
Tensor channel_pixel_stats(const Tensor& x, PoolMode mode);

// Inference-mode batch norm, per channel: gamma*(x-mean)/sqrt(var+eps)+beta.
Tensor batch_norm_inference(const Tensor& x, const std::vector<float>& mean,
                            const std::vector<float>& var, const std::vector<float>& gamma,
                            const std::vector<float>& beta, float eps);

Tensor concat_channels(const std::vector<const Tensor*>& xs);

// Inverse of concat_channels given the channel sizes, bit-exact.
std::vector<Tensor> split_channels(const Tensor& x, const std::vector<int>& sizes);

// Pure channel permutation: view channels as a (g, c/g) grid, transpose,
// flatten. Input channel a*(c/g)+b lands at output position b*g+a.
Tensor channel_shuffle(const Tensor& x, int groups);

enum class EltwiseMode { add, mul };
Tensor elementwise(const Tensor& x, const Tensor& y, EltwiseMode mode);

// Pointwise multiply with s broadcast from shape (n,c,1,1), (n,c,h,1) or
// (n,c,1,w).
Tensor broadcast_scale(const Tensor& x, const Tensor& s);

Tensor upsample_nearest2x(const Tensor& x);

} // namespace slimconv
