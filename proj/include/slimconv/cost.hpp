#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace slimconv {

// Analytic parameter and FLOP accounting. FLOPs are MACs (one multiply-
// accumulate counts 1); only convolution arithmetic is counted. Bias, batch
// norm, activations, pooling, concat and shuffle cost zero. Renderers can
// double the counts for multiply+add reporting.

struct LayerCost {
    std::string name;
    std::string kind;
    std::uint64_t params = 0;
    std::uint64_t flops = 0; // MACs at the given output spatial size, per sample
    int in_c = 0, in_h = 0, in_w = 0;
    int out_c = 0, out_h = 0, out_w = 0;
};

struct CostReport {
    std::vector<LayerCost> rows; // topological order
    std::uint64_t total_params = 0;
    std::uint64_t total_flops = 0;

    void add(LayerCost row);
};

// Grouped convolution: params = (in_c/groups)*k^2*out_c,
// flops = out_h*out_w*params.
LayerCost cost_conv(int in_c, int out_c, int k, int groups, int out_h, int out_w);

// Dense (standard) convolution.
LayerCost cost_sc(int in_c, int out_c, int k, int out_h, int out_w);

// Depthwise separable convolution: depthwise k x k plus 1x1 pointwise.
LayerCost cost_dsc(int in_c, int out_c, int k, int out_h, int out_w);

// DSC/SC cost ratios as exact integer fractions; both reduce to
// 1/out_c + 1/k^2 for matched geometry.
struct DscScRatio {
    std::uint64_t params_num = 0, params_den = 0;
    std::uint64_t flops_num = 0, flops_den = 0;
    double ratio_p() const { return static_cast<double>(params_num) / params_den; }
    double ratio_c() const { return static_cast<double>(flops_num) / flops_den; }
    bool exactly_equal() const; // cross-multiplied integer comparison
};
DscScRatio dsc_sc_ratio(int in_c, int out_c, int k, int out_h, int out_w);

// Composite block costs; spatial arguments are the block's input size.
LayerCost cost_gsconv(int in_c, int out_c, int k, int k_dw, int stride, int in_h, int in_w);
LayerCost cost_dsc_unit(int in_c, int out_c, int k_dw, int in_h, int in_w);
LayerCost cost_gs_bottleneck(int in_c, int out_c, int in_h, int in_w);
LayerCost cost_vov_gscsp(int in_c, int out_c, int n, int in_h, int in_w);
LayerCost cost_csp(int in_c, int out_c, int n, int in_h, int in_w);
LayerCost cost_spp(int in_c, int in_h, int in_w);
LayerCost cost_sppf(int in_c, int in_h, int in_w);
LayerCost cost_se(int c, int r, int in_h, int in_w);
LayerCost cost_cbam(int c, int r, int in_h, int in_w);
LayerCost cost_ca(int c, int r, int in_h, int in_w);

// Per-output-pixel max-comparison saving of the chained pyramid versus the
// parallel one, as a percentage: (SPP - SPPF) / SPPF * 100 with
// SPP = sum(k_j^2 - 1) and SPPF = chain_len * (k^2 - 1). Throws unless every
// SPP kernel is realizable as m*(k-1)+1 with 1 <= m <= chain_len.
double sppf_efficiency(const std::vector<int>& spp_kernels, int sppf_kernel, int chain_len);

// The display-form expression [(sum k_j^2 - i) - (k1^2 - 1)*i] for the same
// inputs. Kept only for comparison against the ratio form; no correctness
// claim is attached to it (it evaluates to 200 for kernels {5,9,13}).
double sppf_efficiency_display_form(const std::vector<int>& spp_kernels, int sppf_kernel,
                                    int chain_len);

// Rendering. pct_of_total in the CSV is the row's share of total flops.
// CSV header: name,type,in_shape,out_shape,params,flops,pct_of_total
std::string render_table(const CostReport& report, bool double_macs = false);
std::string render_csv(const CostReport& report, bool double_macs = false);
std::string render_compare(const CostReport& base, const CostReport& variant,
                           bool double_macs = false);

} // namespace slimconv
