#include "slimconv/cost.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace slimconv {

namespace {

using u64 = std::uint64_t;

LayerCost make_cost(const std::string& kind, u64 params, u64 flops, int in_c, int in_h, int in_w,
                    int out_c, int out_h, int out_w) {
    LayerCost c;
    c.kind = kind;
    c.params = params;
    c.flops = flops;
    c.in_c = in_c;
    c.in_h = in_h;
    c.in_w = in_w;
    c.out_c = out_c;
    c.out_h = out_h;
    c.out_w = out_w;
    return c;
}

int strided_out(int in, int stride) { return (in - 1) / stride + 1; } // same padding, odd k

} // namespace

void CostReport::add(LayerCost row) {
    total_params += row.params;
    total_flops += row.flops;
    rows.push_back(std::move(row));
}

LayerCost cost_conv(int in_c, int out_c, int k, int groups, int out_h, int out_w) {
    const u64 params = static_cast<u64>(in_c / groups) * k * k * out_c;
    const u64 flops = static_cast<u64>(out_h) * out_w * params;
    return make_cost("conv", params, flops, in_c, out_h, out_w, out_c, out_h, out_w);
}

LayerCost cost_sc(int in_c, int out_c, int k, int out_h, int out_w) {
    LayerCost c = cost_conv(in_c, out_c, k, 1, out_h, out_w);
    c.kind = "sc";
    return c;
}

LayerCost cost_dsc(int in_c, int out_c, int k, int out_h, int out_w) {
    const u64 params = static_cast<u64>(in_c) * k * k + static_cast<u64>(in_c) * out_c;
    const u64 flops = static_cast<u64>(out_h) * out_w * params;
    return make_cost("dsc", params, flops, in_c, out_h, out_w, out_c, out_h, out_w);
}

bool DscScRatio::exactly_equal() const {
    return static_cast<unsigned __int128>(params_num) * flops_den ==
           static_cast<unsigned __int128>(flops_num) * params_den;
}

DscScRatio dsc_sc_ratio(int in_c, int out_c, int k, int out_h, int out_w) {
    const LayerCost dsc = cost_dsc(in_c, out_c, k, out_h, out_w);
    const LayerCost sc = cost_sc(in_c, out_c, k, out_h, out_w);
    DscScRatio r;
    r.params_num = dsc.params;
    r.params_den = sc.params;
    r.flops_num = dsc.flops;
    r.flops_den = sc.flops;
    return r;
}

LayerCost cost_gsconv(int in_c, int out_c, int k, int k_dw, int stride, int in_h, int in_w) {
    const int half = out_c / 2;
    const int oh = strided_out(in_h, stride);
    const int ow = strided_out(in_w, stride);
    const LayerCost sc = cost_conv(in_c, half, k, 1, oh, ow);
    const LayerCost dw = cost_conv(half, half, k_dw, half, oh, ow);
    return make_cost("gsconv", sc.params + dw.params, sc.flops + dw.flops, in_c, in_h, in_w,
                     out_c, oh, ow);
}

LayerCost cost_dsc_unit(int in_c, int out_c, int k_dw, int in_h, int in_w) {
    const LayerCost dw = cost_conv(in_c, in_c, k_dw, in_c, in_h, in_w);
    const LayerCost pw = cost_conv(in_c, out_c, 1, 1, in_h, in_w);
    return make_cost("dsc_unit", dw.params + pw.params, dw.flops + pw.flops, in_c, in_h, in_w,
                     out_c, in_h, in_w);
}

LayerCost cost_gs_bottleneck(int in_c, int out_c, int in_h, int in_w) {
    const int hidden = out_c / 2;
    const LayerCost g1 = cost_gsconv(in_c, hidden, 1, 5, 1, in_h, in_w);
    const LayerCost g2 = cost_gsconv(hidden, out_c, 3, 5, 1, in_h, in_w);
    const LayerCost sc = cost_conv(in_c, out_c, 1, 1, in_h, in_w);
    return make_cost("gs_bottleneck", g1.params + g2.params + sc.params,
                     g1.flops + g2.flops + sc.flops, in_c, in_h, in_w, out_c, in_h, in_w);
}

LayerCost cost_vov_gscsp(int in_c, int out_c, int n, int in_h, int in_w) {
    const int hidden = out_c / 2;
    u64 params = 0, flops = 0;
    auto acc = [&](const LayerCost& c) {
        params += c.params;
        flops += c.flops;
    };
    acc(cost_conv(in_c, hidden, 1, 1, in_h, in_w));
    for (int i = 0; i < n; ++i) acc(cost_gs_bottleneck(hidden, hidden, in_h, in_w));
    acc(cost_conv(in_c, hidden, 1, 1, in_h, in_w));
    acc(cost_conv(2 * hidden, out_c, 1, 1, in_h, in_w));
    return make_cost("vov_gscsp", params, flops, in_c, in_h, in_w, out_c, in_h, in_w);
}

LayerCost cost_csp(int in_c, int out_c, int n, int in_h, int in_w) {
    const int hidden = out_c / 2;
    u64 params = 0, flops = 0;
    auto acc = [&](const LayerCost& c) {
        params += c.params;
        flops += c.flops;
    };
    acc(cost_conv(in_c, hidden, 1, 1, in_h, in_w));
    for (int i = 0; i < n; ++i) {
        acc(cost_conv(hidden, hidden, 1, 1, in_h, in_w));
        acc(cost_conv(hidden, hidden, 3, 1, in_h, in_w));
    }
    acc(cost_conv(in_c, hidden, 1, 1, in_h, in_w));
    acc(cost_conv(2 * hidden, out_c, 1, 1, in_h, in_w));
    return make_cost("csp", params, flops, in_c, in_h, in_w, out_c, in_h, in_w);
}

LayerCost cost_spp(int in_c, int in_h, int in_w) {
    return make_cost("spp", 0, 0, in_c, in_h, in_w, 4 * in_c, in_h, in_w);
}

LayerCost cost_sppf(int in_c, int in_h, int in_w) {
    return make_cost("sppf", 0, 0, in_c, in_h, in_w, 4 * in_c, in_h, in_w);
}

LayerCost cost_se(int c, int r, int in_h, int in_w) {
    const LayerCost fc1 = cost_conv(c, c / r, 1, 1, 1, 1);
    const LayerCost fc2 = cost_conv(c / r, c, 1, 1, 1, 1);
    return make_cost("se", fc1.params + fc2.params, fc1.flops + fc2.flops, c, in_h, in_w, c,
                     in_h, in_w);
}

LayerCost cost_cbam(int c, int r, int in_h, int in_w) {
    const LayerCost fc1 = cost_conv(c, c / r, 1, 1, 1, 1);
    const LayerCost fc2 = cost_conv(c / r, c, 1, 1, 1, 1);
    const LayerCost sp = cost_conv(2, 1, 7, 1, in_h, in_w);
    // The shared MLP runs twice, once per pooled path.
    return make_cost("cbam", fc1.params + fc2.params + sp.params,
                     2 * (fc1.flops + fc2.flops) + sp.flops, c, in_h, in_w, c, in_h, in_w);
}

LayerCost cost_ca(int c, int r, int in_h, int in_w) {
    const LayerCost stem = cost_conv(c, c / r, 1, 1, 1, in_h + in_w);
    const LayerCost ah = cost_conv(c / r, c, 1, 1, in_h, 1);
    const LayerCost aw = cost_conv(c / r, c, 1, 1, 1, in_w);
    return make_cost("ca", stem.params + ah.params + aw.params, stem.flops + ah.flops + aw.flops,
                     c, in_h, in_w, c, in_h, in_w);
}

namespace {

u64 spp_comparisons(const std::vector<int>& kernels) {
    u64 total = 0;
    for (int k : kernels) total += static_cast<u64>(k) * k - 1;
    return total;
}

void check_chain(const std::vector<int>& spp_kernels, int sppf_kernel, int chain_len) {
    if (sppf_kernel < 3 || sppf_kernel % 2 == 0)
        throw std::invalid_argument("sppf_efficiency: chained kernel must be odd and >= 3");
    if (chain_len < 1 || spp_kernels.empty())
        throw std::invalid_argument("sppf_efficiency: need at least one kernel and one chain");
    for (int k : spp_kernels) {
        const int step = sppf_kernel - 1;
        if (k < sppf_kernel || (k - 1) % step != 0 || (k - 1) / step > chain_len)
            throw std::invalid_argument(
                "sppf_efficiency: kernel " + std::to_string(k) + " is not realizable by " +
                std::to_string(chain_len) + " chained " + std::to_string(sppf_kernel) + "s");
    }
}

} // namespace

double sppf_efficiency(const std::vector<int>& spp_kernels, int sppf_kernel, int chain_len) {
    check_chain(spp_kernels, sppf_kernel, chain_len);
    const u64 spp = spp_comparisons(spp_kernels);
    const u64 sppf = static_cast<u64>(chain_len) *
                     (static_cast<u64>(sppf_kernel) * sppf_kernel - 1);
    return (static_cast<double>(spp) - static_cast<double>(sppf)) / static_cast<double>(sppf) *
           100.0;
}

double sppf_efficiency_display_form(const std::vector<int>& spp_kernels, int sppf_kernel,
                                    int chain_len) {
    check_chain(spp_kernels, sppf_kernel, chain_len);
    u64 sum_sq = 0;
    for (int k : spp_kernels) sum_sq += static_cast<u64>(k) * k;
    const double i = static_cast<double>(chain_len);
    return (static_cast<double>(sum_sq) - i) -
           (static_cast<double>(sppf_kernel) * sppf_kernel - 1.0) * i;
}

namespace {

std::string shape_str(int c, int h, int w) {
    return std::to_string(c) + "x" + std::to_string(h) + "x" + std::to_string(w);
}

std::string pct_str(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", p);
    return buf;
}

} // namespace

std::string render_table(const CostReport& report, bool double_macs) {
    const u64 mult = double_macs ? 2 : 1;
    std::string out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-16s %-14s %-12s %-12s %14s %16s %8s\n", "name", "type",
                  "in_shape", "out_shape", "params", double_macs ? "flops(x2)" : "flops(MAC)",
                  "pct");
    out += line;
    out += std::string(96, '-') + "\n";
    for (const LayerCost& r : report.rows) {
        const double pct =
            report.total_flops ? 100.0 * static_cast<double>(r.flops) / report.total_flops : 0.0;
        std::snprintf(line, sizeof(line), "%-16s %-14s %-12s %-12s %14llu %16llu %7.2f%%\n",
                      r.name.c_str(), r.kind.c_str(), shape_str(r.in_c, r.in_h, r.in_w).c_str(),
                      shape_str(r.out_c, r.out_h, r.out_w).c_str(),
                      static_cast<unsigned long long>(r.params * mult),
                      static_cast<unsigned long long>(r.flops * mult), pct);
        out += line;
    }
    out += std::string(96, '-') + "\n";
    std::snprintf(line, sizeof(line), "%-16s %-14s %-12s %-12s %14llu %16llu %7.2f%%\n", "total",
                  "", "", "", static_cast<unsigned long long>(report.total_params * mult),
                  static_cast<unsigned long long>(report.total_flops * mult), 100.0);
    out += line;
    out += "note: counts cover convolution arithmetic only; bias, batch norm, activation,\n";
    out += "      pooling, concat and shuffle are costed at zero.\n";
    return out;
}

std::string render_csv(const CostReport& report, bool double_macs) {
    const u64 mult = double_macs ? 2 : 1;
    std::string out = "name,type,in_shape,out_shape,params,flops,pct_of_total\n";
    for (const LayerCost& r : report.rows) {
        const double pct =
            report.total_flops ? 100.0 * static_cast<double>(r.flops) / report.total_flops : 0.0;
        out += r.name + "," + r.kind + "," + shape_str(r.in_c, r.in_h, r.in_w) + "," +
               shape_str(r.out_c, r.out_h, r.out_w) + "," + std::to_string(r.params * mult) +
               "," + std::to_string(r.flops * mult) + "," + pct_str(pct) + "\n";
    }
    out += "total,,,," + std::to_string(report.total_params * mult) + "," +
           std::to_string(report.total_flops * mult) + ",100.00\n";
    return out;
}

std::string render_compare(const CostReport& base, const CostReport& variant, bool double_macs) {
    const u64 mult = double_macs ? 2 : 1;
    std::string out;
    char line[256];
    auto row = [&](const char* what, u64 b, u64 v) {
        const double delta = static_cast<double>(v) - static_cast<double>(b);
        const double pct = b ? delta / static_cast<double>(b) * 100.0 : 0.0;
        std::snprintf(line, sizeof(line), "%-8s baseline=%llu variant=%llu delta=%+.0f (%+.2f%%)\n",
                      what, static_cast<unsigned long long>(b * mult),
                      static_cast<unsigned long long>(v * mult), delta * static_cast<double>(mult),
                      pct);
        out += line;
    };
    row("params", base.total_params, variant.total_params);
    row("flops", base.total_flops, variant.total_flops);
    return out;
}

} // namespace slimconv
