#include "slimconv/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <stdexcept>

#include "slimconv/activations.hpp"
#include "slimconv/blocks.hpp"
#include "slimconv/cost.hpp"
#include "slimconv/losses.hpp"
#include "slimconv/ops.hpp"
#include "slimconv/rng.hpp"

namespace slimconv {

namespace {

// ---------------------------------------------------------------- utilities

Tensor random_tensor(Rng& rng, int n, int c, int h, int w, float lo = -1.0f, float hi = 1.0f) {
    Tensor t(n, c, h, w);
    for (float& v : t.data) v = rng.uniform(lo, hi);
    return t;
}

// Fills a block's parameters with non-trivial values: weights and biases
// uniform, batch norm statistics spread away from identity.
template <typename BlockT>
void randomize_block(BlockT& block, Rng root) {
    std::vector<ParamRef> refs;
    if constexpr (requires(BlockT& b, std::vector<ParamRef>& v) { b.collect_params("p", v); })
        block.collect_params("p", refs);
    else
        (void)block;
    for (const ParamRef& ref : refs) {
        Rng rng = root.split(ref.name);
        if (ref.tensor) {
            for (float& v : ref.tensor->data) v = rng.uniform(-0.8f, 0.8f);
        } else if (ref.name.ends_with(".bn.var")) {
            for (float& v : *ref.vec) v = rng.uniform(0.5f, 2.0f);
        } else if (ref.name.ends_with(".bn.gamma")) {
            for (float& v : *ref.vec) v = rng.uniform(0.5f, 1.5f);
        } else {
            for (float& v : *ref.vec) v = rng.uniform(-0.5f, 0.5f);
        }
    }
}

std::uint64_t count_mismatches(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) return a.size() + b.size();
    std::uint64_t bad = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        float x = a.data[i], y = b.data[i];
        if (std::memcmp(&x, &y, sizeof(float)) != 0) ++bad;
    }
    return bad;
}

CheckResult result(const std::string& suite, const std::string& name, double measured,
                   double bound, bool pass, std::string detail = {}) {
    return {suite, name, measured, bound, pass, std::move(detail)};
}

// --------------------------------------------------- primitive recomposition
// Independent re-assembly of every composite block from tensor-core calls,
// always through the naive conv path. Used as the structural oracle.

Tensor ref_cba(const ConvBNAct& m, const Tensor& x) {
    Tensor y = conv2d_naive(x, m.weight, m.bias, m.conv);
    if (m.bn) y = batch_norm_inference(y, m.bn->mean, m.bn->var, m.bn->gamma, m.bn->beta,
                                       m.bn->eps);
    if (m.act) y = activate(*m.act, y);
    return y;
}

Tensor ref_gsconv(const GSConvBlock& m, const Tensor& x) {
    const Tensor dense = ref_cba(m.sc, x);
    const Tensor sparse = ref_cba(m.dw, dense);
    return channel_shuffle(concat_channels({&dense, &sparse}), 2);
}

Tensor ref_gs_bottleneck(const GSBottleneck& m, const Tensor& x) {
    return elementwise(ref_gsconv(m.g2, ref_gsconv(m.g1, x)), ref_cba(m.shortcut, x),
                       EltwiseMode::add);
}

Tensor ref_vov(const VoVGSCSP& m, const Tensor& x) {
    Tensor a = ref_cba(m.branch_a_entry, x);
    for (const GSBottleneck& b : m.chain) a = ref_gs_bottleneck(b, a);
    const Tensor by = ref_cba(m.branch_b, x);
    return ref_cba(m.fuse, concat_channels({&a, &by}));
}

Tensor ref_csp(const CSPBlock& m, const Tensor& x) {
    Tensor a = ref_cba(m.branch_a_entry, x);
    for (const CSPBlock::StdBottleneck& b : m.chain)
        a = elementwise(a, ref_cba(b.cv2, ref_cba(b.cv1, a)), EltwiseMode::add);
    const Tensor by = ref_cba(m.branch_b, x);
    return ref_cba(m.fuse, concat_channels({&a, &by}));
}

Tensor ref_dsc(const DSCUnit& m, const Tensor& x) { return ref_cba(m.pointwise, ref_cba(m.depthwise, x)); }

Tensor ref_spp(const Tensor& x) {
    const Tensor p5 = maxpool2d(x, 5), p9 = maxpool2d(x, 9), p13 = maxpool2d(x, 13);
    return concat_channels({&x, &p5, &p9, &p13});
}

Tensor ref_sppf(const Tensor& x) {
    const Tensor p1 = maxpool2d(x, 5);
    const Tensor p2 = maxpool2d(p1, 5);
    const Tensor p3 = maxpool2d(p2, 5);
    return concat_channels({&x, &p1, &p2, &p3});
}

Tensor ref_se(const SEBlock& m, const Tensor& x) {
    return broadcast_scale(x, ref_cba(m.fc2, ref_cba(m.fc1, global_avg_pool(x))));
}

Tensor ref_cbam(const CBAMBlock& m, const Tensor& x) {
    const Tensor avg = global_avg_pool(x);
    const Tensor mx = directional_pool(directional_pool(x, Axis::height, PoolMode::max),
                                       Axis::width, PoolMode::max);
    const Tensor sum = elementwise(ref_cba(m.fc2, ref_cba(m.fc1, avg)),
                                   ref_cba(m.fc2, ref_cba(m.fc1, mx)), EltwiseMode::add);
    const Tensor refined = broadcast_scale(x, activate(ActivationKind::sigmoid(), sum));
    const Tensor smax = channel_pixel_stats(refined, PoolMode::max);
    const Tensor smean = channel_pixel_stats(refined, PoolMode::avg);
    const Tensor sp = ref_cba(m.spatial, concat_channels({&smax, &smean}));
    Tensor expanded(x.n, x.c, x.h, x.w);
    for (int in = 0; in < x.n; ++in)
        for (int ic = 0; ic < x.c; ++ic)
            for (int iy = 0; iy < x.h; ++iy)
                for (int ix = 0; ix < x.w; ++ix)
                    expanded.at(in, ic, iy, ix) = sp.at(in, 0, iy, ix);
    return elementwise(refined, expanded, EltwiseMode::mul);
}

Tensor ref_ca(const CABlock& m, const Tensor& x) {
    const Tensor ph = directional_pool(x, Axis::width, PoolMode::avg);  // (n,c,h,1)
    const Tensor pw = directional_pool(x, Axis::height, PoolMode::avg); // (n,c,1,w)
    Tensor cat(x.n, x.c, 1, x.h + x.w);
    for (int in = 0; in < x.n; ++in)
        for (int ic = 0; ic < x.c; ++ic) {
            for (int iy = 0; iy < x.h; ++iy) cat.at(in, ic, 0, iy) = ph.at(in, ic, iy, 0);
            for (int ix = 0; ix < x.w; ++ix) cat.at(in, ic, 0, x.h + ix) = pw.at(in, ic, 0, ix);
        }
    const Tensor stem = ref_cba(m.reduce, cat);
    Tensor part_h(x.n, stem.c, x.h, 1); // directly in (n,c,h,1) layout
    Tensor part_w(x.n, stem.c, 1, x.w);
    for (int in = 0; in < x.n; ++in)
        for (int ic = 0; ic < stem.c; ++ic) {
            for (int iy = 0; iy < x.h; ++iy) part_h.at(in, ic, iy, 0) = stem.at(in, ic, 0, iy);
            for (int ix = 0; ix < x.w; ++ix)
                part_w.at(in, ic, 0, ix) = stem.at(in, ic, 0, x.h + ix);
        }
    const Tensor a_h = ref_cba(m.attn_h, part_h);
    const Tensor a_w = ref_cba(m.attn_w, part_w);
    return broadcast_scale(broadcast_scale(x, a_h), a_w);
}

// ------------------------------------------------------- loss FD references
// Fresh corner-based implementations of the five losses, kept independent of
// losses.cpp. alpha_frozen carries CIoU's trade-off weight so the differenced
// function matches the gradient contract (alpha does not propagate).

struct RefBox {
    double cx, cy, w, h;
    double x1() const { return cx - w / 2; }
    double x2() const { return cx + w / 2; }
    double y1() const { return cy - h / 2; }
    double y2() const { return cy + h / 2; }
};

double ref_loss(LossKind kind, const RefBox& p, const RefBox& g, double alpha_frozen) {
    const double iw = std::min(p.x2(), g.x2()) - std::max(p.x1(), g.x1());
    const double ih = std::min(p.y2(), g.y2()) - std::max(p.y1(), g.y1());
    const double inter = (iw > 0 && ih > 0) ? iw * ih : 0.0;
    const double uni = p.w * p.h + g.w * g.h - inter;
    const double iou_v = inter / uni;
    const double cw = std::max(p.x2(), g.x2()) - std::min(p.x1(), g.x1());
    const double ch = std::max(p.y2(), g.y2()) - std::min(p.y1(), g.y1());
    double L = 1.0 - iou_v;
    if (kind == LossKind::giou) {
        const double C = cw * ch;
        L += (C - uni) / C;
    } else if (kind != LossKind::iou) {
        const double rho2 = (p.cx - g.cx) * (p.cx - g.cx) + (p.cy - g.cy) * (p.cy - g.cy);
        L += rho2 / (cw * cw + ch * ch);
        if (kind == LossKind::ciou) {
            const double pi = 3.141592653589793238462643383279502884;
            const double ang = std::atan(g.w / g.h) - std::atan(p.w / p.h);
            const double v = 4.0 / (pi * pi) * ang * ang;
            L += alpha_frozen * v;
        } else if (kind == LossKind::eiou) {
            L += (p.w - g.w) * (p.w - g.w) / (cw * cw) + (p.h - g.h) * (p.h - g.h) / (ch * ch);
        }
    }
    return L;
}

double frozen_alpha(const RefBox& p, const RefBox& g) {
    const double iw = std::min(p.x2(), g.x2()) - std::max(p.x1(), g.x1());
    const double ih = std::min(p.y2(), g.y2()) - std::max(p.y1(), g.y1());
    const double inter = (iw > 0 && ih > 0) ? iw * ih : 0.0;
    const double uni = p.w * p.h + g.w * g.h - inter;
    const double iou_v = inter / uni;
    const double pi = 3.141592653589793238462643383279502884;
    const double ang = std::atan(g.w / g.h) - std::atan(p.w / p.h);
    const double v = 4.0 / (pi * pi) * ang * ang;
    const double denom = (1.0 - iou_v) + v;
    return denom > 0.0 ? v / denom : 0.0;
}

// Well-conditioned random pred/gt pair: no edge within margin of a tie, no
// sliver intersections, so the loss is smooth across the FD step.
struct BoxPair {
    RefBox pred, gt;
};

BoxPair random_box_pair(Rng& rng, bool allow_disjoint) {
    const double margin = 2e-2;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        RefBox g{rng.uniform_double(-2, 2), rng.uniform_double(-2, 2),
                 rng.uniform_double(0.6, 2.5), rng.uniform_double(0.6, 2.5)};
        RefBox p{};
        if (allow_disjoint && rng.uniform_double(0, 1) < 0.3) {
            p = RefBox{g.cx + rng.uniform_double(2.5, 5.0), g.cy + rng.uniform_double(-1.0, 1.0),
                       rng.uniform_double(0.6, 2.0), rng.uniform_double(0.6, 2.0)};
        } else {
            p = RefBox{g.cx + rng.uniform_double(-0.35, 0.35) * g.w,
                       g.cy + rng.uniform_double(-0.35, 0.35) * g.h,
                       g.w * rng.uniform_double(0.75, 1.35), g.h * rng.uniform_double(0.75, 1.35)};
        }
        const double iw = std::min(p.x2(), g.x2()) - std::max(p.x1(), g.x1());
        const double ih = std::min(p.y2(), g.y2()) - std::max(p.y1(), g.y1());
        if (std::abs(iw) < margin || std::abs(ih) < margin) continue;
        if (std::abs(p.x1() - g.x1()) < margin || std::abs(p.x2() - g.x2()) < margin) continue;
        if (std::abs(p.y1() - g.y1()) < margin || std::abs(p.y2() - g.y2()) < margin) continue;
        return {p, g};
    }
    throw std::runtime_error("random_box_pair: failed to generate a well-conditioned pair");
}

// ------------------------------------------------------------------- suites

std::vector<CheckResult> suite_conv(const CheckOptions& opts) {
    Rng root = Rng(opts.seed).split("check.conv");
    std::uint64_t mismatched = 0;
    for (int i = 0; i < 200; ++i) {
        Rng rng = root.split("cfg" + std::to_string(i));
        ConvParams p;
        const int mode = rng.uniform_int(0, 2);
        if (mode == 0) { // dense
            p.groups = 1;
            p.in_c = rng.uniform_int(1, 8);
            p.out_c = rng.uniform_int(1, 8);
        } else if (mode == 1) { // depthwise
            p.in_c = p.out_c = p.groups = rng.uniform_int(1, 8);
        } else { // grouped
            p.groups = 1 << rng.uniform_int(0, 2);
            p.in_c = p.groups * rng.uniform_int(1, 4);
            p.out_c = p.groups * rng.uniform_int(1, 4);
        }
        p.k = 2 * rng.uniform_int(0, 2) + 1;
        p.stride = rng.uniform_int(1, 2);
        p.has_bias = rng.uniform_int(0, 1) == 1;
        const int h = rng.uniform_int(3, 14), w = rng.uniform_int(3, 14);
        const Tensor x = random_tensor(rng, rng.uniform_int(1, 2), p.in_c, h, w);
        Tensor weight(p.out_c, p.in_c / p.groups, p.k, p.k);
        for (float& v : weight.data) v = rng.uniform(-1.0f, 1.0f);
        std::vector<float> bias(p.out_c);
        for (float& v : bias) v = rng.uniform(-0.5f, 0.5f);
        mismatched += count_mismatches(conv2d_naive(x, weight, bias, p),
                                       conv2d_im2col(x, weight, bias, p));
    }
    return {result("conv", "naive_vs_im2col_bitexact_200cfg", static_cast<double>(mismatched),
                   0.0, mismatched == 0)};
}

std::vector<CheckResult> suite_shuffle(const CheckOptions& opts) {
    Rng root = Rng(opts.seed).split("check.shuffle");
    std::vector<CheckResult> out;

    double worst = 0.0;
    std::uint64_t involution_bad = 0;
    for (int i = 0; i < 50; ++i) {
        Rng rng = root.split("case" + std::to_string(i));
        const int g = rng.uniform_int(1, 4);
        const int c = g * rng.uniform_int(1, 6);
        const Tensor x = random_tensor(rng, rng.uniform_int(1, 2), c, rng.uniform_int(1, 7),
                                       rng.uniform_int(1, 7));
        const Tensor y = channel_shuffle(x, g);
        // Exact multiset preservation: sorted buffers identical, sums and L2
        // norms (in double, fixed order) identical.
        std::vector<float> xs(x.data), ys(y.data);
        std::sort(xs.begin(), xs.end());
        std::sort(ys.begin(), ys.end());
        if (xs != ys) worst = std::max(worst, 1.0);
        double sx = 0, sy = 0, lx = 0, ly = 0;
        for (float v : xs) { sx += v; lx += static_cast<double>(v) * v; }
        for (float v : ys) { sy += v; ly += static_cast<double>(v) * v; }
        worst = std::max({worst, std::abs(sx - sy), std::abs(lx - ly)});
        involution_bad += count_mismatches(channel_shuffle(y, c / g), x);
    }
    out.push_back(result("shuffle", "bijection_multiset_sum_l2", worst, 0.0, worst == 0.0));
    out.push_back(result("shuffle", "involution_g_then_c_over_g",
                         static_cast<double>(involution_bad), 0.0, involution_bad == 0));

    // c=4, g=2 interleave: [s0,s1,d0,d1] -> [s0,d0,s1,d1].
    Tensor labeled(1, 4, 1, 1);
    labeled.data = {0.0f, 1.0f, 10.0f, 11.0f};
    const Tensor shuffled = channel_shuffle(labeled, 2);
    const std::vector<float> expect = {0.0f, 10.0f, 1.0f, 11.0f};
    const bool ok = shuffled.data == expect;
    out.push_back(result("shuffle", "interleave_c4_g2", ok ? 0.0 : 1.0, 0.0, ok));
    return out;
}

std::vector<CheckResult> suite_sppf(const CheckOptions& opts) {
    Rng root = Rng(opts.seed).split("check.sppf");
    std::uint64_t tensors_bad = 0;
    SPPBlock spp;
    SPPFBlock sppf;
    for (int i = 0; i < 100; ++i) {
        Rng rng = root.split("case" + std::to_string(i));
        const Tensor x = random_tensor(rng, 1, rng.uniform_int(1, 8), rng.uniform_int(5, 33),
                                       rng.uniform_int(5, 33), -10.0f, 10.0f);
        if (!bit_equal(spp.forward(x), sppf.forward(x))) ++tensors_bad;
    }
    return {result("sppf", "spp_equals_sppf_bitexact_100", static_cast<double>(tensors_bad), 0.0,
                   tensors_bad == 0)};
}

std::vector<CheckResult> suite_blocks(const CheckOptions& opts) {
    Rng root = Rng(opts.seed).split("check.blocks");
    std::vector<CheckResult> out;
    std::uint64_t bad = 0;
    std::string detail;

    auto run_case = [&](const std::string& label, auto make, auto fwd, auto ref, int in_c) {
        std::uint64_t case_bad = 0;
        for (int seed = 0; seed < 20; ++seed) {
            Rng rng = root.split(label + std::to_string(seed));
            auto block = make();
            randomize_block(block, rng.split("params"));
            const Tensor x = random_tensor(rng, 2, in_c, 9, 9);
            case_bad += count_mismatches(fwd(block, x), ref(block, x));
        }
        if (case_bad) detail += label + " diverges; ";
        bad += case_bad;
    };

    run_case("cba", [] { return ConvBNAct(8, 12, 3, 2, 1, false, true, ActivationKind::swish()); },
             [](const ConvBNAct& b, const Tensor& x) { return b.forward(x); }, ref_cba, 8);
    run_case("dsc", [] { return DSCUnit(8, 12, 3); },
             [](const DSCUnit& b, const Tensor& x) { return b.forward(x); }, ref_dsc, 8);
    run_case("gsconv", [] { return GSConvBlock(8, 12, 3, 2, 5); },
             [](const GSConvBlock& b, const Tensor& x) { return b.forward(x); }, ref_gsconv, 8);
    run_case("gs_bottleneck", [] { return GSBottleneck(8, 16); },
             [](const GSBottleneck& b, const Tensor& x) { return b.forward(x); },
             ref_gs_bottleneck, 8);
    run_case("vov_gscsp", [] { return VoVGSCSP(8, 16, 2); },
             [](const VoVGSCSP& b, const Tensor& x) { return b.forward(x); }, ref_vov, 8);
    run_case("csp", [] { return CSPBlock(8, 16, 2); },
             [](const CSPBlock& b, const Tensor& x) { return b.forward(x); }, ref_csp, 8);
    run_case("se", [] { return SEBlock(16, 4); },
             [](const SEBlock& b, const Tensor& x) { return b.forward(x); }, ref_se, 16);
    run_case("cbam", [] { return CBAMBlock(16, 4); },
             [](const CBAMBlock& b, const Tensor& x) { return b.forward(x); }, ref_cbam, 16);
    run_case("ca", [] { return CABlock(16, 4); },
             [](const CABlock& b, const Tensor& x) { return b.forward(x); }, ref_ca, 16);
    run_case("spp", [] { return SPPBlock{}; },
             [](const SPPBlock& b, const Tensor& x) { return b.forward(x); },
             [](const SPPBlock&, const Tensor& x) { return ref_spp(x); }, 8);
    run_case("sppf", [] { return SPPFBlock{}; },
             [](const SPPFBlock& b, const Tensor& x) { return b.forward(x); },
             [](const SPPFBlock&, const Tensor& x) { return ref_sppf(x); }, 8);

    out.push_back(result("blocks", "structural_oracle_20seeds_per_type",
                         static_cast<double>(bad), 0.0, bad == 0, detail));

    // Attention outputs never exceed the input in magnitude.
    double excess = 0.0;
    for (int i = 0; i < 10; ++i) {
        Rng rng = root.split("attn" + std::to_string(i));
        const Tensor x = random_tensor(rng, 1, 16, 7, 7, -3.0f, 3.0f);
        SEBlock se(16, 4);
        CBAMBlock cbam(16, 4);
        CABlock ca(16, 4);
        randomize_block(se, rng.split("se"));
        randomize_block(cbam, rng.split("cbam"));
        randomize_block(ca, rng.split("ca"));
        for (const Tensor& y : {se.forward(x), cbam.forward(x), ca.forward(x)})
            for (std::size_t j = 0; j < x.data.size(); ++j)
                excess = std::max(excess,
                                  static_cast<double>(std::abs(y.data[j]) - std::abs(x.data[j])));
    }
    out.push_back(result("blocks", "attention_magnitude_bounded", excess, 0.0, excess <= 0.0));

    // Stride-1 composite blocks preserve spatial shape for odd kernels.
    {
        Rng rng = root.split("shape");
        const Tensor x = random_tensor(rng, 1, 8, 11, 13);
        GSConvBlock gs(8, 12, 3, 1, 5);
        GSBottleneck gsb(8, 16);
        VoVGSCSP vov(8, 16, 1);
        CSPBlock csp(8, 16, 1);
        randomize_block(gs, rng.split("a"));
        randomize_block(gsb, rng.split("b"));
        randomize_block(vov, rng.split("c"));
        randomize_block(csp, rng.split("d"));
        int bad_shapes = 0;
        for (const Tensor& y :
             {gs.forward(x), gsb.forward(x), vov.forward(x), csp.forward(x), SPPBlock{}.forward(x)})
            if (y.h != x.h || y.w != x.w) ++bad_shapes;
        out.push_back(result("blocks", "stride1_preserves_spatial_shape", bad_shapes, 0.0,
                             bad_shapes == 0));
    }
    return out;
}

std::vector<CheckResult> suite_losses(const CheckOptions& opts) {
    Rng root = Rng(opts.seed).split("check.losses");
    std::vector<CheckResult> out;

    // Worked pair: unit squares with centers 2 apart.
    {
        const BBox pred(0.5, 0.5, 1, 1), gt(2.5, 0.5, 1, 1);
        const double expected[5] = {1.0, 1.0 + 1.0 / 3.0, 1.4, 1.4, 1.4};
        const LossKind kinds[5] = {LossKind::iou, LossKind::giou, LossKind::diou, LossKind::ciou,
                                   LossKind::eiou};
        double worst = 0.0;
        for (int i = 0; i < 5; ++i)
            worst = std::max(worst, std::abs(loss(kinds[i], pred, gt) - expected[i]));
        out.push_back(result("losses", "worked_pair_unit_squares", worst, 1e-9, worst <= 1e-9));
    }

    // Rasterized oracle vs analytic IoU at resolution 1024.
    {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            Rng rng = root.split("raster" + std::to_string(i));
            const double gw = rng.uniform_double(1.0, 2.5), gh = rng.uniform_double(1.0, 2.5);
            const BBox g(rng.uniform_double(-1.5, 1.5), rng.uniform_double(-1.5, 1.5), gw, gh);
            const BBox p(g.cx() + rng.uniform_double(-0.3, 0.3) * gw,
                         g.cy() + rng.uniform_double(-0.3, 0.3) * gh,
                         gw * rng.uniform_double(0.8, 1.3), gh * rng.uniform_double(0.8, 1.3));
            worst = std::max(worst, std::abs(rasterized_iou(p, g, 1024) - iou(p, g)));
        }
        out.push_back(result("losses", "rasterized_iou_1024_vs_analytic", worst, 2e-3,
                             worst <= 2e-3));
    }

    // CIoU degenerates to DIoU for proportional boxes.
    {
        double worst = 0.0;
        const double ks[7] = {0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0};
        for (double k : ks) {
            const BBox gt(0, 0, 2, 1);
            const BBox pred(0, 0, 2 * k, k);
            worst = std::max(worst, std::abs(loss(LossKind::ciou, pred, gt) -
                                             loss(LossKind::diou, pred, gt)));
        }
        out.push_back(result("losses", "ciou_degenerates_to_diou", worst, 1e-12, worst <= 1e-12));
    }

    // Sign relation dv/dw == -(h/w) dv/dh on 1000 random pairs.
    {
        double worst = 0.0;
        Rng rng = root.split("signs");
        for (int i = 0; i < 1000; ++i) {
            const BBox p(rng.uniform_double(-2, 2), rng.uniform_double(-2, 2),
                         rng.uniform_double(0.2, 4), rng.uniform_double(0.2, 4));
            const BBox g(rng.uniform_double(-2, 2), rng.uniform_double(-2, 2),
                         rng.uniform_double(0.2, 4), rng.uniform_double(0.2, 4));
            const VGrad v = ciou_v_grad(p, g);
            worst = std::max(worst, std::abs(v.dv_dw + (p.h() / p.w()) * v.dv_dh));
        }
        out.push_back(result("losses", "v_grad_sign_relation_1000", worst, 1e-12,
                             worst <= 1e-12));
    }

    // Analytic gradients vs central finite differences (step 1e-4).
    {
        const double rtol = opts.fd_rel_tol.value_or(1e-5);
        const double atol = 1e-8;
        const double step = 1e-4;
        double worst_ratio = 0.0;
        const LossKind kinds[5] = {LossKind::iou, LossKind::giou, LossKind::diou, LossKind::ciou,
                                   LossKind::eiou};
        for (int i = 0; i < 100; ++i) {
            Rng rng = root.split("fd" + std::to_string(i));
            const BoxPair pair = random_box_pair(rng, true);
            const double a0 = frozen_alpha(pair.pred, pair.gt);
            for (LossKind kind : kinds) {
                const BBox pred(pair.pred.cx, pair.pred.cy, pair.pred.w, pair.pred.h);
                const BBox gt(pair.gt.cx, pair.gt.cy, pair.gt.w, pair.gt.h);
                const LossGrad grad = loss_grad(kind, pred, gt);
                for (int comp = 0; comp < 4; ++comp) {
                    auto f = [&](double t) {
                        RefBox pb = pair.pred;
                        (comp == 0 ? pb.cx : comp == 1 ? pb.cy : comp == 2 ? pb.w : pb.h) = t;
                        return ref_loss(kind, pb, pair.gt, a0);
                    };
                    const double base = comp == 0   ? pair.pred.cx
                                        : comp == 1 ? pair.pred.cy
                                        : comp == 2 ? pair.pred.w
                                                    : pair.pred.h;
                    const double fd = finite_difference(f, base, step);
                    const double err = std::abs(grad.d[comp] - fd);
                    worst_ratio = std::max(worst_ratio,
                                           err / std::max(rtol * std::abs(fd), atol));
                }
            }
        }
        char detail[96];
        std::snprintf(detail, sizeof(detail), "rtol=%g atol=%g step=%g", rtol, atol, step);
        out.push_back(result("losses", "loss_grad_matches_fd_100x5", worst_ratio, 1.0,
                             worst_ratio <= 1.0, detail));
    }
    return out;
}

std::vector<CheckResult> suite_activations(const CheckOptions& opts) {
    Rng root = Rng(opts.seed).split("check.act");
    std::vector<CheckResult> out;
    const ActivationKind kinds[6] = {ActivationKind::relu(),  ActivationKind::sigmoid(),
                                     ActivationKind::tanh(),  ActivationKind::swish(),
                                     ActivationKind::mish(),  ActivationKind::hard_swish()};

    // Gradient vs finite differences at 1000 points per kind, kinks excluded.
    {
        const double rtol = opts.fd_rel_tol.value_or(1e-6);
        const double atol = 1e-8;
        double worst_ratio = 0.0;
        Rng rng = root.split("fd");
        for (const ActivationKind& kind : kinds) {
            for (int i = 0; i < 1000; ++i) {
                double x = rng.uniform_double(-10, 10);
                if (kind.tag == ActTag::relu && std::abs(x) < 1e-2) x += 0.5;
                if (kind.tag == ActTag::hard_swish &&
                    (std::abs(x - 3) < 1e-2 || std::abs(x + 3) < 1e-2))
                    x += 0.5;
                const double fd = finite_difference(
                    [&](double t) { return activate_scalar(kind, t); }, x, 1e-4);
                const double err = std::abs(activate_grad_scalar(kind, x) - fd);
                worst_ratio = std::max(worst_ratio, err / std::max(rtol * std::abs(fd), atol));
            }
        }
        out.push_back(result("activations", "grad_matches_fd_1000x6", worst_ratio, 1.0,
                             worst_ratio <= 1.0));
    }

    // Swish and Mish: bounded below (> -0.5 on [-20,20]), ~x at +20, and a
    // strict interior minimum at negative x.
    {
        double global_min = 0.0, at20_err = 0.0;
        bool interior_ok = true;
        for (const ActivationKind& kind : {ActivationKind::swish(), ActivationKind::mish()}) {
            double mn = 1e300, argmin = 0.0;
            for (int i = 0; i <= 40000; ++i) {
                const double x = -20.0 + i * 0.001;
                const double v = activate_scalar(kind, x);
                if (v < mn) {
                    mn = v;
                    argmin = x;
                }
            }
            global_min = std::min(global_min, mn);
            at20_err = std::max(at20_err, std::abs(activate_scalar(kind, 20.0) - 20.0));
            if (!(argmin < 0.0 && argmin > -20.0 && mn < activate_scalar(kind, 0.0) &&
                  mn < activate_scalar(kind, -20.0)))
                interior_ok = false;
        }
        out.push_back(result("activations", "bounded_below_min", global_min, -0.5,
                             global_min > -0.5));
        out.push_back(
            result("activations", "unbounded_above_f20", at20_err, 1e-6, at20_err <= 1e-6));
        out.push_back(result("activations", "nonmonotonic_interior_min", interior_ok ? 0.0 : 1.0,
                             0.0, interior_ok));
    }

    // Mish stays close to Swish(beta=1): the max gap on the 0.001 grid over
    // [-10,10] was measured once with a dense-sampling oracle and pinned.
    {
        const double pinned_max_gap = 0.18435114121777474;
        double max_gap = 0.0;
        for (int i = 0; i <= 20000; ++i) {
            const double x = -10.0 + i * 0.001;
            max_gap = std::max(max_gap, std::abs(activate_scalar(ActivationKind::mish(), x) -
                                                 activate_scalar(ActivationKind::swish(), x)));
        }
        const bool ok = std::abs(max_gap - pinned_max_gap) <= 0.01 * pinned_max_gap;
        out.push_back(result("activations", "mish_swish_max_gap", max_gap,
                             pinned_max_gap * 1.01, ok));
    }
    return out;
}

std::vector<CheckResult> suite_cost(const CheckOptions& opts) {
    Rng root = Rng(opts.seed).split("check.cost");
    std::vector<CheckResult> out;

    // DSC/SC ratio for the 3 -> 16, k=3, 320x320 configuration.
    {
        const DscScRatio r = dsc_sc_ratio(3, 16, 3, 320, 320);
        const double expect = 1.0 / 16.0 + 1.0 / 9.0;
        const double err = std::max(std::abs(r.ratio_p() - expect), std::abs(r.ratio_c() - expect));
        char detail[128];
        std::snprintf(detail, sizeof(detail), "ratio_p=%.5f ratio_c=%.5f vs ~0.174", r.ratio_p(),
                      r.ratio_c());
        out.push_back(result("cost", "dsc_sc_ratio_0p17361", err, 1e-12, err <= 1e-12, detail));
        const double vs_paper = std::abs(r.ratio_p() - 0.174);
        out.push_back(result("cost", "dsc_sc_ratio_near_0p174", vs_paper, 5e-4,
                             vs_paper <= 5e-4));
    }

    // ratio_p == ratio_c exactly, 50 random configurations.
    {
        int unequal = 0;
        Rng rng = root.split("ratios");
        for (int i = 0; i < 50; ++i) {
            const int in_c = rng.uniform_int(1, 512);
            const int out_c = rng.uniform_int(1, 512);
            const int k = 2 * rng.uniform_int(0, 3) + 1;
            const int oh = rng.uniform_int(1, 320), ow = rng.uniform_int(1, 320);
            if (!dsc_sc_ratio(in_c, out_c, k, oh, ow).exactly_equal()) ++unequal;
        }
        out.push_back(result("cost", "ratio_p_equals_ratio_c_exact_50", unequal, 0.0,
                             unequal == 0));
    }

    // Chained-pyramid comparison saving: analytic and counted routes.
    {
        const double analytic = sppf_efficiency({5, 9, 13}, 5, 3);
        const double vs_paper = std::abs(analytic - 277.8) / 277.8;
        char detail[64];
        std::snprintf(detail, sizeof(detail), "analytic=%.2f%%", analytic);
        out.push_back(result("cost", "sppf_efficiency_near_277p8", vs_paper, 1e-3,
                             vs_paper <= 1e-3, detail));

        // Count real comparisons on a 32x32 interior region.
        Rng rng = root.split("pool");
        const Tensor x = random_tensor(rng, 1, 1, 32, 32);
        auto interior_per_pixel = [](const Tensor& t, int k) {
            std::uint64_t cmp = 0, pix = 0;
            maxpool2d_counted(t, k, 1, k / 2, &cmp, &pix);
            return static_cast<double>(cmp) / static_cast<double>(pix);
        };
        const double spp_cnt =
            interior_per_pixel(x, 5) + interior_per_pixel(x, 9) + interior_per_pixel(x, 13);
        // Chained pools run at kernel 5 three times; the counter sees the same
        // per-pixel cost each stage.
        const double sppf_cnt = 3.0 * interior_per_pixel(x, 5);
        const double counted = (spp_cnt - sppf_cnt) / sppf_cnt * 100.0;
        const double route_gap = std::abs(counted - analytic);
        char detail2[96];
        std::snprintf(detail2, sizeof(detail2), "counted=%.2f%% (spp=%g sppf=%g per pixel)",
                      counted, spp_cnt, sppf_cnt);
        out.push_back(result("cost", "sppf_efficiency_counted_matches", route_gap, 1e-9,
                             route_gap <= 1e-9, detail2));

        const double display = sppf_efficiency_display_form({5, 9, 13}, 5, 3);
        out.push_back(result("cost", "sppf_display_form_yields_200",
                             std::abs(display - 200.0), 1e-9, std::abs(display - 200.0) <= 1e-9,
                             "display-form expression; no correctness claim"));
    }

    // GSConv cost against a same-shape dense conv: documented sweep
    // {64, 96, 128} at k=1, k_dw=5 stays in [0.58, 0.70].
    {
        int outside = 0;
        std::string detail = "ratios:";
        for (int c : {64, 96, 128}) {
            const LayerCost gs = cost_gsconv(c, c, 1, 5, 1, 32, 32);
            const LayerCost sc = cost_sc(c, c, 1, 32, 32);
            const double ratio = static_cast<double>(gs.flops) / static_cast<double>(sc.flops);
            char buf[48];
            std::snprintf(buf, sizeof(buf), " c=%d:%.4f", c, ratio);
            detail += buf;
            if (ratio < 0.58 || ratio > 0.70) ++outside;
        }
        out.push_back(result("cost", "gsconv_ratio_band_58_70", outside, 0.0, outside == 0,
                             detail));
    }

    // Pinned per-pixel examples: 64 channels -> 2848/4096, 128 -> 0.59765625.
    {
        const LayerCost gs64 = cost_gsconv(64, 64, 1, 5, 1, 1, 1);
        const LayerCost gs128 = cost_gsconv(128, 128, 1, 5, 1, 1, 1);
        const double r64 = static_cast<double>(gs64.flops) / 4096.0;
        const double r128 = static_cast<double>(gs128.flops) / 16384.0;
        const double err = std::max(std::abs(static_cast<double>(gs64.flops) - 2848.0),
                                    std::max(std::abs(r64 - 0.6953125),
                                             std::abs(r128 - 0.59765625)));
        out.push_back(result("cost", "gsconv_per_pixel_examples", err, 1e-12, err <= 1e-12));
    }

    // VoV-GSCSP strictly cheaper than the dense CSP baseline.
    {
        int not_lower = 0;
        std::string detail = "savings:";
        for (int c : {64, 128, 256}) {
            for (int n : {1, 3}) {
                const LayerCost vov = cost_vov_gscsp(c, c, n, 32, 32);
                const LayerCost csp = cost_csp(c, c, n, 32, 32);
                if (vov.flops >= csp.flops) ++not_lower;
                const double pct = 100.0 *
                                   (static_cast<double>(csp.flops) - static_cast<double>(vov.flops)) /
                                   static_cast<double>(csp.flops);
                char buf[64];
                std::snprintf(buf, sizeof(buf), " c=%d,n=%d:-%.2f%%", c, n, pct);
                detail += buf;
            }
        }
        out.push_back(result("cost", "vov_gscsp_below_csp", not_lower, 0.0, not_lower == 0,
                             detail));
    }

    // Runtime MAC counter on the naive conv equals the analytic count.
    {
        int mismatched = 0;
        Rng rng = root.split("macs");
        for (int i = 0; i < 50; ++i) {
            ConvParams p;
            p.groups = rng.uniform_int(0, 1) ? 1 : rng.uniform_int(1, 4);
            p.in_c = p.groups * rng.uniform_int(1, 6);
            p.out_c = p.groups * rng.uniform_int(1, 6);
            p.k = 2 * rng.uniform_int(0, 2) + 1;
            p.stride = rng.uniform_int(1, 2);
            const int h = rng.uniform_int(2, 12), w = rng.uniform_int(2, 12);
            const Tensor x = random_tensor(rng, 1, p.in_c, h, w);
            Tensor weight(p.out_c, p.in_c / p.groups, p.k, p.k);
            for (float& v : weight.data) v = rng.uniform(-1.0f, 1.0f);
            std::uint64_t macs = 0;
            const Tensor y = conv2d_naive(x, weight, {}, p, &macs);
            const LayerCost analytic = cost_conv(p.in_c, p.out_c, p.k, p.groups, y.h, y.w);
            if (macs != analytic.flops) ++mismatched;
        }
        out.push_back(result("cost", "runtime_mac_counter_matches_50", mismatched, 0.0,
                             mismatched == 0));
    }
    return out;
}

} // namespace

std::vector<std::string> check_suite_names() {
    return {"conv", "shuffle", "sppf", "blocks", "losses", "activations", "cost"};
}

std::vector<CheckResult> run_check_suite(const std::string& suite, const CheckOptions& opts) {
    if (suite == "all") {
        std::vector<CheckResult> all;
        for (const std::string& s : check_suite_names()) {
            std::vector<CheckResult> part = run_check_suite(s, opts);
            all.insert(all.end(), part.begin(), part.end());
        }
        return all;
    }
    if (suite == "conv") return suite_conv(opts);
    if (suite == "shuffle") return suite_shuffle(opts);
    if (suite == "sppf") return suite_sppf(opts);
    if (suite == "blocks") return suite_blocks(opts);
    if (suite == "losses") return suite_losses(opts);
    if (suite == "activations") return suite_activations(opts);
    if (suite == "cost") return suite_cost(opts);
    throw std::invalid_argument("unknown check suite: " + suite);
}

BenchStats bench_op(const std::string& op, int n, int c, int h, int w, int out_c, int k,
                    int repeat, std::uint64_t seed) {
    if (repeat < 1) throw std::invalid_argument("bench: repeat must be >= 1");
    Rng rng = Rng(seed).split("bench");
    const Tensor x = random_tensor(rng, n, c, h, w);

    std::function<void()> run;
    if (op == "conv_naive" || op == "conv_im2col" || op == "sc") {
        ConvParams p;
        p.in_c = c;
        p.out_c = out_c;
        p.k = k;
        Tensor weight(out_c, c, k, k);
        for (float& v : weight.data) v = rng.uniform(-1.0f, 1.0f);
        if (op == "conv_naive") {
            run = [x, weight, p] { volatile float sink = conv2d_naive(x, weight, {}, p).data[0]; (void)sink; };
        } else {
            run = [x, weight, p] { volatile float sink = conv2d_im2col(x, weight, {}, p).data[0]; (void)sink; };
        }
    } else if (op == "gsconv") {
        GSConvBlock block(c, out_c, k, 1, 5);
        randomize_block(block, rng.split("w"));
        run = [x, block] { volatile float sink = block.forward(x).data[0]; (void)sink; };
    } else {
        throw std::invalid_argument("bench: unknown op '" + op + "'");
    }

    for (int i = 0; i < 3; ++i) run(); // discarded warm-ups
    std::vector<double> samples(repeat);
    for (int i = 0; i < repeat; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        run();
        const auto t1 = std::chrono::steady_clock::now();
        samples[i] = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    std::sort(samples.begin(), samples.end());
    BenchStats stats;
    stats.samples = repeat;
    stats.median_ms = samples[repeat / 2];
    stats.p10_ms = samples[(repeat - 1) / 10];
    stats.p90_ms = samples[std::min(repeat - 1, repeat * 9 / 10)];
    return stats;
}

} // namespace slimconv
