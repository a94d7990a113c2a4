#include "slimconv/blocks.hpp"

#include <stdexcept>

namespace slimconv {

BatchNorm BatchNorm::identity(int c) {
    BatchNorm bn;
    bn.mean.assign(c, 0.0f);
    bn.var.assign(c, 1.0f);
    bn.gamma.assign(c, 1.0f);
    bn.beta.assign(c, 0.0f);
    return bn;
}

ConvBNAct::ConvBNAct(int in_c, int out_c, int k, int stride, int groups, bool with_bias,
                     bool with_bn, std::optional<ActivationKind> act_)
    : act(act_) {
    conv.in_c = in_c;
    conv.out_c = out_c;
    conv.k = k;
    conv.stride = stride;
    conv.groups = groups;
    conv.has_bias = with_bias;
    conv.validate();
    weight = Tensor(out_c, in_c / groups, k, k);
    if (with_bias) bias.assign(out_c, 0.0f);
    if (with_bn) bn = BatchNorm::identity(out_c);
}

Tensor ConvBNAct::forward(const Tensor& x) const {
    Tensor y = conv2d(x, weight, bias, conv);
    if (bn) y = bn->forward(y);
    if (act) y = activate(*act, y);
    return y;
}

void ConvBNAct::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
    out.push_back({prefix + ".w", &weight, nullptr});
    if (conv.has_bias) out.push_back({prefix + ".b", nullptr, &bias});
    if (bn) {
        out.push_back({prefix + ".bn.gamma", nullptr, &bn->gamma});
        out.push_back({prefix + ".bn.beta", nullptr, &bn->beta});
        out.push_back({prefix + ".bn.mean", nullptr, &bn->mean});
        out.push_back({prefix + ".bn.var", nullptr, &bn->var});
    }
}

DSCUnit::DSCUnit(int in_c, int out_c, int k_dw, std::optional<ActivationKind> act)
    : depthwise(in_c, in_c, k_dw, 1, in_c, false, true, act),
      pointwise(in_c, out_c, 1, 1, 1, false, true, act) {}

void DSCUnit::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
    depthwise.collect_params(prefix + ".dw", out);
    pointwise.collect_params(prefix + ".pw", out);
}

GSConvBlock::GSConvBlock(int in_c_, int out_c_, int k, int stride, int k_dw,
                         std::optional<ActivationKind> act)
    : in_c(in_c_), out_c(out_c_) {
    if (out_c < 2 || out_c % 2 != 0)
        throw std::invalid_argument("gsconv: out_c must be even and >= 2, got " +
                                    std::to_string(out_c));
    const int half = out_c / 2;
    sc = ConvBNAct(in_c, half, k, stride, 1, false, true, act);
    dw = ConvBNAct(half, half, k_dw, 1, half, false, true, act);
}

Tensor GSConvBlock::forward(const Tensor& x) const {
    if (x.c != in_c)
        throw std::invalid_argument("gsconv: input has " + std::to_string(x.c) +
                                    " channels, expected " + std::to_string(in_c));
    const Tensor dense = sc.forward(x);
    const Tensor sparse = dw.forward(dense);
    return channel_shuffle(concat_channels({&dense, &sparse}), 2);
}

void GSConvBlock::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
    sc.collect_params(prefix + ".sc", out);
    dw.collect_params(prefix + ".dw", out);
}

GSBottleneck::GSBottleneck(int in_c_, int out_c_, std::optional<ActivationKind> act,
                           bool activate_second)
    : in_c(in_c_), out_c(out_c_) {
    if (out_c % 2 != 0 || (out_c / 2) % 2 != 0)
        throw std::invalid_argument("gs_bottleneck: out_c must be divisible by 4, got " +
                                    std::to_string(out_c));
    const int hidden = out_c / 2;
    g1 = GSConvBlock(in_c, hidden, 1, 1, 5, act);
    g2 = GSConvBlock(hidden, out_c, 3, 1, 5, activate_second ? act : std::nullopt);
    shortcut = ConvBNAct(in_c, out_c, 1, 1, 1, false, true, std::nullopt);
}

Tensor GSBottleneck::forward(const Tensor& x) const {
    const Tensor main = g2.forward(g1.forward(x));
    const Tensor skip = shortcut.forward(x);
    return elementwise(main, skip, EltwiseMode::add);
}

void GSBottleneck::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
    g1.collect_params(prefix + ".g1", out);
    g2.collect_params(prefix + ".g2", out);
    shortcut.collect_params(prefix + ".shortcut", out);
}

VoVGSCSP::VoVGSCSP(int in_c_, int out_c_, int n_, std::optional<ActivationKind> act)
    : in_c(in_c_), out_c(out_c_), n(n_) {
    if (out_c % 2 != 0)
        throw std::invalid_argument("vov_gscsp: out_c must be even, got " +
                                    std::to_string(out_c));
    if (n < 1) throw std::invalid_argument("vov_gscsp: n must be >= 1");
    const int hidden = out_c / 2;
    branch_a_entry = ConvBNAct(in_c, hidden, 1, 1, 1, false, true, act);
    chain.reserve(n);
    for (int i = 0; i < n; ++i) chain.emplace_back(hidden, hidden, act);
    branch_b = ConvBNAct(in_c, hidden, 1, 1, 1, false, true, act);
    fuse = ConvBNAct(2 * hidden, out_c, 1, 1, 1, false, true, act);
}

Tensor VoVGSCSP::forward(const Tensor& x) const {
    Tensor a = branch_a_entry.forward(x);
    for (const GSBottleneck& b : chain) a = b.forward(a);
    const Tensor bypass = branch_b.forward(x);
    // One-shot aggregation: the single concat in the block.
    return fuse.forward(concat_channels({&a, &bypass}));
}

void VoVGSCSP::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
    branch_a_entry.collect_params(prefix + ".a0", out);
    for (std::size_t i = 0; i < chain.size(); ++i)
        chain[i].collect_params(prefix + ".gsb" + std::to_string(i), out);
    branch_b.collect_params(prefix + ".b", out);
    fuse.collect_params(prefix + ".fuse", out);
}

CSPBlock::CSPBlock(int in_c_, int out_c_, int n_, std::optional<ActivationKind> act)
    : in_c(in_c_), out_c(out_c_), n(n_) {
    if (out_c % 2 != 0)
        throw std::invalid_argument("csp: out_c must be even, got " + std::to_string(out_c));
    if (n < 1) throw std::invalid_argument("csp: n must be >= 1");
    const int hidden = out_c / 2;
    branch_a_entry = ConvBNAct(in_c, hidden, 1, 1, 1, false, true, act);
    chain.reserve(n);
    for (int i = 0; i < n; ++i)
        chain.push_back({ConvBNAct(hidden, hidden, 1, 1, 1, false, true, act),
                         ConvBNAct(hidden, hidden, 3, 1, 1, false, true, act)});
    branch_b = ConvBNAct(in_c, hidden, 1, 1, 1, false, true, act);
    fuse = ConvBNAct(2 * hidden, out_c, 1, 1, 1, false, true, act);
}

Tensor CSPBlock::forward(const Tensor& x) const {
    Tensor a = branch_a_entry.forward(x);
    for (const StdBottleneck& b : chain) {
        const Tensor t = b.cv2.forward(b.cv1.forward(a));
        a = elementwise(a, t, EltwiseMode::add);
    }
    const Tensor bypass = branch_b.forward(x);
    return fuse.forward(concat_channels({&a, &bypass}));
}

void CSPBlock::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
    branch_a_entry.collect_params(prefix + ".a0", out);
    for (std::size_t i = 0; i < chain.size(); ++i) {
        chain[i].cv1.collect_params(prefix + ".btl" + std::to_string(i) + ".cv1", out);
        chain[i].cv2.collect_params(prefix + ".btl" + std::to_string(i) + ".cv2", out);
    }
    branch_b.collect_params(prefix + ".b", out);
    fuse.collect_params(prefix + ".fuse", out);
}

Tensor SPPBlock::forward(const Tensor& x) const {
    const Tensor p5 = maxpool2d(x, 5);
    const Tensor p9 = maxpool2d(x, 9);
    const Tensor p13 = maxpool2d(x, 13);
    return concat_channels({&x, &p5, &p9, &p13});
}

Tensor SPPFBlock::forward(const Tensor& x) const {
    const Tensor p1 = maxpool2d(x, 5);
    const Tensor p2 = maxpool2d(p1, 5);
    const Tensor p3 = maxpool2d(p2, 5);
    return concat_channels({&x, &p1, &p2, &p3});
}

namespace {

void check_reduction(const char* what, int c, int r) {
    if (r < 1 || c % r != 0)
        throw std::invalid_argument(std::string(what) + ": reduction r (" + std::to_string(r) +
                                    ") must divide c (" + std::to_string(c) + ")");
}

} // namespace

SEBlock::SEBlock(int c_, int r_) : c(c_), r(r_) {
    check_reduction("se", c, r);
    fc1 = ConvBNAct(c, c / r, 1, 1, 1, true, false, ActivationKind::relu());
    fc2 = ConvBNAct(c / r, c, 1, 1, 1, true, false, ActivationKind::sigmoid());
}

Tensor SEBlock::forward(const Tensor& x) const {
    if (x.c != c)
        throw std::invalid_argument("se: input has " + std::to_string(x.c) +
                                    " channels, expected " + std::to_string(c));
    const Tensor weights = fc2.forward(fc1.forward(global_avg_pool(x)));
    return broadcast_scale(x, weights);
}

void SEBlock::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
    fc1.collect_params(prefix + ".fc1", out);
    fc2.collect_params(prefix + ".fc2", out);
}

CBAMBlock::CBAMBlock(int c_, int r_) : c(c_), r(r_) {
    check_reduction("cbam", c, r);
    fc1 = ConvBNAct(c, c / r, 1, 1, 1, true, false, ActivationKind::relu());
    fc2 = ConvBNAct(c / r, c, 1, 1, 1, true, false, std::nullopt);
    spatial = ConvBNAct(2, 1, 7, 1, 1, true, false, ActivationKind::sigmoid());
}

Tensor CBAMBlock::forward(const Tensor& x) const {
    if (x.c != c)
        throw std::invalid_argument("cbam: input has " + std::to_string(x.c) +
                                    " channels, expected " + std::to_string(c));
    // Channel stage: shared MLP over both global pools, summed, sigmoid.
    const Tensor gap_avg = global_avg_pool(x);
    const Tensor gap_max =
        directional_pool(directional_pool(x, Axis::height, PoolMode::max), Axis::width,
                         PoolMode::max);
    const Tensor mlp_sum = elementwise(fc2.forward(fc1.forward(gap_avg)),
                                       fc2.forward(fc1.forward(gap_max)), EltwiseMode::add);
    const Tensor ch_scale = activate(ActivationKind::sigmoid(), mlp_sum);
    const Tensor refined = broadcast_scale(x, ch_scale);

    // Spatial stage on the channel-refined tensor.
    const Tensor st_max = channel_pixel_stats(refined, PoolMode::max);
    const Tensor st_mean = channel_pixel_stats(refined, PoolMode::avg);
    const Tensor sp_map = spatial.forward(concat_channels({&st_max, &st_mean})); // (n,1,h,w)

    Tensor expanded(x.n, x.c, x.h, x.w);
    for (int in = 0; in < x.n; ++in)
        for (int ic = 0; ic < x.c; ++ic)
            for (int iy = 0; iy < x.h; ++iy)
                for (int ix = 0; ix < x.w; ++ix)
                    expanded.at(in, ic, iy, ix) = sp_map.at(in, 0, iy, ix);
    return elementwise(refined, expanded, EltwiseMode::mul);
}

void CBAMBlock::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
    fc1.collect_params(prefix + ".fc1", out);
    fc2.collect_params(prefix + ".fc2", out);
    spatial.collect_params(prefix + ".spatial", out);
}

CABlock::CABlock(int c_, int r_) : c(c_), r(r_) {
    check_reduction("ca", c, r);
    reduce = ConvBNAct(c, c / r, 1, 1, 1, false, true, ActivationKind::hard_swish());
    attn_h = ConvBNAct(c / r, c, 1, 1, 1, true, false, ActivationKind::sigmoid());
    attn_w = ConvBNAct(c / r, c, 1, 1, 1, true, false, ActivationKind::sigmoid());
}

Tensor CABlock::forward(const Tensor& x) const {
    if (x.c != c)
        throw std::invalid_argument("ca: input has " + std::to_string(x.c) +
                                    " channels, expected " + std::to_string(c));
    // (n,c,h,1) and (n,c,1,w) average pools, laid side by side as (n,c,1,h+w).
    const Tensor pool_h = directional_pool(x, Axis::width, PoolMode::avg);
    const Tensor pool_w = directional_pool(x, Axis::height, PoolMode::avg);
    const Tensor pool_h_t = reshape(pool_h, x.n, x.c, 1, x.h);
    Tensor cat(x.n, x.c, 1, x.h + x.w);
    for (int in = 0; in < x.n; ++in) {
        for (int ic = 0; ic < x.c; ++ic) {
            for (int iy = 0; iy < x.h; ++iy) cat.at(in, ic, 0, iy) = pool_h_t.at(in, ic, 0, iy);
            for (int ix = 0; ix < x.w; ++ix) cat.at(in, ic, 0, x.h + ix) = pool_w.at(in, ic, 0, ix);
        }
    }
    const Tensor stem = reduce.forward(cat); // (n, c/r, 1, h+w)
    Tensor part_h(x.n, stem.c, 1, x.h);
    Tensor part_w(x.n, stem.c, 1, x.w);
    for (int in = 0; in < x.n; ++in) {
        for (int ic = 0; ic < stem.c; ++ic) {
            for (int iy = 0; iy < x.h; ++iy) part_h.at(in, ic, 0, iy) = stem.at(in, ic, 0, iy);
            for (int ix = 0; ix < x.w; ++ix)
                part_w.at(in, ic, 0, ix) = stem.at(in, ic, 0, x.h + ix);
        }
    }
    const Tensor a_h = reshape(attn_h.forward(part_h), x.n, x.c, x.h, 1); // (n,c,h,1)
    const Tensor a_w = attn_w.forward(part_w);                            // (n,c,1,w)
    return broadcast_scale(broadcast_scale(x, a_h), a_w);
}

void CABlock::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
    reduce.collect_params(prefix + ".reduce", out);
    attn_h.collect_params(prefix + ".attn_h", out);
    attn_w.collect_params(prefix + ".attn_w", out);
}

Tensor reshape(const Tensor& x, int n, int c, int h, int w) {
    Tensor out(n, c, h, w);
    if (out.data.size() != x.data.size())
        throw std::invalid_argument("reshape: element count mismatch: " + x.shape_str() +
                                    " -> " + out.shape_str());
    out.data = x.data;
    return out;
}

} // namespace slimconv
