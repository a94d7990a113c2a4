#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "slimconv/blocks.hpp"
#include "slimconv/cost.hpp"
#include "slimconv/rng.hpp"

using namespace slimconv;

namespace {

Tensor rand_tensor(Rng& rng, int n, int c, int h, int w, float lo = -1.0f, float hi = 1.0f) {
    Tensor t(n, c, h, w);
    for (float& v : t.data) v = rng.uniform(lo, hi);
    return t;
}

void fill_params(std::vector<ParamRef>& refs, Rng root) {
    for (const ParamRef& ref : refs) {
        Rng rng = root.split(ref.name);
        if (ref.tensor) {
            for (float& v : ref.tensor->data) v = rng.uniform(-0.7f, 0.7f);
        } else if (ref.name.ends_with(".bn.var")) {
            for (float& v : *ref.vec) v = rng.uniform(0.5f, 2.0f);
        } else if (!ref.name.ends_with(".bn.gamma")) {
            for (float& v : *ref.vec) v = rng.uniform(-0.5f, 0.5f);
        }
    }
}

} // namespace

TEST_CASE("gsconv: identity dense half and doubling depthwise half") {
    // sc is a 1x1 identity (weight 1, identity BN, no activation); dw scales
    // by 2. With out_c = 2 the shuffle is the identity, so the output stacks
    // [x, 2x].
    GSConvBlock block(1, 2, 1, 1, 1, std::nullopt);
    block.sc.weight.data = {1.0f};
    block.dw.weight.data = {2.0f};
    Rng rng(51);
    const Tensor x = rand_tensor(rng, 1, 1, 4, 4);
    const Tensor y = block.forward(x);
    REQUIRE(y.c == 2);
    for (int iy = 0; iy < 4; ++iy)
        for (int ix = 0; ix < 4; ++ix) {
            CHECK(y.at(0, 0, iy, ix) == x.at(0, 0, iy, ix));
            CHECK(y.at(0, 1, iy, ix) == 2.0f * x.at(0, 0, iy, ix));
        }
}

TEST_CASE("gsconv: out_c=4 channel order is [s0, d0, s1, d1]") {
    GSConvBlock block(1, 4, 1, 1, 1, std::nullopt);
    block.sc.weight.data = {1.0f, 2.0f};    // dense channels: x, 2x
    block.dw.weight.data = {10.0f, 100.0f}; // depthwise: 10*s0, 100*s1
    const Tensor x = Tensor::full(1, 1, 1, 1, 1.0f);
    const Tensor y = block.forward(x);
    CHECK(y.data == std::vector<float>{1.0f, 10.0f, 2.0f, 200.0f});
}

TEST_CASE("gsconv rejects odd out_c") {
    CHECK_THROWS_AS(GSConvBlock(4, 3, 1, 1, 5), std::invalid_argument);
    CHECK_THROWS_AS(GSConvBlock(4, 6, 1, 1, 5).forward(Tensor(1, 3, 2, 2)),
                    std::invalid_argument); // channel mismatch
}

TEST_CASE("gsconv equals an independent primitive composition") {
    Rng rng(57);
    GSConvBlock block(6, 8, 3, 1, 5);
    std::vector<ParamRef> refs;
    block.collect_params("g", refs);
    fill_params(refs, rng.split("w"));
    const Tensor x = rand_tensor(rng, 2, 6, 7, 7);

    const Tensor dense = block.sc.forward(x);
    const Tensor sparse = block.dw.forward(dense);
    const Tensor expect = channel_shuffle(concat_channels({&dense, &sparse}), 2);
    CHECK(bit_equal(block.forward(x), expect));
}

TEST_CASE("gs bottleneck with zero weights gives a zero tensor") {
    GSBottleneck block(4, 8);
    Rng rng(61);
    const Tensor x = rand_tensor(rng, 1, 4, 5, 5);
    const Tensor y = block.forward(x); // all conv weights are zero-initialized
    for (float v : y.data) CHECK(v == 0.0f);
    CHECK_THROWS_AS(GSBottleneck(4, 6), std::invalid_argument); // 6 % 4 != 0
}

TEST_CASE("vov_gscsp n=1 equals hand assembly") {
    Rng rng(67);
    VoVGSCSP block(8, 16, 1);
    std::vector<ParamRef> refs;
    block.collect_params("v", refs);
    fill_params(refs, rng.split("w"));
    const Tensor x = rand_tensor(rng, 1, 8, 6, 6);

    Tensor a = block.branch_a_entry.forward(x);
    a = block.chain[0].forward(a);
    const Tensor b = block.branch_b.forward(x);
    const Tensor expect = block.fuse.forward(concat_channels({&a, &b}));
    CHECK(bit_equal(block.forward(x), expect));
}

TEST_CASE("vov_gscsp is analytically cheaper than csp at matched config") {
    for (int c : {64, 128}) {
        const LayerCost vov = cost_vov_gscsp(c, c, 1, 16, 16);
        const LayerCost csp = cost_csp(c, c, 1, 16, 16);
        CHECK(vov.flops < csp.flops);
    }
}

TEST_CASE("spp and sppf") {
    SPPBlock spp;
    SPPFBlock sppf;

    const Tensor c = Tensor::full(1, 3, 6, 6, 2.5f);
    const Tensor sc = spp.forward(c);
    REQUIRE(sc.c == 12);
    for (float v : sc.data) CHECK(v == 2.5f);

    Rng rng(71);
    const Tensor x = rand_tensor(rng, 1, 3, 20, 20, -10, 10); // seeded random case
    CHECK(bit_equal(spp.forward(x), sppf.forward(x)));

    const Tensor px = rand_tensor(rng, 1, 2, 1, 1); // single pixel
    const Tensor py = spp.forward(px);
    REQUIRE(py.c == 8);
    for (int ic = 0; ic < 8; ++ic) CHECK(py.at(0, ic, 0, 0) == px.at(0, ic % 2, 0, 0));
}

TEST_CASE("se with zero weights halves the input exactly") {
    SEBlock block(8, 4);
    Rng rng(73);
    const Tensor x = rand_tensor(rng, 1, 8, 5, 5);
    const Tensor y = block.forward(x);
    for (std::size_t i = 0; i < x.data.size(); ++i) CHECK(y.data[i] == 0.5f * x.data[i]);
    CHECK_THROWS_AS(SEBlock(8, 3), std::invalid_argument);
}

TEST_CASE("cbam with zero weights quarters the input exactly") {
    CBAMBlock block(8, 4);
    Rng rng(79);
    const Tensor x = rand_tensor(rng, 1, 8, 5, 5);
    const Tensor y = block.forward(x);
    for (std::size_t i = 0; i < x.data.size(); ++i) CHECK(y.data[i] == 0.25f * x.data[i]);
}

TEST_CASE("ca with zero weights quarters the input exactly") {
    CABlock block(8, 4);
    Rng rng(83);
    const Tensor x = rand_tensor(rng, 1, 8, 5, 7);
    const Tensor y = block.forward(x);
    for (std::size_t i = 0; i < x.data.size(); ++i) CHECK(y.data[i] == 0.25f * x.data[i]);
    CHECK_THROWS_AS(CABlock(8, 16), std::invalid_argument);
}

TEST_CASE("attention outputs stay within the input magnitude") {
    Rng rng(89);
    SEBlock se(8, 2);
    CBAMBlock cbam(8, 2);
    CABlock ca(8, 2);
    std::vector<ParamRef> refs;
    se.collect_params("se", refs);
    cbam.collect_params("cbam", refs);
    ca.collect_params("ca", refs);
    fill_params(refs, rng.split("w"));
    const Tensor x = rand_tensor(rng, 2, 8, 6, 6, -4, 4);
    for (const Tensor& y : {se.forward(x), cbam.forward(x), ca.forward(x)})
        for (std::size_t i = 0; i < x.data.size(); ++i)
            CHECK(std::abs(y.data[i]) <= std::abs(x.data[i]));
}

TEST_CASE("stride-1 blocks preserve spatial shape") {
    Rng rng(97);
    const Tensor x = rand_tensor(rng, 1, 8, 9, 11);
    GSConvBlock gs(8, 10, 3, 1, 5);
    GSBottleneck gsb(8, 12);
    VoVGSCSP vov(8, 16, 2);
    CSPBlock csp(8, 16, 2);
    DSCUnit dsc(8, 5, 3);
    for (const Tensor& y : {gs.forward(x), gsb.forward(x), vov.forward(x), csp.forward(x),
                            dsc.forward(x)}) {
        CHECK(y.h == x.h);
        CHECK(y.w == x.w);
    }
}

TEST_CASE("conv_bn_act without bn or act is a plain conv") {
    ConvBNAct plain(3, 2, 1, 1, 1, false, false, std::nullopt);
    CHECK_FALSE(plain.bn.has_value());
    Rng rng(101);
    const Tensor x = rand_tensor(rng, 1, 3, 4, 4);
    std::vector<ParamRef> refs;
    plain.collect_params("p", refs);
    CHECK(refs.size() == 1); // weight only
    fill_params(refs, rng.split("w"));
    CHECK(bit_equal(plain.forward(x), conv2d(x, plain.weight, {}, plain.conv)));
}
