#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "slimconv/cost.hpp"
#include "slimconv/graph.hpp"
#include "slimconv/ops.hpp"
#include "slimconv/rng.hpp"

using namespace slimconv;

TEST_CASE("cost_sc at the 320x320, 3->16, k=3 configuration") {
    const LayerCost c = cost_sc(3, 16, 3, 320, 320);
    CHECK(c.params == 432);
    CHECK(c.flops == 44236800ull); // 320*320*432
}

TEST_CASE("cost_sc corner and identity") {
    const LayerCost one = cost_sc(1, 1, 1, 1, 1);
    CHECK(one.params == 1);
    CHECK(one.flops == 1);
    // flops = params * out_h * out_w for any dense stride-1 config.
    const LayerCost c = cost_sc(7, 13, 5, 19, 23);
    CHECK(c.flops == c.params * 19ull * 23ull);
}

TEST_CASE("cost_dsc ratios") {
    const DscScRatio r = dsc_sc_ratio(3, 16, 3, 320, 320);
    CHECK(r.ratio_p() == doctest::Approx(1.0 / 16 + 1.0 / 9).epsilon(1e-12));
    CHECK(std::abs(r.ratio_p() - 0.174) < 5e-4);
    CHECK(r.exactly_equal());

    // DSC is costlier than SC when out_c and k are trivial.
    const LayerCost dsc = cost_dsc(6, 1, 1, 4, 4);
    const LayerCost sc = cost_sc(6, 1, 1, 4, 4);
    CHECK(dsc.params == 2ull * 6);
    CHECK(dsc.params > sc.params);
}

TEST_CASE("ratio_p equals ratio_c exactly across random configs") {
    Rng rng(103);
    for (int i = 0; i < 25; ++i) {
        const DscScRatio r =
            dsc_sc_ratio(rng.uniform_int(1, 256), rng.uniform_int(1, 256),
                         2 * rng.uniform_int(0, 3) + 1, rng.uniform_int(1, 128),
                         rng.uniform_int(1, 128));
        CHECK(r.exactly_equal());
    }
}

TEST_CASE("gsconv cost: pinned per-pixel examples and band") {
    const LayerCost gs64 = cost_gsconv(64, 64, 1, 5, 1, 1, 1);
    CHECK(gs64.flops == 2848); // 64*32 + 32*25
    CHECK(static_cast<double>(gs64.flops) / 4096.0 == doctest::Approx(0.6953125));

    const LayerCost gs128 = cost_gsconv(128, 128, 1, 5, 1, 1, 1);
    CHECK(static_cast<double>(gs128.flops) / 16384.0 == doctest::Approx(0.59765625));

    for (int c : {64, 96, 128}) {
        const double ratio = static_cast<double>(cost_gsconv(c, c, 1, 5, 1, 8, 8).flops) /
                             static_cast<double>(cost_sc(c, c, 1, 8, 8).flops);
        CHECK(ratio >= 0.58);
        CHECK(ratio <= 0.70);
    }
}

TEST_CASE("gsconv cost accounts for stride") {
    const LayerCost s1 = cost_gsconv(32, 32, 3, 5, 1, 16, 16);
    const LayerCost s2 = cost_gsconv(32, 32, 3, 5, 2, 16, 16);
    CHECK(s2.out_h == 8);
    // Dense half shrinks by 4x; the depthwise half runs on the strided map.
    CHECK(s2.flops < s1.flops);
    CHECK(s1.params == s2.params);
}

TEST_CASE("vov_gscsp cheaper than csp across the documented grid") {
    for (int c : {64, 128, 256})
        for (int n : {1, 3})
            CHECK(cost_vov_gscsp(c, c, n, 32, 32).flops < cost_csp(c, c, n, 32, 32).flops);
}

TEST_CASE("cost scales linearly with output area and ignores batch") {
    const LayerCost base = cost_gsconv(16, 16, 1, 5, 1, 8, 8);
    const LayerCost tall = cost_gsconv(16, 16, 1, 5, 1, 16, 8);
    CHECK(tall.flops == 2 * base.flops);
    CHECK(tall.params == base.params);
}

TEST_CASE("sppf_efficiency") {
    CHECK(sppf_efficiency({5, 9, 13}, 5, 3) == doctest::Approx(277.7777778).epsilon(1e-9));
    CHECK(sppf_efficiency({5}, 5, 1) == doctest::Approx(0.0));
    CHECK_THROWS_AS(sppf_efficiency({5, 9, 14}, 5, 3), std::invalid_argument);
    CHECK_THROWS_AS(sppf_efficiency({5, 9, 13}, 5, 2), std::invalid_argument); // 13 needs 3 links
    CHECK(sppf_efficiency_display_form({5, 9, 13}, 5, 3) == doctest::Approx(200.0));
}

TEST_CASE("counted pool comparisons match the analytic per-pixel cost") {
    Rng rng(107);
    Tensor x(1, 1, 32, 32);
    for (float& v : x.data) v = rng.uniform(-1, 1);
    for (int k : {5, 9, 13}) {
        std::uint64_t cmp = 0, pix = 0;
        maxpool2d_counted(x, k, 1, k / 2, &cmp, &pix);
        CHECK(pix == static_cast<std::uint64_t>((32 - k + 1) * (32 - k + 1)));
        CHECK(cmp == pix * static_cast<std::uint64_t>(k * k - 1));
    }
}

TEST_CASE("runtime MAC counter equals analytic flops") {
    Rng rng(109);
    for (int i = 0; i < 10; ++i) {
        ConvParams p;
        p.groups = rng.uniform_int(1, 3);
        p.in_c = p.groups * rng.uniform_int(1, 4);
        p.out_c = p.groups * rng.uniform_int(1, 4);
        p.k = 2 * rng.uniform_int(0, 2) + 1;
        p.stride = rng.uniform_int(1, 2);
        Tensor x(1, p.in_c, rng.uniform_int(2, 9), rng.uniform_int(2, 9));
        for (float& v : x.data) v = rng.uniform(-1, 1);
        Tensor w(p.out_c, p.in_c / p.groups, p.k, p.k);
        for (float& v : w.data) v = rng.uniform(-1, 1);
        std::uint64_t macs = 0;
        const Tensor y = conv2d_naive(x, w, {}, p, &macs);
        CHECK(macs == cost_conv(p.in_c, p.out_c, p.k, p.groups, y.h, y.w).flops);
    }
}

TEST_CASE("graph_cost: single conv matches cost_sc") {
    const GraphSpec spec = parse_spec(
        "input 1 3 64 64\nlayer conv name=c1 in=input out_c=8 k=3 s=1\noutput c1\n");
    const CostReport report = graph_cost(spec);
    REQUIRE(report.rows.size() == 1);
    const LayerCost expect = cost_sc(3, 8, 3, 64, 64);
    CHECK(report.rows[0].params == expect.params);
    CHECK(report.rows[0].flops == expect.flops);
    CHECK(report.total_flops == expect.flops);
}

TEST_CASE("graph_cost: empty layer list has zero totals") {
    const GraphSpec spec = parse_spec("input 1 3 8 8\noutput input\n");
    const CostReport report = graph_cost(spec);
    CHECK(report.rows.empty());
    CHECK(report.total_params == 0);
    CHECK(report.total_flops == 0);
}

TEST_CASE("report totals equal the sum of rows") {
    const GraphSpec spec = load_spec_file(std::string(SLIMCONV_SPECS_DIR) +
                                          "/slimneck_v5_toy.spec");
    const CostReport report = graph_cost(spec);
    std::uint64_t params = 0, flops = 0;
    for (const LayerCost& r : report.rows) {
        params += r.params;
        flops += r.flops;
    }
    CHECK(params == report.total_params);
    CHECK(flops == report.total_flops);
}

TEST_CASE("csv rendering carries the documented header") {
    const GraphSpec spec = parse_spec(
        "input 1 3 16 16\nlayer conv name=c1 in=input out_c=4 k=1 s=1\noutput c1\n");
    const std::string csv = render_csv(graph_cost(spec));
    CHECK(csv.rfind("name,type,in_shape,out_shape,params,flops,pct_of_total\n", 0) == 0);
    CHECK(csv.find(",3072,") != std::string::npos); // conv 3->4 k1 at 16x16: 12 params, 3072 MACs
    const std::string doubled = render_csv(graph_cost(spec), true);
    CHECK(doubled.find(",6144,") != std::string::npos);
}
