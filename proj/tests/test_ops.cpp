#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "slimconv/ops.hpp"
#include "slimconv/rng.hpp"
#include "slimconv/tensor.hpp"

using namespace slimconv;

namespace {

Tensor rand_tensor(Rng& rng, int n, int c, int h, int w, float lo = -1.0f, float hi = 1.0f) {
    Tensor t(n, c, h, w);
    for (float& v : t.data) v = rng.uniform(lo, hi);
    return t;
}

} // namespace

TEST_CASE("tensor invariants") {
    Tensor t(2, 3, 4, 5);
    CHECK(t.size() == 120);
    CHECK_THROWS_AS(Tensor(0, 1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(Tensor(1, 1, -2, 1), std::invalid_argument);
    CHECK(Tensor::full(1, 1, 2, 2, 3.5f).data == std::vector<float>(4, 3.5f));
}

TEST_CASE("conv2d identity kernel passes input through") {
    const Tensor x = Tensor::full(1, 1, 3, 3, 2.0f);
    Tensor w(1, 1, 1, 1);
    w.data[0] = 1.0f;
    ConvParams p;
    const Tensor y = conv2d_naive(x, w, {}, p);
    CHECK(bit_equal(x, y));
}

TEST_CASE("conv2d hand-evaluated 3x3 over 2x2 input") {
    Tensor x(1, 1, 2, 2);
    x.data = {1, 2, 3, 4};
    const Tensor w = Tensor::full(1, 1, 3, 3, 1.0f);
    ConvParams p;
    p.k = 3;
    const Tensor y = conv2d_naive(x, w, {}, p);
    CHECK(y.h == 2);
    CHECK(y.w == 2);
    for (float v : y.data) CHECK(v == doctest::Approx(10.0f));
}

TEST_CASE("conv2d depthwise per-channel scaling") {
    Tensor x(1, 2, 1, 1);
    x.data = {5, 7};
    Tensor w(2, 1, 1, 1);
    w.data = {2, 3};
    ConvParams p;
    p.in_c = p.out_c = p.groups = 2;
    const Tensor y = conv2d_naive(x, w, {}, p);
    CHECK(y.data[0] == 10.0f);
    CHECK(y.data[1] == 21.0f);
}

TEST_CASE("conv2d rejects mismatched shapes naming the dimension") {
    const Tensor x(1, 3, 4, 4);
    const Tensor w(2, 3, 1, 1);
    ConvParams p;
    p.in_c = 4; // disagrees with x.c
    p.out_c = 2;
    CHECK_THROWS_WITH_AS(conv2d_naive(x, w, {}, p),
                         doctest::Contains("input channels"), std::invalid_argument);
    ConvParams q;
    q.in_c = 3;
    q.out_c = 5; // disagrees with weight
    CHECK_THROWS_WITH_AS(conv2d_naive(x, w, {}, q), doctest::Contains("weight shape"),
                         std::invalid_argument);
}

TEST_CASE("conv2d im2col is byte-identical to naive, grouped included") {
    Rng rng(42);
    // The seeded 1x8x16x16 case plus a grouped and a strided one.
    struct Cfg {
        int in_c, out_c, groups, k, stride;
    };
    for (const Cfg cfg : {Cfg{8, 8, 1, 3, 1}, Cfg{8, 4, 4, 3, 1}, Cfg{6, 9, 3, 5, 2}}) {
        ConvParams p;
        p.in_c = cfg.in_c;
        p.out_c = cfg.out_c;
        p.groups = cfg.groups;
        p.k = cfg.k;
        p.stride = cfg.stride;
        p.has_bias = true;
        const Tensor x = rand_tensor(rng, 1, p.in_c, 16, 16);
        Tensor w(p.out_c, p.in_c / p.groups, p.k, p.k);
        for (float& v : w.data) v = rng.uniform(-1, 1);
        std::vector<float> bias(p.out_c);
        for (float& v : bias) v = rng.uniform(-1, 1);
        CHECK(bit_equal(conv2d_naive(x, w, bias, p), conv2d_im2col(x, w, bias, p)));
    }
}

TEST_CASE("conv2d is deterministic across repeated evaluation") {
    Rng rng(7);
    const Tensor x = rand_tensor(rng, 2, 4, 9, 9);
    Tensor w(6, 2, 3, 3);
    for (float& v : w.data) v = rng.uniform(-1, 1);
    ConvParams p;
    p.in_c = 4;
    p.out_c = 6;
    p.groups = 2;
    p.k = 3;
    CHECK(bit_equal(conv2d_naive(x, w, {}, p), conv2d_naive(x, w, {}, p)));
    CHECK(bit_equal(conv2d_im2col(x, w, {}, p), conv2d_im2col(x, w, {}, p)));
}

TEST_CASE("maxpool2d constants, hand case, and errors") {
    const Tensor c = Tensor::full(1, 2, 4, 4, 3.25f);
    CHECK(bit_equal(maxpool2d(c, 3), c)); // idempotent on constants at stride 1

    Tensor x(1, 1, 3, 3);
    x.data = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    const Tensor y = maxpool2d(x, 3);
    CHECK(y.at(0, 0, 1, 1) == 9.0f);
    CHECK(y.at(0, 0, 0, 0) == 5.0f); // padding never wins

    CHECK_THROWS_AS(maxpool2d(x, 4), std::invalid_argument);       // even kernel
    CHECK_THROWS_AS(maxpool2d(x, 5, 1, 0), std::invalid_argument); // degenerate geometry
    CHECK_THROWS_AS(maxpool2d(x, 3, 1, 2), std::invalid_argument); // pad beyond k/2
}

TEST_CASE("maxpool2d is monotone") {
    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
        const Tensor a = rand_tensor(rng, 1, 2, 7, 7);
        Tensor b = a;
        for (float& v : b.data) v += rng.uniform(0.0f, 1.0f);
        const Tensor pa = maxpool2d(a, 3), pb = maxpool2d(b, 3);
        for (std::size_t j = 0; j < pa.data.size(); ++j) CHECK(pa.data[j] <= pb.data[j]);
    }
}

TEST_CASE("global_avg_pool") {
    CHECK(global_avg_pool(Tensor::full(2, 3, 4, 5, 1.5f)).data == std::vector<float>(6, 1.5f));
    Tensor x(1, 1, 2, 2);
    x.data = {1, 2, 3, 4};
    CHECK(global_avg_pool(x).data[0] == doctest::Approx(2.5f));
    Tensor y(1, 2, 1, 2);
    y.data = {1, 3, -2, 2};
    const Tensor g = global_avg_pool(y);
    CHECK(g.data[0] == doctest::Approx(2.0f));
    CHECK(g.data[1] == doctest::Approx(0.0f));
}

TEST_CASE("directional_pool collapses one axis") {
    const Tensor c = Tensor::full(1, 2, 3, 4, 7.0f);
    CHECK(directional_pool(c, Axis::height, PoolMode::avg).data == std::vector<float>(8, 7.0f));

    Tensor x(1, 1, 2, 3);
    x.data = {1, 2, 3, 4, 5, 6};
    const Tensor col = directional_pool(x, Axis::width, PoolMode::avg); // (1,1,2,1)
    CHECK(col.h == 2);
    CHECK(col.w == 1);
    CHECK(col.data[0] == doctest::Approx(2.0f));
    CHECK(col.data[1] == doctest::Approx(5.0f));
    const Tensor row = directional_pool(x, Axis::height, PoolMode::max); // (1,1,1,3)
    CHECK(row.h == 1);
    CHECK(row.data == std::vector<float>{4, 5, 6});
}

TEST_CASE("channel_pixel_stats") {
    Rng rng(3);
    const Tensor single = rand_tensor(rng, 1, 1, 3, 3);
    CHECK(bit_equal(channel_pixel_stats(single, PoolMode::max), single));
    CHECK(bit_equal(channel_pixel_stats(single, PoolMode::avg), single));

    Tensor x(1, 2, 1, 1);
    x.data = {3, 5};
    CHECK(channel_pixel_stats(x, PoolMode::max).data[0] == 5.0f);
    CHECK(channel_pixel_stats(x, PoolMode::avg).data[0] == doctest::Approx(4.0f));

    Tensor y(1, 3, 1, 1);
    y.data = {-1, 0, 1};
    CHECK(channel_pixel_stats(y, PoolMode::avg).data[0] == doctest::Approx(0.0f));
}

TEST_CASE("batch_norm_inference values and errors") {
    Tensor x(1, 1, 1, 1);
    x.data = {2.0f};
    CHECK(batch_norm_inference(x, {0}, {1}, {1}, {0}, 0.0f).data[0] == 2.0f); // identity
    CHECK(batch_norm_inference(x, {2}, {4}, {3}, {1}, 0.0f).data[0] == doctest::Approx(1.0f));
    x.data = {4.0f};
    CHECK(batch_norm_inference(x, {2}, {4}, {3}, {1}, 0.0f).data[0] == doctest::Approx(4.0f));
    CHECK_THROWS_AS(batch_norm_inference(x, {0, 0}, {1}, {1}, {0}, 0.0f), std::invalid_argument);
}

TEST_CASE("concat_channels ordering and split round-trip") {
    const Tensor a = Tensor::full(1, 1, 2, 2, 1.0f);
    const Tensor b = Tensor::full(1, 1, 2, 2, 2.0f);
    CHECK(bit_equal(concat_channels({&a}), a)); // single input passthrough

    const Tensor ab = concat_channels({&a, &b});
    CHECK(ab.c == 2);
    CHECK(ab.at(0, 0, 0, 0) == 1.0f);
    CHECK(ab.at(0, 1, 0, 0) == 2.0f);
    const Tensor ba = concat_channels({&b, &a});
    CHECK(ba.at(0, 0, 0, 0) == 2.0f); // order reversal swaps channel blocks

    Rng rng(5);
    const Tensor big = rand_tensor(rng, 2, 7, 3, 4);
    const std::vector<Tensor> parts = split_channels(big, {2, 4, 1});
    std::vector<const Tensor*> ptrs;
    for (const Tensor& t : parts) ptrs.push_back(&t);
    CHECK(bit_equal(concat_channels(ptrs), big));

    const Tensor mism(1, 1, 3, 3);
    CHECK_THROWS_AS(concat_channels({&a, &mism}), std::invalid_argument);
}

TEST_CASE("channel_shuffle permutes without altering values") {
    Tensor x(1, 4, 1, 1);
    x.data = {0, 1, 10, 11}; // [s0, s1, d0, d1]
    CHECK(channel_shuffle(x, 2).data == std::vector<float>{0, 10, 1, 11});
    CHECK(bit_equal(channel_shuffle(x, 1), x)); // g=1 identity
    CHECK_THROWS_AS(channel_shuffle(x, 3), std::invalid_argument);

    Rng rng(9);
    const Tensor t = rand_tensor(rng, 2, 12, 3, 3);
    const Tensor s = channel_shuffle(t, 3);
    CHECK(bit_equal(channel_shuffle(s, 4), t)); // transpose involution

    double sum_t = 0, sum_s = 0, l2_t = 0, l2_s = 0;
    for (float v : t.data) {
        sum_t += v;
        l2_t += static_cast<double>(v) * v;
    }
    for (float v : s.data) {
        sum_s += v;
        l2_s += static_cast<double>(v) * v;
    }
    std::vector<float> mt(t.data), ms(s.data);
    std::sort(mt.begin(), mt.end());
    std::sort(ms.begin(), ms.end());
    CHECK(mt == ms); // multiset preserved exactly
    CHECK(sum_t == sum_s);
    CHECK(l2_t == l2_s);
}

TEST_CASE("elementwise and broadcast_scale") {
    Rng rng(13);
    const Tensor x = rand_tensor(rng, 1, 2, 3, 3);
    const Tensor zero(1, 2, 3, 3);
    CHECK(bit_equal(elementwise(x, zero, EltwiseMode::add), x));
    CHECK(bit_equal(elementwise(x, Tensor::full(1, 2, 3, 3, 1.0f), EltwiseMode::mul), x));

    Tensor s(1, 2, 1, 1);
    s.data = {2.0f, 0.5f};
    const Tensor y = broadcast_scale(Tensor::full(1, 2, 3, 3, 1.0f), s);
    CHECK(y.at(0, 0, 1, 1) == 2.0f);
    CHECK(y.at(0, 1, 1, 1) == 0.5f);

    const Tensor row = rand_tensor(rng, 1, 2, 3, 1);
    const Tensor col = rand_tensor(rng, 1, 2, 1, 3);
    CHECK_NOTHROW(broadcast_scale(x, row));
    CHECK_NOTHROW(broadcast_scale(x, col));
    const Tensor bad = rand_tensor(rng, 1, 2, 2, 2);
    CHECK_THROWS_AS(broadcast_scale(x, bad), std::invalid_argument);
    CHECK_THROWS_AS(elementwise(x, bad, EltwiseMode::add), std::invalid_argument);
}

TEST_CASE("upsample_nearest2x") {
    Tensor x(1, 1, 1, 2);
    x.data = {1, 2};
    const Tensor y = upsample_nearest2x(x);
    CHECK(y.h == 2);
    CHECK(y.w == 4);
    CHECK(y.data == std::vector<float>{1, 1, 2, 2, 1, 1, 2, 2});
}

TEST_CASE("ntsr round-trip and error paths") {
    Rng rng(21);
    const Tensor x = rand_tensor(rng, 2, 3, 4, 5);
    const std::string dir = (std::filesystem::temp_directory_path() / "slimconv_ops").string();
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/t.ntsr";
    write_ntsr(x, path);
    CHECK(bit_equal(read_ntsr(path), x));

    {
        std::ofstream os(dir + "/bad.ntsr", std::ios::binary);
        os << "JUNKdata";
    }
    CHECK_THROWS_WITH_AS(read_ntsr(dir + "/bad.ntsr"), doctest::Contains("bad magic"),
                         std::runtime_error);
    {
        std::ifstream is(path, std::ios::binary);
        std::string head(30, '\0');
        is.read(head.data(), 30);
        std::ofstream os(dir + "/trunc.ntsr", std::ios::binary);
        os.write(head.data(), 30);
    }
    CHECK_THROWS_WITH_AS(read_ntsr(dir + "/trunc.ntsr"), doctest::Contains("truncated"),
                         std::runtime_error);
}
