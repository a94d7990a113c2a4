#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "slimconv/losses.hpp"
#include "slimconv/rng.hpp"

using namespace slimconv;

namespace {

BBox random_box(Rng& rng, double extent = 2.0) {
    return BBox(rng.uniform_double(-extent, extent), rng.uniform_double(-extent, extent),
                rng.uniform_double(0.3, 3.0), rng.uniform_double(0.3, 3.0));
}

} // namespace

TEST_CASE("iou basics") {
    const BBox unit(0, 0, 1, 1);
    CHECK(iou(unit, unit) == 1.0);
    CHECK(iou(unit, BBox(10, 10, 1, 1)) == 0.0);
    // Unit square against itself shifted by half a width: 0.5 / 1.5.
    const BBox shifted(0.5, 0, 1, 1);
    CHECK(iou(unit, shifted) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(std::abs(rasterized_iou(unit, shifted, 512) - 1.0 / 3.0) <= 5e-3);
}

TEST_CASE("worked pair: unit squares with centers 2 apart") {
    const BBox pred(0.5, 0.5, 1, 1), gt(2.5, 0.5, 1, 1);
    CHECK(loss(LossKind::iou, pred, gt) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(loss(LossKind::giou, pred, gt) == doctest::Approx(1.0 + 1.0 / 3.0).epsilon(1e-12));
    CHECK(loss(LossKind::diou, pred, gt) == doctest::Approx(1.4).epsilon(1e-12));
    CHECK(loss(LossKind::ciou, pred, gt) == doctest::Approx(1.4).epsilon(1e-12));
    CHECK(loss(LossKind::eiou, pred, gt) == doctest::Approx(1.4).epsilon(1e-12));
}

TEST_CASE("all kinds vanish when pred equals gt") {
    Rng rng(23);
    for (int i = 0; i < 20; ++i) {
        const BBox b = random_box(rng);
        for (LossKind k : {LossKind::iou, LossKind::giou, LossKind::diou, LossKind::ciou,
                           LossKind::eiou})
            CHECK(std::abs(loss(k, b, b)) <= 1e-12);
    }
}

TEST_CASE("ciou degenerates to diou for proportional boxes") {
    const BBox gt(0, 0, 2, 1);
    const BBox pred(0, 0, 6, 3); // k = 3
    CHECK(std::abs(loss(LossKind::ciou, pred, gt) - loss(LossKind::diou, pred, gt)) < 1e-12);
}

TEST_CASE("ciou_v_grad pinned values and identities") {
    // Matching aspect ratio: both partials vanish.
    const VGrad zero = ciou_v_grad(BBox(0, 0, 2, 4), BBox(5, 5, 1, 2));
    CHECK(zero.dv_dw == 0.0);
    CHECK(zero.dv_dh == 0.0);

    // pred (w=2,h=1) vs gt (1,1): direct evaluation of the published form.
    const VGrad g = ciou_v_grad(BBox(0, 0, 2, 1), BBox(0, 0, 1, 1));
    CHECK(g.dv_dw == doctest::Approx(-0.05216024).epsilon(1e-6));
    CHECK(g.dv_dh == doctest::Approx(0.10432047).epsilon(1e-6));

    // dv_dw == -(h/w) dv_dh, exactly.
    Rng rng(29);
    for (int i = 0; i < 100; ++i) {
        const BBox p = random_box(rng), q = random_box(rng);
        const VGrad v = ciou_v_grad(p, q);
        CHECK(std::abs(v.dv_dw + (p.h() / p.w()) * v.dv_dh) <= 1e-12);
    }
}

TEST_CASE("loss_grad at the minimum: diou center partials are zero") {
    const BBox b(1.5, -2.0, 2.0, 3.0);
    const LossGrad g = loss_grad(LossKind::diou, b, b);
    CHECK(g.d[0] == 0.0);
    CHECK(g.d[1] == 0.0);
}

TEST_CASE("loss_grad flags exactly touching boxes and perturbs") {
    const BBox pred(0, 0, 2, 2), gt(2, 0, 2, 2); // edges touch at x = 1
    const LossGrad g = loss_grad(LossKind::iou, pred, gt);
    CHECK(g.perturbed);
    const LossGrad clean = loss_grad(LossKind::iou, BBox(0, 0, 1, 1), BBox(0.25, 0, 1, 1));
    CHECK_FALSE(clean.perturbed);
}

TEST_CASE("loss_grad matches finite differences on a quick sample") {
    Rng rng(31);
    const double step = 1e-4;
    for (int i = 0; i < 15; ++i) {
        // Overlapping, well-separated-edge pairs only.
        const BBox gt(rng.uniform_double(-1, 1), rng.uniform_double(-1, 1),
                      rng.uniform_double(1.0, 2.0), rng.uniform_double(1.0, 2.0));
        const BBox pred(gt.cx() + 0.21, gt.cy() - 0.17, gt.w() * 1.13, gt.h() * 0.87);
        for (LossKind kind : {LossKind::iou, LossKind::giou, LossKind::diou, LossKind::eiou}) {
            const LossGrad an = loss_grad(kind, pred, gt);
            const double fields[4] = {pred.cx(), pred.cy(), pred.w(), pred.h()};
            for (int comp = 0; comp < 4; ++comp) {
                auto eval = [&](double t) {
                    double f[4] = {fields[0], fields[1], fields[2], fields[3]};
                    f[comp] = t;
                    return loss(kind, BBox(f[0], f[1], f[2], f[3]), gt);
                };
                const double fd = (eval(fields[comp] + step) - eval(fields[comp] - step)) /
                                  (2.0 * step);
                CHECK(std::abs(an.d[comp] - fd) <= std::max(1e-5 * std::abs(fd), 1e-8));
            }
        }
    }
}

TEST_CASE("rasterized_iou exact cases and validation") {
    const BBox unit(0, 0, 1, 1);
    CHECK(rasterized_iou(unit, unit, 256) == 1.0);
    CHECK(rasterized_iou(unit, BBox(5, 5, 1, 1), 128) == 0.0);
    CHECK_THROWS_AS(rasterized_iou(unit, unit, 32), std::invalid_argument);
}

TEST_CASE("loss ranges on sampled boxes") {
    Rng rng(37);
    for (int i = 0; i < 200; ++i) {
        const BBox p = random_box(rng), g = random_box(rng);
        const double li = loss(LossKind::iou, p, g);
        CHECK(li >= 0.0);
        CHECK(li <= 1.0);
        for (LossKind k : {LossKind::giou, LossKind::diou, LossKind::ciou, LossKind::eiou}) {
            const double l = loss(k, p, g);
            CHECK(l >= 0.0);
            CHECK(l < 2.0);
        }
    }
}

TEST_CASE("symmetry: iou and giou") {
    Rng rng(41);
    for (int i = 0; i < 50; ++i) {
        const BBox a = random_box(rng), b = random_box(rng);
        CHECK(iou(a, b) == iou(b, a));
        CHECK(loss(LossKind::giou, a, b) == doctest::Approx(loss(LossKind::giou, b, a)).epsilon(1e-12));
    }
}

TEST_CASE("translation invariance is exact on dyadic inputs") {
    Rng rng(43);
    for (int i = 0; i < 50; ++i) {
        // Coordinates on a 1/64 grid, translations on a 1/8 grid: every
        // intermediate difference and product stays exactly representable.
        auto snap = [&](double lo, double hi) {
            return std::round(rng.uniform_double(lo, hi) * 64.0) / 64.0;
        };
        const BBox p(snap(-4, 4), snap(-4, 4), snap(0.25, 3), snap(0.25, 3));
        const BBox g(snap(-4, 4), snap(-4, 4), snap(0.25, 3), snap(0.25, 3));
        const double tx = std::round(rng.uniform_double(-8, 8) * 8.0) / 8.0;
        const double ty = std::round(rng.uniform_double(-8, 8) * 8.0) / 8.0;
        const BBox pt(p.cx() + tx, p.cy() + ty, p.w(), p.h());
        const BBox gt(g.cx() + tx, g.cy() + ty, g.w(), g.h());
        for (LossKind k : {LossKind::iou, LossKind::giou, LossKind::diou, LossKind::ciou,
                           LossKind::eiou})
            CHECK(loss(k, p, g) == loss(k, pt, gt));
    }
}

TEST_CASE("scale invariance within 1e-9") {
    Rng rng(47);
    for (int i = 0; i < 50; ++i) {
        const BBox p = random_box(rng), g = random_box(rng);
        const double s = rng.uniform_double(0.1, 10.0);
        const BBox ps(p.cx() * s, p.cy() * s, p.w() * s, p.h() * s);
        const BBox gs(g.cx() * s, g.cy() * s, g.w() * s, g.h() * s);
        for (LossKind k : {LossKind::iou, LossKind::giou, LossKind::diou, LossKind::ciou,
                           LossKind::eiou})
            CHECK(std::abs(loss(k, p, g) - loss(k, ps, gs)) <= 1e-9);
    }
}

TEST_CASE("BBox clamps degenerate sizes and flags it") {
    const BBox bad(0, 0, -1, 0);
    CHECK(bad.clamped());
    CHECK(bad.w() == 1e-9);
    CHECK(bad.h() == 1e-9);
    CHECK_FALSE(BBox(0, 0, 1, 1).clamped());

    const auto c = BBox::from_corners(-1, -2, 3, 4).corners();
    CHECK(c[0] == -1.0);
    CHECK(c[1] == -2.0);
    CHECK(c[2] == 3.0);
    CHECK(c[3] == 4.0);
}

TEST_CASE("loss kind names round-trip") {
    for (LossKind k : {LossKind::iou, LossKind::giou, LossKind::diou, LossKind::ciou,
                       LossKind::eiou})
        CHECK(parse_loss_kind(loss_kind_name(k)) == k);
    CHECK_THROWS_AS(parse_loss_kind("siou"), std::invalid_argument);
}
