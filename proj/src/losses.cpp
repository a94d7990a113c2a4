#include "slimconv/losses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace slimconv {

namespace {
constexpr double kSizeFloor = 1e-9;
constexpr double kPi = 3.141592653589793238462643383279502884;
} // namespace

BBox::BBox(double cx, double cy, double w, double h) : cx_(cx), cy_(cy), w_(w), h_(h) {
    if (!(w_ >= kSizeFloor)) {
        w_ = kSizeFloor;
        clamped_ = true;
    }
    if (!(h_ >= kSizeFloor)) {
        h_ = kSizeFloor;
        clamped_ = true;
    }
}

BBox BBox::from_corners(double x1, double y1, double x2, double y2) {
    return BBox((x1 + x2) / 2.0, (y1 + y2) / 2.0, x2 - x1, y2 - y1);
}

std::array<double, 4> BBox::corners() const { return {x1(), y1(), x2(), y2()}; }

LossKind parse_loss_kind(const std::string& name) {
    if (name == "iou") return LossKind::iou;
    if (name == "giou") return LossKind::giou;
    if (name == "diou") return LossKind::diou;
    if (name == "ciou") return LossKind::ciou;
    if (name == "eiou") return LossKind::eiou;
    throw std::invalid_argument("unknown loss kind: " + name);
}

std::string loss_kind_name(LossKind kind) {
    switch (kind) {
        case LossKind::iou: return "iou";
        case LossKind::giou: return "giou";
        case LossKind::diou: return "diou";
        case LossKind::ciou: return "ciou";
        case LossKind::eiou: return "eiou";
    }
    return "?";
}

namespace {

// Everything the loss family needs, computed once per box pair.
struct PairGeometry {
    double inter = 0.0;      // intersection area
    double uni = 0.0;        // union area
    double iou = 0.0;
    double cw = 0.0, ch = 0.0;     // enclosing box width/height
    double enclose = 0.0;          // enclosing box area
    double rho2 = 0.0;             // squared center distance
    double diag2 = 0.0;            // squared enclosing box diagonal
    double v = 0.0;                // aspect consistency term
    double alpha = 0.0;            // v / ((1 - iou) + v), 0 at the 0/0 corner
};

PairGeometry pair_geometry(const BBox& p, const BBox& g) {
    PairGeometry geo;
    const double iw = std::min(p.x2(), g.x2()) - std::max(p.x1(), g.x1());
    const double ih = std::min(p.y2(), g.y2()) - std::max(p.y1(), g.y1());
    geo.inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
    geo.uni = p.area() + g.area() - geo.inter;
    geo.iou = geo.inter / geo.uni;
    geo.cw = std::max(p.x2(), g.x2()) - std::min(p.x1(), g.x1());
    geo.ch = std::max(p.y2(), g.y2()) - std::min(p.y1(), g.y1());
    geo.enclose = geo.cw * geo.ch;
    const double dx = p.cx() - g.cx();
    const double dy = p.cy() - g.cy();
    geo.rho2 = dx * dx + dy * dy;
    geo.diag2 = geo.cw * geo.cw + geo.ch * geo.ch;
    const double ang = std::atan(g.w() / g.h()) - std::atan(p.w() / p.h());
    geo.v = 4.0 / (kPi * kPi) * ang * ang;
    const double denom = (1.0 - geo.iou) + geo.v;
    geo.alpha = denom > 0.0 ? geo.v / denom : 0.0;
    return geo;
}

} // namespace

double iou(const BBox& a, const BBox& b) { return pair_geometry(a, b).iou; }

double loss(LossKind kind, const BBox& pred, const BBox& gt) {
    const PairGeometry geo = pair_geometry(pred, gt);
    const double base = 1.0 - geo.iou;
    switch (kind) {
        case LossKind::iou:
            return base;
        case LossKind::giou:
            return base + (geo.enclose - geo.uni) / geo.enclose;
        case LossKind::diou:
            return base + geo.rho2 / geo.diag2;
        case LossKind::ciou:
            return base + geo.rho2 / geo.diag2 + geo.alpha * geo.v;
        case LossKind::eiou: {
            const double dw = pred.w() - gt.w();
            const double dh = pred.h() - gt.h();
            return base + geo.rho2 / geo.diag2 + dw * dw / (geo.cw * geo.cw) +
                   dh * dh / (geo.ch * geo.ch);
        }
    }
    return 0.0;
}

VGrad ciou_v_grad(const BBox& pred, const BBox& gt) {
    const double w = pred.w(), h = pred.h();
    const double ang = std::atan(gt.w() / gt.h()) - std::atan(w / h);
    const double common = 8.0 / (kPi * kPi) * ang / (w * w + h * h);
    return {common * h, -common * w};
}

namespace {

using Grad4 = std::array<double, 4>; // d/d{cx, cy, w, h} of pred

Grad4 operator+(const Grad4& a, const Grad4& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}
Grad4 operator-(const Grad4& a, const Grad4& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}
Grad4 operator*(double s, const Grad4& a) { return {s * a[0], s * a[1], s * a[2], s * a[3]}; }

LossGrad loss_grad_inner(LossKind kind, const BBox& p, const BBox& g, bool perturbed) {
    // Corner derivatives of the prediction box.
    const Grad4 dpx1 = {1.0, 0.0, -0.5, 0.0};
    const Grad4 dpx2 = {1.0, 0.0, 0.5, 0.0};
    const Grad4 dpy1 = {0.0, 1.0, 0.0, -0.5};
    const Grad4 dpy2 = {0.0, 1.0, 0.0, 0.5};
    const Grad4 zero = {0.0, 0.0, 0.0, 0.0};

    // Intersection extents. Ties bind to the ground-truth edge, which keeps
    // the gradient at pred == gt at the loss minimum.
    const double iw = std::min(p.x2(), g.x2()) - std::max(p.x1(), g.x1());
    const double ih = std::min(p.y2(), g.y2()) - std::max(p.y1(), g.y1());
    const Grad4 diw = (p.x2() < g.x2() ? dpx2 : zero) - (p.x1() > g.x1() ? dpx1 : zero);
    const Grad4 dih = (p.y2() < g.y2() ? dpy2 : zero) - (p.y1() > g.y1() ? dpy1 : zero);

    double inter = 0.0;
    Grad4 dinter = zero;
    if (iw > 0.0 && ih > 0.0) {
        inter = iw * ih;
        dinter = ih * diw + iw * dih;
    }
    const Grad4 darea = {0.0, 0.0, p.h(), p.w()};
    const double uni = p.area() + g.area() - inter;
    const Grad4 duni = darea - dinter;
    const double iou_v = inter / uni;
    const Grad4 diou_v = (1.0 / (uni * uni)) * (uni * dinter - inter * duni);

    // Enclosing box.
    const double cw = std::max(p.x2(), g.x2()) - std::min(p.x1(), g.x1());
    const double ch = std::max(p.y2(), g.y2()) - std::min(p.y1(), g.y1());
    const Grad4 dcw = (p.x2() > g.x2() ? dpx2 : zero) - (p.x1() < g.x1() ? dpx1 : zero);
    const Grad4 dch = (p.y2() > g.y2() ? dpy2 : zero) - (p.y1() < g.y1() ? dpy1 : zero);

    LossGrad out;
    out.perturbed = perturbed;
    Grad4 grad = zero - diou_v; // every kind starts from d(1 - IoU)

    if (kind == LossKind::giou) {
        const double C = cw * ch;
        const Grad4 dC = ch * dcw + cw * dch;
        // d[(C - U)/C] = -d[U/C]
        grad = grad - (1.0 / (C * C)) * (C * duni - uni * dC);
    } else if (kind != LossKind::iou) {
        const double dx = p.cx() - g.cx();
        const double dy = p.cy() - g.cy();
        const double rho2 = dx * dx + dy * dy;
        const Grad4 drho2 = {2.0 * dx, 2.0 * dy, 0.0, 0.0};
        const double diag2 = cw * cw + ch * ch;
        const Grad4 ddiag2 = (2.0 * cw) * dcw + (2.0 * ch) * dch;
        grad = grad + (1.0 / (diag2 * diag2)) * (diag2 * drho2 - rho2 * ddiag2);

        if (kind == LossKind::ciou) {
            const double w = p.w(), h = p.h();
            const double ang = std::atan(g.w() / g.h()) - std::atan(w / h);
            const double v = 4.0 / (kPi * kPi) * ang * ang;
            const double denom = (1.0 - iou_v) + v;
            const double alpha = denom > 0.0 ? v / denom : 0.0;
            // Direct derivative of v; alpha is held constant.
            const double scale = 8.0 / (kPi * kPi) * ang / (w * w + h * h);
            const Grad4 dv = {0.0, 0.0, -scale * h, scale * w};
            grad = grad + alpha * dv;
        } else if (kind == LossKind::eiou) {
            const double dw = p.w() - g.w();
            const double dh = p.h() - g.h();
            const Grad4 ddw = {0.0, 0.0, 1.0, 0.0};
            const Grad4 ddh = {0.0, 0.0, 0.0, 1.0};
            grad = grad + (1.0 / (cw * cw * cw * cw)) *
                              ((cw * cw) * (2.0 * dw) * ddw - (dw * dw) * (2.0 * cw) * dcw);
            grad = grad + (1.0 / (ch * ch * ch * ch)) *
                              ((ch * ch) * (2.0 * dh) * ddh - (dh * dh) * (2.0 * ch) * dch);
        }
    }
    out.d = grad;
    return out;
}

} // namespace

LossGrad loss_grad(LossKind kind, const BBox& pred, const BBox& gt) {
    const double iw = std::min(pred.x2(), gt.x2()) - std::max(pred.x1(), gt.x1());
    const double ih = std::min(pred.y2(), gt.y2()) - std::max(pred.y1(), gt.y1());
    if (iw == 0.0 || ih == 0.0) {
        // Edges exactly touch: the loss is not differentiable here. Nudge the
        // prediction off the boundary and report that we did.
        const BBox nudged(pred.cx() + 1e-9, pred.cy() + 1e-9, pred.w(), pred.h());
        return loss_grad_inner(kind, nudged, gt, true);
    }
    return loss_grad_inner(kind, pred, gt, false);
}

double rasterized_iou(const BBox& a, const BBox& b, int resolution) {
    if (resolution < 64)
        throw std::invalid_argument("rasterized_iou: resolution must be >= 64");
    const double x_lo = std::min(a.x1(), b.x1());
    const double x_hi = std::max(a.x2(), b.x2());
    const double y_lo = std::min(a.y1(), b.y1());
    const double y_hi = std::max(a.y2(), b.y2());
    const double px = (x_hi - x_lo) / resolution;
    const double py = (y_hi - y_lo) / resolution;

    std::int64_t in_a = 0, in_b = 0, in_both = 0;
    for (int iy = 0; iy < resolution; ++iy) {
        const double ycen = y_lo + (iy + 0.5) * py;
        const bool ay = ycen >= a.y1() && ycen <= a.y2();
        const bool by = ycen >= b.y1() && ycen <= b.y2();
        if (!ay && !by) continue;
        for (int ix = 0; ix < resolution; ++ix) {
            const double xcen = x_lo + (ix + 0.5) * px;
            const bool in_a_cell = ay && xcen >= a.x1() && xcen <= a.x2();
            const bool in_b_cell = by && xcen >= b.x1() && xcen <= b.x2();
            in_a += in_a_cell;
            in_b += in_b_cell;
            in_both += in_a_cell && in_b_cell;
        }
    }
    const std::int64_t in_union = in_a + in_b - in_both;
    if (in_union == 0) return 0.0;
    return static_cast<double>(in_both) / static_cast<double>(in_union);
}

} // namespace slimconv
