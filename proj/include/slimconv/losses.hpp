#pragma once

#include <array>
#include <string>

namespace slimconv {

// Axis-aligned box in center/size form. Width and height are clamped to a
// 1e-9 floor at construction so the loss family stays defined on a closed
// domain; the clamp is flagged rather than treated as an error.
class BBox {
public:
    BBox(double cx, double cy, double w, double h);

    double cx() const { return cx_; }
    double cy() const { return cy_; }
    double w() const { return w_; }
    double h() const { return h_; }
    bool clamped() const { return clamped_; }

    double x1() const { return cx_ - w_ / 2.0; }
    double x2() const { return cx_ + w_ / 2.0; }
    double y1() const { return cy_ - h_ / 2.0; }
    double y2() const { return cy_ + h_ / 2.0; }
    double area() const { return w_ * h_; }

    static BBox from_corners(double x1, double y1, double x2, double y2);
    std::array<double, 4> corners() const; // x1, y1, x2, y2

private:
    double cx_, cy_, w_, h_;
    bool clamped_ = false;
};

enum class LossKind { iou, giou, diou, ciou, eiou };

LossKind parse_loss_kind(const std::string& name);
std::string loss_kind_name(LossKind kind);

// Intersection over union in [0,1]; 0 for disjoint boxes, 1 iff equal.
double iou(const BBox& a, const BBox& b);

// Scalar regression loss. All five kinds return 0 when pred == gt. giou/diou/
// ciou/eiou add their penalty terms on top of 1 - IoU; the enclosing box and
// its diagonal are recomputed from the arguments on every call.
double loss(LossKind kind, const BBox& pred, const BBox& gt);

// The two partial derivatives of the CIoU aspect term v with respect to the
// prediction's width and height, in the published CIoU form. Note that the
// published dv_dw is the negative of the direct derivative of v; the sign
// relation dv_dw == -(h/w) * dv_dh holds either way. loss_grad uses the
// direct derivative so it matches finite differences.
struct VGrad {
    double dv_dw = 0.0;
    double dv_dh = 0.0;
};
VGrad ciou_v_grad(const BBox& pred, const BBox& gt);

// Analytic gradient of loss() with respect to pred's (cx, cy, w, h).
// For CIoU the trade-off weight alpha is held constant during
// differentiation (it weighs the aspect term but does not propagate).
// Inputs whose box edges exactly touch are nudged by 1e-9 and flagged.
struct LossGrad {
    std::array<double, 4> d{}; // d/d{cx, cy, w, h}
    bool perturbed = false;
};
LossGrad loss_grad(LossKind kind, const BBox& pred, const BBox& gt);

// Grid-counting IoU oracle: covers the joint bounding region of the two boxes
// with resolution^2 cells and counts cell-center membership. Converges to
// iou(a, b) as resolution grows; requires resolution >= 64.
double rasterized_iou(const BBox& a, const BBox& b, int resolution);

} // namespace slimconv
