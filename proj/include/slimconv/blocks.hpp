#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slimconv/activations.hpp"
#include "slimconv/ops.hpp"
#include "slimconv/tensor.hpp"

namespace slimconv {

// Composite modules built from the tensor primitives. Constructors validate
// the structure and allocate zero weights (identity batch norm); values are
// filled afterwards, either directly or through collect_params.

// Mutable handle on one parameter slot, used for initialization and weight
// I/O. Exactly one of tensor/vec is set.
struct ParamRef {
    std::string name;
    Tensor* tensor = nullptr;
    std::vector<float>* vec = nullptr;
};

struct BatchNorm {
    std::vector<float> mean, var, gamma, beta;
    float eps = 1e-5f;

    static BatchNorm identity(int c);
    Tensor forward(const Tensor& x) const {
        return batch_norm_inference(x, mean, var, gamma, beta, eps);
    }
};

// conv-2D + optional batch norm + optional activation, the basic "Conv" box.
// Convolutions feeding a batch norm carry no bias (it would be absorbed).
struct ConvBNAct {
    ConvParams conv;
    Tensor weight;             // (out_c, in_c/groups, k, k)
    std::vector<float> bias;   // empty unless conv.has_bias
    std::optional<BatchNorm> bn;
    std::optional<ActivationKind> act;

    ConvBNAct() = default;
    ConvBNAct(int in_c, int out_c, int k, int stride = 1, int groups = 1, bool with_bias = false,
              bool with_bn = true, std::optional<ActivationKind> act = ActivationKind::swish());

    Tensor forward(const Tensor& x) const;
    void collect_params(const std::string& prefix, std::vector<ParamRef>& out);
};

// Depthwise conv followed by a 1x1 pointwise channel mix.
struct DSCUnit {
    ConvBNAct depthwise; // in_c -> in_c, groups = in_c, kernel k_dw
    ConvBNAct pointwise; // 1x1, in_c -> out_c

    DSCUnit() = default;
    DSCUnit(int in_c, int out_c, int k_dw = 3,
            std::optional<ActivationKind> act = ActivationKind::swish());

    Tensor forward(const Tensor& x) const { return pointwise.forward(depthwise.forward(x)); }
    void collect_params(const std::string& prefix, std::vector<ParamRef>& out);
};

// Half the output channels come from a dense conv, half from a depthwise conv
// applied on top of it; a 2-group channel shuffle interleaves the two halves
// so the dense information reaches every output channel.
struct GSConvBlock {
    int in_c = 0, out_c = 0;
    ConvBNAct sc; // in_c -> out_c/2, kernel k, stride s
    ConvBNAct dw; // depthwise out_c/2 -> out_c/2, kernel k_dw, stride 1

    GSConvBlock() = default;
    GSConvBlock(int in_c, int out_c, int k = 1, int stride = 1, int k_dw = 5,
                std::optional<ActivationKind> act = ActivationKind::swish());

    Tensor forward(const Tensor& x) const;
    void collect_params(const std::string& prefix, std::vector<ParamRef>& out);
};

// Residual block: two stacked GSConv stages against a 1x1 conv+BN shortcut.
struct GSBottleneck {
    int in_c = 0, out_c = 0;
    GSConvBlock g1;     // in_c -> out_c/2, k=1
    GSConvBlock g2;     // out_c/2 -> out_c, k=3
    ConvBNAct shortcut; // 1x1 conv + BN, no activation

    GSBottleneck() = default;
    GSBottleneck(int in_c, int out_c, std::optional<ActivationKind> act = ActivationKind::swish(),
                 bool activate_second = true);

    Tensor forward(const Tensor& x) const;
    void collect_params(const std::string& prefix, std::vector<ParamRef>& out);
};

// Cross-stage-partial block with one-shot aggregation: a transform branch of
// GS bottlenecks and a 1x1 bypass branch, concatenated once and fused.
struct VoVGSCSP {
    int in_c = 0, out_c = 0, n = 1;
    ConvBNAct branch_a_entry; // 1x1, in_c -> out_c/2
    std::vector<GSBottleneck> chain;
    ConvBNAct branch_b;       // 1x1, in_c -> out_c/2
    ConvBNAct fuse;           // 1x1, out_c -> out_c

    VoVGSCSP() = default;
    VoVGSCSP(int in_c, int out_c, int n = 1,
             std::optional<ActivationKind> act = ActivationKind::swish());

    Tensor forward(const Tensor& x) const;
    void collect_params(const std::string& prefix, std::vector<ParamRef>& out);
};

// Dense-convolution baseline with the same split/fuse skeleton as VoVGSCSP;
// the transform branch chains standard 1x1 + 3x3 residual bottlenecks.
struct CSPBlock {
    struct StdBottleneck {
        ConvBNAct cv1; // 1x1
        ConvBNAct cv2; // 3x3
    };

    int in_c = 0, out_c = 0, n = 1;
    ConvBNAct branch_a_entry;
    std::vector<StdBottleneck> chain;
    ConvBNAct branch_b;
    ConvBNAct fuse;

    CSPBlock() = default;
    CSPBlock(int in_c, int out_c, int n = 1,
             std::optional<ActivationKind> act = ActivationKind::swish());

    Tensor forward(const Tensor& x) const;
    void collect_params(const std::string& prefix, std::vector<ParamRef>& out);
};

// Spatial pyramid pooling: shortcut plus stride-1 max pools k = 5, 9, 13,
// concatenated as [x, k5, k9, k13]. Output has 4x the input channels.
struct SPPBlock {
    Tensor forward(const Tensor& x) const;
};

// The chained form: one 5x5 pool applied three times, concatenated as
// [x, p1, p2, p3]. Produces exactly SPPBlock's output.
struct SPPFBlock {
    Tensor forward(const Tensor& x) const;
};

// Squeeze-and-excitation channel attention.
struct SEBlock {
    int c = 0, r = 16;
    ConvBNAct fc1; // 1x1 c -> c/r, bias, relu
    ConvBNAct fc2; // 1x1 c/r -> c, bias, sigmoid

    SEBlock() = default;
    SEBlock(int c, int r = 16);

    Tensor forward(const Tensor& x) const;
    void collect_params(const std::string& prefix, std::vector<ParamRef>& out);
};

// Channel attention (shared MLP over global avg and max pools) followed by
// spatial attention (7x7 conv over per-pixel max/mean channel statistics).
struct CBAMBlock {
    int c = 0, r = 16;
    ConvBNAct fc1;     // shared MLP: 1x1 c -> c/r, bias, relu
    ConvBNAct fc2;     // shared MLP: 1x1 c/r -> c, bias, no act (sigmoid after sum)
    ConvBNAct spatial; // 7x7, 2 -> 1, bias, sigmoid

    CBAMBlock() = default;
    CBAMBlock(int c, int r = 16);

    Tensor forward(const Tensor& x) const;
    void collect_params(const std::string& prefix, std::vector<ParamRef>& out);
};

// Coordinate attention: per-axis average pools joined along the collapsed
// axis, reduced through a conv+BN+hard_swish stem, then split into separate
// height and width attention maps.
struct CABlock {
    int c = 0, r = 32;
    ConvBNAct reduce; // 1x1 c -> c/r, BN, hard_swish
    ConvBNAct attn_h; // 1x1 c/r -> c, bias, sigmoid
    ConvBNAct attn_w; // 1x1 c/r -> c, bias, sigmoid

    CABlock() = default;
    CABlock(int c, int r = 32);

    Tensor forward(const Tensor& x) const;
    void collect_params(const std::string& prefix, std::vector<ParamRef>& out);
};

// Reinterprets the flat buffer under new dims (element count must match).
Tensor reshape(const Tensor& x, int n, int c, int h, int w);

} // namespace slimconv
