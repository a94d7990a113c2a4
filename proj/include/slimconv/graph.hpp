#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slimconv/blocks.hpp"
#include "slimconv/cost.hpp"
#include "slimconv/tensor.hpp"

namespace slimconv {

// Declarative line-oriented network description (".spec"):
//
//   # comment
//   input <n> <c> <h> <w>
//   layer <kind> name=<id> in=<name>[,<name>...] [out_c=..] [k=..] [s=..]
//         [n=..] [r=..] [k_dw=..] [act=..]
//   output <name>[,<name>...]
//
// Kinds: conv gsconv gs_bottleneck vov_gscsp csp spp sppf se cbam ca
//        concat add upsample_nearest2x
// "input" is the reserved name of the graph input. Layers may only reference
// earlier layers, so graphs are acyclic by construction.

struct LayerSpec {
    std::string name;
    std::string kind;
    std::vector<std::string> inputs;
    std::map<std::string, std::string> attrs;
    int line = 0; // 1-based source line, 0 if synthesized
};

struct GraphSpec {
    int in_n = 1, in_c = 1, in_h = 1, in_w = 1;
    std::vector<LayerSpec> layers;
    std::vector<std::string> outputs;
};

GraphSpec parse_spec(const std::string& text);
GraphSpec load_spec_file(const std::string& path);

// Canonical re-serialization: defaults are materialized and attributes appear
// in a fixed order, so parse(serialize(parse(text))) is a fixed point.
std::string serialize_spec(const GraphSpec& spec);

enum class LayerKind {
    conv,
    gsconv,
    gs_bottleneck,
    vov_gscsp,
    csp,
    spp,
    sppf,
    se,
    cbam,
    ca,
    concat,
    add,
    upsample_nearest2x
};

struct Shape3 {
    int c = 0, h = 0, w = 0;
    bool operator==(const Shape3&) const = default;
};

// Fully validated layer with defaults applied and shapes propagated.
struct ResolvedLayer {
    std::string name;
    LayerKind kind = LayerKind::conv;
    std::vector<int> input_ids; // indices into the resolved list; -1 is the graph input
    Shape3 in;                  // shape of the first input
    Shape3 out;
    int out_c = 0, k = 1, s = 1, n = 1, r = 16, k_dw = 5;
    std::optional<ActivationKind> act;
};

// Validates names, references, kinds, attributes and shape propagation.
// Throws std::runtime_error naming the offending layer or line.
std::vector<ResolvedLayer> resolve(const GraphSpec& spec);

// Named tensors backing graph execution. Weight names are
// "<layer>[.<sub>...].<role>" with roles w, b, bn.gamma, bn.beta, bn.mean,
// bn.var; vector-valued roles are stored as (len,1,1,1) tensors.
using WeightStore = std::map<std::string, Tensor>;

// Deterministic per-seed initialization: conv weights uniform in
// +-sqrt(6/fan_in) with fan_in = (in_c/groups)*k^2, biases 0, batch norm
// gamma 1 / beta 0 / mean 0 / var 1. Each tensor draws from a stream keyed
// by its name, so the result does not depend on traversal order.
WeightStore init_weights(const GraphSpec& spec, std::uint64_t seed);

// Executes the graph; returns every layer's tensor keyed by name (plus the
// input under "input"). x must match the declared input shape and the store
// must cover every parameter.
std::map<std::string, Tensor> forward(const GraphSpec& spec, const WeightStore& weights,
                                      const Tensor& x);

// The seeded input used by `run --random`: uniform in [-1,1) from the
// "input" stream of the seed.
Tensor random_input(const GraphSpec& spec, std::uint64_t seed);

// ".nwts" weight binary: magic "NWTS", u32 version 1, u32 entry count, then
// per entry u32 name length, name bytes, four u32 dims, f32 payload;
// little-endian, entries sorted by name.
void save_weights(const WeightStore& store, const std::string& path);
WeightStore load_weights(const std::string& path);

// Writes one 8-bit grayscale PGM (P5, maxval 255) per channel of the named
// layer's output for the first batch sample, min-max normalized per channel
// (constant channels map to 0). Files are "<layer>_c<idx>.pgm" inside dir.
// Returns the written paths.
std::vector<std::string> dump_feature_maps(const GraphSpec& spec, const WeightStore& weights,
                                           const Tensor& x, const std::string& layer_name,
                                           const std::string& dir);

// Analytic per-layer costs with propagated shapes, in declaration order.
CostReport graph_cost(const GraphSpec& spec);

} // namespace slimconv
