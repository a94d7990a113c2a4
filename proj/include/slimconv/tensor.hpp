#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace slimconv {

// Dense 4-D NCHW tensor of 32-bit floats. data.size() == n*c*h*w always;
// layout is row-major with w fastest. Tensors are treated as immutable once
// an operation has produced them: ops take const references and return new
// tensors, so concurrent reads are safe.
struct Tensor {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<float> data;

    Tensor() = default;
    Tensor(int n_, int c_, int h_, int w_); // zero-filled, throws if any dim < 1

    static Tensor full(int n, int c, int h, int w, float value);

    std::size_t size() const { return data.size(); }

    std::size_t index(int in, int ic, int iy, int ix) const {
        return ((static_cast<std::size_t>(in) * c + ic) * h + iy) * w + ix;
    }

    float at(int in, int ic, int iy, int ix) const { return data[index(in, ic, iy, ix)]; }
    float& at(int in, int ic, int iy, int ix) { return data[index(in, ic, iy, ix)]; }

    bool same_shape(const Tensor& o) const {
        return n == o.n && c == o.c && h == o.h && w == o.w;
    }

    std::string shape_str() const; // "NxCxHxW"
};

// Grouped 2-D convolution description. Padding is always "same": pad = k/2
// with k odd, so stride-1 convolutions preserve spatial shape.
struct ConvParams {
    int in_c = 1;
    int out_c = 1;
    int k = 1;       // square kernel, odd
    int stride = 1;
    int groups = 1;  // divides in_c and out_c; groups == in_c == out_c is depthwise
    bool has_bias = false;

    int padding() const { return k / 2; }
    void validate() const; // throws std::invalid_argument naming the bad field
};

bool bit_equal(const Tensor& a, const Tensor& b);

// FNV-1a 64 over the tensor's dims and raw float bytes; used for goldens.
std::uint64_t fnv1a64(const Tensor& t);

// ".ntsr" binary tensor format: magic "NTSR", u32 version = 1, u32 n,c,h,w,
// then n*c*h*w little-endian 32-bit floats.
void write_ntsr(const Tensor& t, const std::string& path);
Tensor read_ntsr(const std::string& path);

} // namespace slimconv
