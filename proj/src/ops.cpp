#include "slimconv/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace slimconv {

namespace {

void check_conv_inputs(const Tensor& x, const Tensor& weight, const std::vector<float>& bias,
                       const ConvParams& p) {
    p.validate();
    if (x.c != p.in_c)
        throw std::invalid_argument("conv2d: input channels (" + std::to_string(x.c) +
                                    ") do not match in_c (" + std::to_string(p.in_c) + ")");
    int icg = p.in_c / p.groups;
    if (weight.n != p.out_c || weight.c != icg || weight.h != p.k || weight.w != p.k)
        throw std::invalid_argument("conv2d: weight shape " + weight.shape_str() +
                                    " does not match expected " + std::to_string(p.out_c) + "x" +
                                    std::to_string(icg) + "x" + std::to_string(p.k) + "x" +
                                    std::to_string(p.k));
    if (p.has_bias && bias.size() != static_cast<std::size_t>(p.out_c))
        throw std::invalid_argument("conv2d: bias length " + std::to_string(bias.size()) +
                                    " does not match out_c (" + std::to_string(p.out_c) + ")");
}

int conv_out_dim(int in, int k, int pad, int stride, const char* which) {
    int out = (in + 2 * pad - k) / stride + 1;
    if (out < 1)
        throw std::invalid_argument(std::string("conv2d: degenerate output geometry along ") +
                                    which);
    return out;
}

} // namespace

Tensor conv2d_naive(const Tensor& x, const Tensor& weight, const std::vector<float>& bias,
                    const ConvParams& p) {
    return conv2d_naive(x, weight, bias, p, nullptr);
}

Tensor conv2d_naive(const Tensor& x, const Tensor& weight, const std::vector<float>& bias,
                    const ConvParams& p, std::uint64_t* macs) {
    check_conv_inputs(x, weight, bias, p);
    const int pad = p.padding();
    const int oh = conv_out_dim(x.h, p.k, pad, p.stride, "height");
    const int ow = conv_out_dim(x.w, p.k, pad, p.stride, "width");
    const int icg = p.in_c / p.groups;
    const int ocg = p.out_c / p.groups;

    Tensor out(x.n, p.out_c, oh, ow);
    std::uint64_t count = 0;
    for (int in = 0; in < x.n; ++in) {
        for (int g = 0; g < p.groups; ++g) {
            for (int oc_local = 0; oc_local < ocg; ++oc_local) {
                const int oc = g * ocg + oc_local;
                for (int oy = 0; oy < oh; ++oy) {
                    for (int ox = 0; ox < ow; ++ox) {
                        float acc = 0.0f;
                        for (int ic_local = 0; ic_local < icg; ++ic_local) {
                            const int ic = g * icg + ic_local;
                            for (int ky = 0; ky < p.k; ++ky) {
                                const int iy = oy * p.stride - pad + ky;
                                const bool row_ok = iy >= 0 && iy < x.h;
                                for (int kx = 0; kx < p.k; ++kx) {
                                    const int ix = ox * p.stride - pad + kx;
                                    const float v = (row_ok && ix >= 0 && ix < x.w)
                                                        ? x.at(in, ic, iy, ix)
                                                        : 0.0f;
                                    acc += v * weight.at(oc, ic_local, ky, kx);
                                    ++count;
                                }
                            }
                        }
                        if (p.has_bias) acc += bias[oc];
                        out.at(in, oc, oy, ox) = acc;
                    }
                }
            }
        }
    }
    if (macs) *macs += count;
    return out;
}

Tensor conv2d_im2col(const Tensor& x, const Tensor& weight, const std::vector<float>& bias,
                     const ConvParams& p) {
    check_conv_inputs(x, weight, bias, p);
    const int pad = p.padding();
    const int oh = conv_out_dim(x.h, p.k, pad, p.stride, "height");
    const int ow = conv_out_dim(x.w, p.k, pad, p.stride, "width");
    const int icg = p.in_c / p.groups;
    const int ocg = p.out_c / p.groups;
    const int npix = oh * ow;
    const int patch = icg * p.k * p.k;

    Tensor out(x.n, p.out_c, oh, ow);
    // One pixel's gathered patch is contiguous and ordered exactly like the
    // naive path's inner loop (channel, kernel row, kernel col), which is what
    // keeps the two paths bit-identical.
    std::vector<float> cols(static_cast<std::size_t>(npix) * patch);
    for (int in = 0; in < x.n; ++in) {
        for (int g = 0; g < p.groups; ++g) {
            float* col = cols.data();
            for (int oy = 0; oy < oh; ++oy) {
                for (int ox = 0; ox < ow; ++ox) {
                    for (int ic_local = 0; ic_local < icg; ++ic_local) {
                        const int ic = g * icg + ic_local;
                        for (int ky = 0; ky < p.k; ++ky) {
                            const int iy = oy * p.stride - pad + ky;
                            if (iy < 0 || iy >= x.h) {
                                for (int kx = 0; kx < p.k; ++kx) *col++ = 0.0f;
                                continue;
                            }
                            const float* row = &x.data[x.index(in, ic, iy, 0)];
                            for (int kx = 0; kx < p.k; ++kx) {
                                const int ix = ox * p.stride - pad + kx;
                                *col++ = (ix >= 0 && ix < x.w) ? row[ix] : 0.0f;
                            }
                        }
                    }
                }
            }
            for (int oc_local = 0; oc_local < ocg; ++oc_local) {
                const int oc = g * ocg + oc_local;
                const float* wrow = &weight.data[weight.index(oc, 0, 0, 0)];
                const float b = p.has_bias ? bias[oc] : 0.0f;
                float* orow = &out.data[out.index(in, oc, 0, 0)];
                for (int pix = 0; pix < npix; ++pix) {
                    const float* cp = &cols[static_cast<std::size_t>(pix) * patch];
                    float acc = 0.0f;
                    for (int t = 0; t < patch; ++t) acc += cp[t] * wrow[t];
                    if (p.has_bias) acc += b;
                    orow[pix] = acc;
                }
            }
        }
    }
    return out;
}

Tensor maxpool2d(const Tensor& x, int k, int stride, int pad) {
    return maxpool2d_counted(x, k, stride, pad, nullptr, nullptr);
}

Tensor maxpool2d_counted(const Tensor& x, int k, int stride, int pad,
                         std::uint64_t* interior_comparisons, std::uint64_t* interior_pixels) {
    if (k < 1 || k % 2 == 0)
        throw std::invalid_argument("maxpool2d: kernel must be odd and >= 1, got " +
                                    std::to_string(k));
    if (stride < 1) throw std::invalid_argument("maxpool2d: stride must be >= 1");
    if (pad < 0) pad = k / 2;
    if (pad > k / 2)
        throw std::invalid_argument("maxpool2d: pad must not exceed k/2 (all-padding windows)");
    const int oh = (x.h + 2 * pad - k) / stride + 1;
    const int ow = (x.w + 2 * pad - k) / stride + 1;
    if (oh < 1 || ow < 1) throw std::invalid_argument("maxpool2d: degenerate output geometry");

    Tensor out(x.n, x.c, oh, ow);
    for (int in = 0; in < x.n; ++in) {
        for (int ic = 0; ic < x.c; ++ic) {
            for (int oy = 0; oy < oh; ++oy) {
                for (int ox = 0; ox < ow; ++ox) {
                    const int y0 = std::max(0, oy * stride - pad);
                    const int y1 = std::min(x.h, oy * stride - pad + k);
                    const int x0 = std::max(0, ox * stride - pad);
                    const int x1 = std::min(x.w, ox * stride - pad + k);
                    float best = x.at(in, ic, y0, x0);
                    std::uint64_t cmp = 0;
                    for (int iy = y0; iy < y1; ++iy) {
                        for (int ix = x0; ix < x1; ++ix) {
                            if (iy == y0 && ix == x0) continue;
                            best = std::max(best, x.at(in, ic, iy, ix));
                            ++cmp;
                        }
                    }
                    out.at(in, ic, oy, ox) = best;
                    const bool interior = (y1 - y0 == k) && (x1 - x0 == k);
                    if (interior) {
                        if (interior_comparisons) *interior_comparisons += cmp;
                        if (interior_pixels) ++*interior_pixels;
                    }
                }
            }
        }
    }
    return out;
}

Tensor global_avg_pool(const Tensor& x) {
    Tensor out(x.n, x.c, 1, 1);
    const double inv = 1.0 / (static_cast<double>(x.h) * x.w);
    for (int in = 0; in < x.n; ++in) {
        for (int ic = 0; ic < x.c; ++ic) {
            double acc = 0.0;
            const float* p = &x.data[x.index(in, ic, 0, 0)];
            const std::size_t plane = static_cast<std::size_t>(x.h) * x.w;
            for (std::size_t i = 0; i < plane; ++i) acc += p[i];
            out.at(in, ic, 0, 0) = static_cast<float>(acc * inv);
        }
    }
    return out;
}

Tensor directional_pool(const Tensor& x, Axis axis, PoolMode mode) {
    const bool collapse_h = axis == Axis::height;
    Tensor out(x.n, x.c, collapse_h ? 1 : x.h, collapse_h ? x.w : 1);
    for (int in = 0; in < x.n; ++in) {
        for (int ic = 0; ic < x.c; ++ic) {
            const int lines = collapse_h ? x.w : x.h;   // output positions
            const int span = collapse_h ? x.h : x.w;    // collapsed length
            for (int l = 0; l < lines; ++l) {
                double acc = 0.0;
                float best = collapse_h ? x.at(in, ic, 0, l) : x.at(in, ic, l, 0);
                for (int s = 0; s < span; ++s) {
                    const float v = collapse_h ? x.at(in, ic, s, l) : x.at(in, ic, l, s);
                    acc += v;
                    best = std::max(best, v);
                }
                const float r = mode == PoolMode::avg ? static_cast<float>(acc / span) : best;
                if (collapse_h)
                    out.at(in, ic, 0, l) = r;
                else
                    out.at(in, ic, l, 0) = r;
            }
        }
    }
    return out;
}

Tensor channel_pixel_stats(const Tensor& x, PoolMode mode) {
    Tensor out(x.n, 1, x.h, x.w);
    for (int in = 0; in < x.n; ++in) {
        for (int iy = 0; iy < x.h; ++iy) {
            for (int ix = 0; ix < x.w; ++ix) {
                double acc = 0.0;
                float best = x.at(in, 0, iy, ix);
                for (int ic = 0; ic < x.c; ++ic) {
                    const float v = x.at(in, ic, iy, ix);
                    acc += v;
                    best = std::max(best, v);
                }
                out.at(in, 0, iy, ix) =
                    mode == PoolMode::avg ? static_cast<float>(acc / x.c) : best;
            }
        }
    }
    return out;
}

Tensor batch_norm_inference(const Tensor& x, const std::vector<float>& mean,
                            const std::vector<float>& var, const std::vector<float>& gamma,
                            const std::vector<float>& beta, float eps) {
    const auto c = static_cast<std::size_t>(x.c);
    if (mean.size() != c || var.size() != c || gamma.size() != c || beta.size() != c)
        throw std::invalid_argument("batch_norm: parameter vectors must have length c = " +
                                    std::to_string(x.c));
    Tensor out(x.n, x.c, x.h, x.w);
    const std::size_t plane = static_cast<std::size_t>(x.h) * x.w;
    for (int in = 0; in < x.n; ++in) {
        for (int ic = 0; ic < x.c; ++ic) {
            const float scale = gamma[ic] / std::sqrt(var[ic] + eps);
            const float shift = beta[ic] - mean[ic] * scale;
            const float* src = &x.data[x.index(in, ic, 0, 0)];
            float* dst = &out.data[out.index(in, ic, 0, 0)];
            for (std::size_t i = 0; i < plane; ++i) dst[i] = src[i] * scale + shift;
        }
    }
    return out;
}

Tensor concat_channels(const std::vector<const Tensor*>& xs) {
    if (xs.empty()) throw std::invalid_argument("concat_channels: no inputs");
    const Tensor& first = *xs[0];
    int total_c = 0;
    for (const Tensor* t : xs) {
        if (t->n != first.n || t->h != first.h || t->w != first.w)
            throw std::invalid_argument("concat_channels: spatial/batch mismatch: " +
                                        t->shape_str() + " vs " + first.shape_str());
        total_c += t->c;
    }
    Tensor out(first.n, total_c, first.h, first.w);
    const std::size_t plane = static_cast<std::size_t>(first.h) * first.w;
    for (int in = 0; in < first.n; ++in) {
        int oc = 0;
        for (const Tensor* t : xs) {
            std::memcpy(&out.data[out.index(in, oc, 0, 0)], &t->data[t->index(in, 0, 0, 0)],
                        static_cast<std::size_t>(t->c) * plane * sizeof(float));
            oc += t->c;
        }
    }
    return out;
}

std::vector<Tensor> split_channels(const Tensor& x, const std::vector<int>& sizes) {
    int total = 0;
    for (int s : sizes) total += s;
    if (total != x.c)
        throw std::invalid_argument("split_channels: sizes sum to " + std::to_string(total) +
                                    ", tensor has c = " + std::to_string(x.c));
    std::vector<Tensor> parts;
    parts.reserve(sizes.size());
    const std::size_t plane = static_cast<std::size_t>(x.h) * x.w;
    int off = 0;
    for (int s : sizes) {
        Tensor part(x.n, s, x.h, x.w);
        for (int in = 0; in < x.n; ++in)
            std::memcpy(&part.data[part.index(in, 0, 0, 0)], &x.data[x.index(in, off, 0, 0)],
                        static_cast<std::size_t>(s) * plane * sizeof(float));
        parts.push_back(std::move(part));
        off += s;
    }
    return parts;
}

Tensor channel_shuffle(const Tensor& x, int groups) {
    if (groups < 1 || x.c % groups != 0)
        throw std::invalid_argument("channel_shuffle: groups (" + std::to_string(groups) +
                                    ") must divide c (" + std::to_string(x.c) + ")");
    const int per = x.c / groups;
    Tensor out(x.n, x.c, x.h, x.w);
    const std::size_t plane = static_cast<std::size_t>(x.h) * x.w;
    for (int in = 0; in < x.n; ++in) {
        for (int a = 0; a < groups; ++a) {
            for (int b = 0; b < per; ++b) {
                const int src = a * per + b;
                const int dst = b * groups + a;
                std::memcpy(&out.data[out.index(in, dst, 0, 0)],
                            &x.data[x.index(in, src, 0, 0)], plane * sizeof(float));
            }
        }
    }
    return out;
}

Tensor elementwise(const Tensor& x, const Tensor& y, EltwiseMode mode) {
    if (!x.same_shape(y))
        throw std::invalid_argument("elementwise: shape mismatch " + x.shape_str() + " vs " +
                                    y.shape_str());
    Tensor out(x.n, x.c, x.h, x.w);
    for (std::size_t i = 0; i < x.data.size(); ++i)
        out.data[i] = mode == EltwiseMode::add ? x.data[i] + y.data[i] : x.data[i] * y.data[i];
    return out;
}

Tensor broadcast_scale(const Tensor& x, const Tensor& s) {
    const bool per_channel = s.h == 1 && s.w == 1;
    const bool per_row = s.h == x.h && s.w == 1;
    const bool per_col = s.h == 1 && s.w == x.w;
    if (s.n != x.n || s.c != x.c || !(per_channel || per_row || per_col))
        throw std::invalid_argument("broadcast_scale: incompatible scale shape " + s.shape_str() +
                                    " for input " + x.shape_str());
    Tensor out(x.n, x.c, x.h, x.w);
    for (int in = 0; in < x.n; ++in) {
        for (int ic = 0; ic < x.c; ++ic) {
            for (int iy = 0; iy < x.h; ++iy) {
                for (int ix = 0; ix < x.w; ++ix) {
                    float f;
                    if (per_channel)
                        f = s.at(in, ic, 0, 0);
                    else if (per_row)
                        f = s.at(in, ic, iy, 0);
                    else
                        f = s.at(in, ic, 0, ix);
                    out.at(in, ic, iy, ix) = x.at(in, ic, iy, ix) * f;
                }
            }
        }
    }
    return out;
}

Tensor upsample_nearest2x(const Tensor& x) {
    Tensor out(x.n, x.c, x.h * 2, x.w * 2);
    for (int in = 0; in < x.n; ++in)
        for (int ic = 0; ic < x.c; ++ic)
            for (int iy = 0; iy < out.h; ++iy)
                for (int ix = 0; ix < out.w; ++ix)
                    out.at(in, ic, iy, ix) = x.at(in, ic, iy / 2, ix / 2);
    return out;
}

} // namespace slimconv
