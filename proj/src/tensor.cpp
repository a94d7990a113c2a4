#include "slimconv/tensor.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace slimconv {

Tensor::Tensor(int n_, int c_, int h_, int w_) : n(n_), c(c_), h(h_), w(w_) {
    if (n < 1) throw std::invalid_argument("Tensor: n must be >= 1, got " + std::to_string(n));
    if (c < 1) throw std::invalid_argument("Tensor: c must be >= 1, got " + std::to_string(c));
    if (h < 1) throw std::invalid_argument("Tensor: h must be >= 1, got " + std::to_string(h));
    if (w < 1) throw std::invalid_argument("Tensor: w must be >= 1, got " + std::to_string(w));
    data.assign(static_cast<std::size_t>(n) * c * h * w, 0.0f);
}

Tensor Tensor::full(int n, int c, int h, int w, float value) {
    Tensor t(n, c, h, w);
    std::fill(t.data.begin(), t.data.end(), value);
    return t;
}

std::string Tensor::shape_str() const {
    return std::to_string(n) + "x" + std::to_string(c) + "x" + std::to_string(h) + "x" +
           std::to_string(w);
}

void ConvParams::validate() const {
    if (in_c < 1) throw std::invalid_argument("ConvParams: in_c must be >= 1");
    if (out_c < 1) throw std::invalid_argument("ConvParams: out_c must be >= 1");
    if (k < 1 || k % 2 == 0)
        throw std::invalid_argument("ConvParams: kernel must be odd and >= 1, got " +
                                    std::to_string(k));
    if (stride < 1) throw std::invalid_argument("ConvParams: stride must be >= 1");
    if (groups < 1 || in_c % groups != 0)
        throw std::invalid_argument("ConvParams: groups (" + std::to_string(groups) +
                                    ") must divide in_c (" + std::to_string(in_c) + ")");
    if (out_c % groups != 0)
        throw std::invalid_argument("ConvParams: groups (" + std::to_string(groups) +
                                    ") must divide out_c (" + std::to_string(out_c) + ")");
}

bool bit_equal(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) return false;
    return std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(float)) == 0;
}

std::uint64_t fnv1a64(const Tensor& t) {
    std::uint64_t hash = 1469598103934665603ull;
    auto fold = [&hash](const void* p, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < len; ++i) {
            hash ^= bytes[i];
            hash *= 1099511628211ull;
        }
    };
    std::uint32_t dims[4] = {static_cast<std::uint32_t>(t.n), static_cast<std::uint32_t>(t.c),
                             static_cast<std::uint32_t>(t.h), static_cast<std::uint32_t>(t.w)};
    fold(dims, sizeof(dims));
    fold(t.data.data(), t.data.size() * sizeof(float));
    return hash;
}

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is, const std::string& what) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw std::runtime_error("ntsr: truncated file while reading " + what);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

} // namespace

void write_ntsr(const Tensor& t, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("ntsr: cannot open for writing: " + path);
    os.write("NTSR", 4);
    put_u32(os, 1);
    put_u32(os, static_cast<std::uint32_t>(t.n));
    put_u32(os, static_cast<std::uint32_t>(t.c));
    put_u32(os, static_cast<std::uint32_t>(t.h));
    put_u32(os, static_cast<std::uint32_t>(t.w));
    for (float v : t.data) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        put_u32(os, bits);
    }
    if (!os) throw std::runtime_error("ntsr: write failed: " + path);
}

Tensor read_ntsr(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("ntsr: cannot open: " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "NTSR", 4) != 0)
        throw std::runtime_error("ntsr: bad magic in " + path);
    std::uint32_t version = get_u32(is, "version");
    if (version != 1)
        throw std::runtime_error("ntsr: unsupported version " + std::to_string(version));
    int n = static_cast<int>(get_u32(is, "n"));
    int c = static_cast<int>(get_u32(is, "c"));
    int h = static_cast<int>(get_u32(is, "h"));
    int w = static_cast<int>(get_u32(is, "w"));
    Tensor t(n, c, h, w);
    for (std::size_t i = 0; i < t.data.size(); ++i) {
        std::uint32_t bits = get_u32(is, "payload");
        std::memcpy(&t.data[i], &bits, 4);
    }
    return t;
}

} // namespace slimconv
