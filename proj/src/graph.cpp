#include "slimconv/graph.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "slimconv/ops.hpp"
#include "slimconv/rng.hpp"

namespace slimconv {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& why) {
    throw std::runtime_error("spec parse error at line " + std::to_string(line) + ": " + why);
}

[[noreturn]] void layer_fail(const std::string& layer, const std::string& why) {
    throw std::runtime_error("spec validation error (layer '" + layer + "'): " + why);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

int parse_int(const std::string& v, int line, const std::string& what) {
    try {
        std::size_t pos = 0;
        const int r = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        parse_fail(line, what + " expects an integer, got '" + v + "'");
    }
}

const std::map<std::string, LayerKind>& kind_table() {
    static const std::map<std::string, LayerKind> table = {
        {"conv", LayerKind::conv},
        {"gsconv", LayerKind::gsconv},
        {"gs_bottleneck", LayerKind::gs_bottleneck},
        {"vov_gscsp", LayerKind::vov_gscsp},
        {"csp", LayerKind::csp},
        {"spp", LayerKind::spp},
        {"sppf", LayerKind::sppf},
        {"se", LayerKind::se},
        {"cbam", LayerKind::cbam},
        {"ca", LayerKind::ca},
        {"concat", LayerKind::concat},
        {"add", LayerKind::add},
        {"upsample_nearest2x", LayerKind::upsample_nearest2x},
    };
    return table;
}

std::string kind_name(LayerKind k) {
    for (const auto& [name, kind] : kind_table())
        if (kind == k) return name;
    return "?";
}

// Attribute keys each kind accepts; out_c is required where listed first.
const std::set<std::string>& allowed_attrs(LayerKind k) {
    static const std::set<std::string> conv_attrs = {"out_c", "k", "s", "act"};
    static const std::set<std::string> gsconv_attrs = {"out_c", "k", "s", "k_dw", "act"};
    static const std::set<std::string> gsb_attrs = {"out_c", "act"};
    static const std::set<std::string> cspish_attrs = {"out_c", "n", "act"};
    static const std::set<std::string> attn_attrs = {"r"};
    static const std::set<std::string> none;
    switch (k) {
        case LayerKind::conv: return conv_attrs;
        case LayerKind::gsconv: return gsconv_attrs;
        case LayerKind::gs_bottleneck: return gsb_attrs;
        case LayerKind::vov_gscsp:
        case LayerKind::csp: return cspish_attrs;
        case LayerKind::se:
        case LayerKind::cbam:
        case LayerKind::ca: return attn_attrs;
        default: return none;
    }
}

bool needs_out_c(LayerKind k) {
    return k == LayerKind::conv || k == LayerKind::gsconv || k == LayerKind::gs_bottleneck ||
           k == LayerKind::vov_gscsp || k == LayerKind::csp;
}

int strided_out(int in, int stride) { return (in - 1) / stride + 1; }

} // namespace

GraphSpec parse_spec(const std::string& text) {
    GraphSpec spec;
    bool have_input = false;
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        std::string word;
        if (!(ls >> word)) continue; // blank
        if (word == "input") {
            if (have_input) parse_fail(line_no, "duplicate input declaration");
            if (!(ls >> spec.in_n >> spec.in_c >> spec.in_h >> spec.in_w))
                parse_fail(line_no, "input expects four integers: n c h w");
            std::string extra;
            if (ls >> extra) parse_fail(line_no, "trailing tokens after input declaration");
            have_input = true;
        } else if (word == "layer") {
            LayerSpec layer;
            layer.line = line_no;
            if (!(ls >> layer.kind)) parse_fail(line_no, "layer expects a kind");
            std::string kv;
            while (ls >> kv) {
                const std::size_t eq = kv.find('=');
                if (eq == std::string::npos)
                    parse_fail(line_no, "expected key=value, got '" + kv + "'");
                const std::string key = kv.substr(0, eq);
                const std::string value = kv.substr(eq + 1);
                if (key == "name") {
                    layer.name = value;
                } else if (key == "in") {
                    layer.inputs = split(value, ',');
                } else {
                    if (!layer.attrs.emplace(key, value).second)
                        parse_fail(line_no, "duplicate attribute '" + key + "'");
                }
            }
            if (layer.name.empty()) parse_fail(line_no, "layer is missing name=");
            if (layer.inputs.empty()) parse_fail(line_no, "layer is missing in=");
            spec.layers.push_back(std::move(layer));
        } else if (word == "output") {
            std::string names;
            if (!(ls >> names)) parse_fail(line_no, "output expects a layer name");
            for (const std::string& n : split(names, ','))
                if (!n.empty()) spec.outputs.push_back(n);
            std::string extra;
            if (ls >> extra) parse_fail(line_no, "trailing tokens after output");
        } else {
            parse_fail(line_no, "unknown directive '" + word + "'");
        }
    }
    if (!have_input) throw std::runtime_error("spec parse error: missing input declaration");
    if (spec.outputs.empty()) throw std::runtime_error("spec parse error: no output declared");
    return spec;
}

GraphSpec load_spec_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open spec file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_spec(buf.str());
}

std::vector<ResolvedLayer> resolve(const GraphSpec& spec) {
    if (spec.in_n < 1 || spec.in_c < 1 || spec.in_h < 1 || spec.in_w < 1)
        throw std::runtime_error("spec validation error: input dims must all be >= 1");
    std::map<std::string, int> ids; // layer name -> index
    std::vector<ResolvedLayer> out;
    out.reserve(spec.layers.size());
    const Shape3 in_shape{spec.in_c, spec.in_h, spec.in_w};

    for (const LayerSpec& ls : spec.layers) {
        ResolvedLayer rl;
        rl.name = ls.name;
        if (ls.name == "input") parse_fail(ls.line, "'input' is a reserved name");
        if (ids.count(ls.name)) parse_fail(ls.line, "duplicate layer name '" + ls.name + "'");
        const auto kind_it = kind_table().find(ls.kind);
        if (kind_it == kind_table().end())
            parse_fail(ls.line, "unknown layer kind '" + ls.kind + "'");
        rl.kind = kind_it->second;

        for (const std::string& ref : ls.inputs) {
            if (ref == "input") {
                rl.input_ids.push_back(-1);
            } else {
                const auto it = ids.find(ref);
                if (it == ids.end())
                    parse_fail(ls.line, "layer '" + ls.name + "' references undeclared layer '" +
                                            ref + "'");
                rl.input_ids.push_back(it->second);
            }
        }

        const std::set<std::string>& allowed = allowed_attrs(rl.kind);
        for (const auto& [key, value] : ls.attrs) {
            if (!allowed.count(key))
                parse_fail(ls.line, "attribute '" + key + "' is not valid for kind '" + ls.kind +
                                        "'");
            if (key == "act") {
                if (value == "none")
                    rl.act = std::nullopt;
                else
                    try {
                        rl.act = parse_activation(value);
                    } catch (const std::exception& e) {
                        parse_fail(ls.line, e.what());
                    }
            } else {
                const int v = parse_int(value, ls.line, "attribute '" + key + "'");
                if (key == "out_c") rl.out_c = v;
                else if (key == "k") rl.k = v;
                else if (key == "s") rl.s = v;
                else if (key == "n") rl.n = v;
                else if (key == "r") rl.r = v;
                else if (key == "k_dw") rl.k_dw = v;
            }
        }
        if (!ls.attrs.count("act")) rl.act = ActivationKind::swish();
        if (!ls.attrs.count("r")) rl.r = rl.kind == LayerKind::ca ? 32 : 16;
        if (needs_out_c(rl.kind) && !ls.attrs.count("out_c"))
            parse_fail(ls.line, "kind '" + ls.kind + "' requires out_c=");

        // Arity and shape propagation.
        auto shape_of = [&](int id) { return id < 0 ? in_shape : out[id].out; };
        const bool multi_input = rl.kind == LayerKind::concat || rl.kind == LayerKind::add;
        if (!multi_input && rl.input_ids.size() != 1)
            layer_fail(rl.name, "kind '" + ls.kind + "' takes exactly one input");
        if (rl.kind == LayerKind::add && rl.input_ids.size() != 2)
            layer_fail(rl.name, "add takes exactly two inputs");
        rl.in = shape_of(rl.input_ids[0]);

        switch (rl.kind) {
            case LayerKind::conv:
            case LayerKind::gsconv: {
                if (rl.k < 1 || rl.k % 2 == 0) layer_fail(rl.name, "k must be odd and >= 1");
                if (rl.s < 1) layer_fail(rl.name, "s must be >= 1");
                if (rl.kind == LayerKind::gsconv) {
                    if (rl.out_c % 2 != 0) layer_fail(rl.name, "gsconv out_c must be even");
                    if (rl.k_dw < 1 || rl.k_dw % 2 == 0)
                        layer_fail(rl.name, "k_dw must be odd and >= 1");
                }
                rl.out = {rl.out_c, strided_out(rl.in.h, rl.s), strided_out(rl.in.w, rl.s)};
                break;
            }
            case LayerKind::gs_bottleneck:
                if (rl.out_c % 4 != 0)
                    layer_fail(rl.name, "gs_bottleneck out_c must be divisible by 4");
                rl.out = {rl.out_c, rl.in.h, rl.in.w};
                break;
            case LayerKind::vov_gscsp:
                if (rl.out_c % 4 != 0 || (rl.out_c / 2) % 4 != 0)
                    layer_fail(rl.name,
                               "vov_gscsp out_c must keep its gs bottlenecks divisible by 4");
                if (rl.n < 1) layer_fail(rl.name, "n must be >= 1");
                rl.out = {rl.out_c, rl.in.h, rl.in.w};
                break;
            case LayerKind::csp:
                if (rl.out_c % 2 != 0) layer_fail(rl.name, "csp out_c must be even");
                if (rl.n < 1) layer_fail(rl.name, "n must be >= 1");
                rl.out = {rl.out_c, rl.in.h, rl.in.w};
                break;
            case LayerKind::spp:
            case LayerKind::sppf:
                rl.out = {4 * rl.in.c, rl.in.h, rl.in.w};
                break;
            case LayerKind::se:
            case LayerKind::cbam:
            case LayerKind::ca:
                if (rl.r < 1 || rl.in.c % rl.r != 0)
                    layer_fail(rl.name, "reduction r (" + std::to_string(rl.r) +
                                            ") must divide input channels (" +
                                            std::to_string(rl.in.c) + ")");
                rl.out = rl.in;
                break;
            case LayerKind::concat: {
                int total = 0;
                for (int id : rl.input_ids) {
                    const Shape3 s = shape_of(id);
                    if (s.h != rl.in.h || s.w != rl.in.w)
                        layer_fail(rl.name, "concat inputs disagree on spatial shape");
                    total += s.c;
                }
                rl.out = {total, rl.in.h, rl.in.w};
                break;
            }
            case LayerKind::add: {
                const Shape3 a = shape_of(rl.input_ids[0]);
                const Shape3 b = shape_of(rl.input_ids[1]);
                if (!(a == b)) layer_fail(rl.name, "add inputs disagree on shape");
                rl.out = a;
                break;
            }
            case LayerKind::upsample_nearest2x:
                rl.out = {rl.in.c, rl.in.h * 2, rl.in.w * 2};
                break;
        }
        if (rl.out.h < 1 || rl.out.w < 1)
            layer_fail(rl.name, "degenerate output geometry " + std::to_string(rl.out.h) + "x" +
                                    std::to_string(rl.out.w));
        ids.emplace(rl.name, static_cast<int>(out.size()));
        out.push_back(std::move(rl));
    }

    for (const std::string& name : spec.outputs)
        if (name != "input" && !ids.count(name))
            throw std::runtime_error("spec validation error: declared output '" + name +
                                     "' does not exist");
    return out;
}

std::string serialize_spec(const GraphSpec& spec) {
    const std::vector<ResolvedLayer> layers = resolve(spec);
    std::ostringstream os;
    os << "input " << spec.in_n << " " << spec.in_c << " " << spec.in_h << " " << spec.in_w
       << "\n";
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const ResolvedLayer& rl = layers[i];
        os << "layer " << kind_name(rl.kind) << " name=" << rl.name << " in=";
        for (std::size_t j = 0; j < rl.input_ids.size(); ++j) {
            if (j) os << ",";
            os << (rl.input_ids[j] < 0 ? "input" : layers[rl.input_ids[j]].name);
        }
        const std::set<std::string>& allowed = allowed_attrs(rl.kind);
        if (allowed.count("out_c")) os << " out_c=" << rl.out_c;
        if (allowed.count("k")) os << " k=" << rl.k;
        if (allowed.count("s")) os << " s=" << rl.s;
        if (allowed.count("n")) os << " n=" << rl.n;
        if (allowed.count("r")) os << " r=" << rl.r;
        if (allowed.count("k_dw")) os << " k_dw=" << rl.k_dw;
        if (allowed.count("act")) os << " act=" << (rl.act ? rl.act->name() : "none");
        os << "\n";
    }
    for (const std::string& name : spec.outputs) os << "output " << name << "\n";
    return os.str();
}

namespace {

using Block = std::variant<std::monostate, ConvBNAct, GSConvBlock, GSBottleneck, VoVGSCSP,
                           CSPBlock, SPPBlock, SPPFBlock, SEBlock, CBAMBlock, CABlock>;

Block make_block(const ResolvedLayer& rl) {
    switch (rl.kind) {
        case LayerKind::conv:
            return ConvBNAct(rl.in.c, rl.out_c, rl.k, rl.s, 1, false, true, rl.act);
        case LayerKind::gsconv:
            return GSConvBlock(rl.in.c, rl.out_c, rl.k, rl.s, rl.k_dw, rl.act);
        case LayerKind::gs_bottleneck: return GSBottleneck(rl.in.c, rl.out_c, rl.act);
        case LayerKind::vov_gscsp: return VoVGSCSP(rl.in.c, rl.out_c, rl.n, rl.act);
        case LayerKind::csp: return CSPBlock(rl.in.c, rl.out_c, rl.n, rl.act);
        case LayerKind::spp: return SPPBlock{};
        case LayerKind::sppf: return SPPFBlock{};
        case LayerKind::se: return SEBlock(rl.in.c, rl.r);
        case LayerKind::cbam: return CBAMBlock(rl.in.c, rl.r);
        case LayerKind::ca: return CABlock(rl.in.c, rl.r);
        default: return std::monostate{};
    }
}

std::vector<ParamRef> block_params(Block& block, const std::string& name) {
    std::vector<ParamRef> refs;
    std::visit(
        [&](auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (requires(T& t, std::vector<ParamRef>& v) { t.collect_params(name, v); })
                b.collect_params(name, refs);
        },
        block);
    return refs;
}

} // namespace

WeightStore init_weights(const GraphSpec& spec, std::uint64_t seed) {
    const std::vector<ResolvedLayer> layers = resolve(spec);
    const Rng root(seed);
    WeightStore store;
    for (const ResolvedLayer& rl : layers) {
        Block block = make_block(rl);
        for (const ParamRef& ref : block_params(block, rl.name)) {
            if (ref.tensor) {
                Rng rng = root.split(ref.name);
                Tensor& t = *ref.tensor;
                const int fan_in = t.c * t.h * t.w;
                const float bound = std::sqrt(6.0f / static_cast<float>(fan_in));
                for (float& v : t.data) v = rng.uniform(-bound, bound);
                store[ref.name] = t;
            } else {
                const int len = static_cast<int>(ref.vec->size());
                float fill = 0.0f;
                if (ref.name.ends_with(".bn.gamma") || ref.name.ends_with(".bn.var")) fill = 1.0f;
                store[ref.name] = Tensor::full(len, 1, 1, 1, fill);
            }
        }
    }
    return store;
}

namespace {

void bind_params(Block& block, const std::string& name, const WeightStore& store) {
    for (const ParamRef& ref : block_params(block, name)) {
        const auto it = store.find(ref.name);
        if (it == store.end())
            throw std::runtime_error("forward: missing weight tensor '" + ref.name + "'");
        const Tensor& src = it->second;
        if (ref.tensor) {
            if (!ref.tensor->same_shape(src))
                throw std::runtime_error("forward: weight '" + ref.name + "' has shape " +
                                         src.shape_str() + ", expected " +
                                         ref.tensor->shape_str());
            *ref.tensor = src;
        } else {
            if (src.size() != ref.vec->size())
                throw std::runtime_error("forward: weight '" + ref.name + "' has " +
                                         std::to_string(src.size()) + " values, expected " +
                                         std::to_string(ref.vec->size()));
            std::copy(src.data.begin(), src.data.end(), ref.vec->begin());
        }
    }
}

} // namespace

std::map<std::string, Tensor> forward(const GraphSpec& spec, const WeightStore& weights,
                                      const Tensor& x) {
    const std::vector<ResolvedLayer> layers = resolve(spec);
    if (x.n != spec.in_n || x.c != spec.in_c || x.h != spec.in_h || x.w != spec.in_w)
        throw std::runtime_error("forward: input tensor is " + x.shape_str() + ", spec declares " +
                                 std::to_string(spec.in_n) + "x" + std::to_string(spec.in_c) +
                                 "x" + std::to_string(spec.in_h) + "x" +
                                 std::to_string(spec.in_w));
    std::vector<Tensor> values(layers.size());
    auto value_of = [&](int id) -> const Tensor& { return id < 0 ? x : values[id]; };

    for (std::size_t i = 0; i < layers.size(); ++i) {
        const ResolvedLayer& rl = layers[i];
        Block block = make_block(rl);
        bind_params(block, rl.name, weights);
        switch (rl.kind) {
            case LayerKind::concat: {
                std::vector<const Tensor*> ins;
                ins.reserve(rl.input_ids.size());
                for (int id : rl.input_ids) ins.push_back(&value_of(id));
                values[i] = concat_channels(ins);
                break;
            }
            case LayerKind::add:
                values[i] = elementwise(value_of(rl.input_ids[0]), value_of(rl.input_ids[1]),
                                        EltwiseMode::add);
                break;
            case LayerKind::upsample_nearest2x:
                values[i] = upsample_nearest2x(value_of(rl.input_ids[0]));
                break;
            default:
                values[i] = std::visit(
                    [&](const auto& b) -> Tensor {
                        using T = std::decay_t<decltype(b)>;
                        if constexpr (std::is_same_v<T, std::monostate>)
                            throw std::runtime_error("forward: unhandled kind");
                        else
                            return b.forward(value_of(rl.input_ids[0]));
                    },
                    block);
        }
    }

    std::map<std::string, Tensor> named;
    named["input"] = x;
    for (std::size_t i = 0; i < layers.size(); ++i) named[layers[i].name] = std::move(values[i]);
    return named;
}

Tensor random_input(const GraphSpec& spec, std::uint64_t seed) {
    Rng rng = Rng(seed).split("input");
    Tensor x(spec.in_n, spec.in_c, spec.in_h, spec.in_w);
    for (float& v : x.data) v = rng.uniform(-1.0f, 1.0f);
    return x;
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
        throw std::runtime_error("nwts: truncated file while reading " + what);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

} // namespace

void save_weights(const WeightStore& store, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("nwts: cannot open for writing: " + path);
    os.write("NWTS", 4);
    put_u32(os, 1);
    put_u32(os, static_cast<std::uint32_t>(store.size()));
    for (const auto& [name, t] : store) { // std::map iterates sorted: deterministic bytes
        put_u32(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        put_u32(os, static_cast<std::uint32_t>(t.n));
        put_u32(os, static_cast<std::uint32_t>(t.c));
        put_u32(os, static_cast<std::uint32_t>(t.h));
        put_u32(os, static_cast<std::uint32_t>(t.w));
        for (float v : t.data) {
            std::uint32_t bits;
            std::memcpy(&bits, &v, 4);
            put_u32(os, bits);
        }
    }
    if (!os) throw std::runtime_error("nwts: write failed: " + path);
}

WeightStore load_weights(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("nwts: cannot open: " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "NWTS", 4) != 0)
        throw std::runtime_error("nwts: bad magic in " + path);
    const std::uint32_t version = get_u32(is, "version");
    if (version != 1)
        throw std::runtime_error("nwts: unsupported version " + std::to_string(version));
    const std::uint32_t count = get_u32(is, "entry count");
    WeightStore store;
    for (std::uint32_t e = 0; e < count; ++e) {
        const std::uint32_t name_len = get_u32(is, "name length");
        std::string name(name_len, '\0');
        if (!is.read(name.data(), name_len)) throw std::runtime_error("nwts: truncated name");
        const int n = static_cast<int>(get_u32(is, "n"));
        const int c = static_cast<int>(get_u32(is, "c"));
        const int h = static_cast<int>(get_u32(is, "h"));
        const int w = static_cast<int>(get_u32(is, "w"));
        Tensor t(n, c, h, w);
        for (std::size_t i = 0; i < t.data.size(); ++i) {
            const std::uint32_t bits = get_u32(is, "payload of " + name);
            std::memcpy(&t.data[i], &bits, 4);
        }
        store[name] = std::move(t);
    }
    return store;
}

std::vector<std::string> dump_feature_maps(const GraphSpec& spec, const WeightStore& weights,
                                           const Tensor& x, const std::string& layer_name,
                                           const std::string& dir) {
    const std::map<std::string, Tensor> values = forward(spec, weights, x);
    const auto it = values.find(layer_name);
    if (it == values.end())
        throw std::runtime_error("dump_feature_maps: unknown layer '" + layer_name + "'");
    const Tensor& t = it->second;
    std::filesystem::create_directories(dir);
    std::vector<std::string> paths;
    for (int ic = 0; ic < t.c; ++ic) {
        float mn = t.at(0, ic, 0, 0), mx = mn;
        for (int iy = 0; iy < t.h; ++iy) {
            for (int ix = 0; ix < t.w; ++ix) {
                const float v = t.at(0, ic, iy, ix);
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
        }
        const std::string path =
            (std::filesystem::path(dir) / (layer_name + "_c" + std::to_string(ic) + ".pgm"))
                .string();
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("dump_feature_maps: cannot write " + path);
        os << "P5\n" << t.w << " " << t.h << "\n255\n";
        const float scale = mx > mn ? 255.0f / (mx - mn) : 0.0f;
        for (int iy = 0; iy < t.h; ++iy) {
            for (int ix = 0; ix < t.w; ++ix) {
                const float v = (t.at(0, ic, iy, ix) - mn) * scale;
                const int q = static_cast<int>(std::lround(v));
                os.put(static_cast<char>(std::min(255, std::max(0, q))));
            }
        }
        if (!os) throw std::runtime_error("dump_feature_maps: write failed: " + path);
        paths.push_back(path);
    }
    return paths;
}

CostReport graph_cost(const GraphSpec& spec) {
    const std::vector<ResolvedLayer> layers = resolve(spec);
    CostReport report;
    for (const ResolvedLayer& rl : layers) {
        LayerCost row;
        switch (rl.kind) {
            case LayerKind::conv:
                row = cost_conv(rl.in.c, rl.out_c, rl.k, 1, rl.out.h, rl.out.w);
                break;
            case LayerKind::gsconv:
                row = cost_gsconv(rl.in.c, rl.out_c, rl.k, rl.k_dw, rl.s, rl.in.h, rl.in.w);
                break;
            case LayerKind::gs_bottleneck:
                row = cost_gs_bottleneck(rl.in.c, rl.out_c, rl.in.h, rl.in.w);
                break;
            case LayerKind::vov_gscsp:
                row = cost_vov_gscsp(rl.in.c, rl.out_c, rl.n, rl.in.h, rl.in.w);
                break;
            case LayerKind::csp: row = cost_csp(rl.in.c, rl.out_c, rl.n, rl.in.h, rl.in.w); break;
            case LayerKind::spp: row = cost_spp(rl.in.c, rl.in.h, rl.in.w); break;
            case LayerKind::sppf: row = cost_sppf(rl.in.c, rl.in.h, rl.in.w); break;
            case LayerKind::se: row = cost_se(rl.in.c, rl.r, rl.in.h, rl.in.w); break;
            case LayerKind::cbam: row = cost_cbam(rl.in.c, rl.r, rl.in.h, rl.in.w); break;
            case LayerKind::ca: row = cost_ca(rl.in.c, rl.r, rl.in.h, rl.in.w); break;
            case LayerKind::concat:
            case LayerKind::add:
            case LayerKind::upsample_nearest2x:
                row.kind = kind_name(rl.kind);
                row.in_c = rl.in.c;
                row.in_h = rl.in.h;
                row.in_w = rl.in.w;
                break;
        }
        row.name = rl.name;
        row.in_c = rl.in.c;
        row.in_h = rl.in.h;
        row.in_w = rl.in.w;
        row.out_c = rl.out.c;
        row.out_h = rl.out.h;
        row.out_w = rl.out.w;
        report.add(std::move(row));
    }
    return report;
}

} // namespace slimconv
