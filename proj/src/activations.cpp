#include "slimconv/activations.hpp"

#include <cmath>
#include <stdexcept>

namespace slimconv {

ActivationKind ActivationKind::swish(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("swish: beta must be finite and positive");
    return {ActTag::swish, beta};
}

std::string ActivationKind::name() const {
    switch (tag) {
        case ActTag::relu: return "relu";
        case ActTag::sigmoid: return "sigmoid";
        case ActTag::tanh: return "tanh";
        case ActTag::swish: return "swish";
        case ActTag::mish: return "mish";
        case ActTag::hard_swish: return "hard_swish";
    }
    return "?";
}

double softplus(double x) {
    if (x > 20.0) return x;
    if (x < -20.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

namespace {

double sigmoid_d(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace

double activate_scalar(const ActivationKind& kind, double x) {
    switch (kind.tag) {
        case ActTag::relu: return x > 0.0 ? x : 0.0;
        case ActTag::sigmoid: return sigmoid_d(x);
        case ActTag::tanh: return std::tanh(x);
        case ActTag::swish: return x * sigmoid_d(kind.beta * x);
        case ActTag::mish: return x * std::tanh(softplus(x));
        case ActTag::hard_swish: {
            double r = x + 3.0;
            r = r < 0.0 ? 0.0 : (r > 6.0 ? 6.0 : r);
            return x * r / 6.0;
        }
    }
    return 0.0;
}

double activate_grad_scalar(const ActivationKind& kind, double x) {
    switch (kind.tag) {
        case ActTag::relu: return x > 0.0 ? 1.0 : 0.0;
        case ActTag::sigmoid: {
            const double s = sigmoid_d(x);
            return s * (1.0 - s);
        }
        case ActTag::tanh: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case ActTag::swish: {
            const double s = sigmoid_d(kind.beta * x);
            return s + kind.beta * x * s * (1.0 - s);
        }
        case ActTag::mish: {
            const double t = std::tanh(softplus(x));
            return t + x * (1.0 - t * t) * sigmoid_d(x);
        }
        case ActTag::hard_swish:
            if (x <= -3.0) return 0.0;
            if (x >= 3.0) return 1.0;
            return (2.0 * x + 3.0) / 6.0;
    }
    return 0.0;
}

Tensor activate(const ActivationKind& kind, const Tensor& x) {
    Tensor out(x.n, x.c, x.h, x.w);
    for (std::size_t i = 0; i < x.data.size(); ++i)
        out.data[i] = static_cast<float>(activate_scalar(kind, x.data[i]));
    return out;
}

Tensor activate_grad(const ActivationKind& kind, const Tensor& x) {
    Tensor out(x.n, x.c, x.h, x.w);
    for (std::size_t i = 0; i < x.data.size(); ++i)
        out.data[i] = static_cast<float>(activate_grad_scalar(kind, x.data[i]));
    return out;
}

double finite_difference(const std::function<double(double)>& f, double x, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("finite_difference: step must be > 0");
    return (f(x + step) - f(x - step)) / (2.0 * step);
}

ActivationKind parse_activation(const std::string& name) {
    if (name == "relu") return ActivationKind::relu();
    if (name == "sigmoid") return ActivationKind::sigmoid();
    if (name == "tanh") return ActivationKind::tanh();
    if (name == "swish") return ActivationKind::swish();
    if (name == "mish") return ActivationKind::mish();
    if (name == "hard_swish") return ActivationKind::hard_swish();
    throw std::invalid_argument("unknown activation: " + name);
}

} // namespace slimconv
