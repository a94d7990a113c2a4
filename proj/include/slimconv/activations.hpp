#pragma once

#include <functional>
#include <string>

#include "slimconv/tensor.hpp"

namespace slimconv {

enum class ActTag { relu, sigmoid, tanh, swish, mish, hard_swish };

// Scalar activation choice. beta only applies to swish (f(x) = x*sigmoid(beta*x))
// and defaults to 1.
struct ActivationKind {
    ActTag tag = ActTag::relu;
    double beta = 1.0;

    static ActivationKind relu() { return {ActTag::relu, 1.0}; }
    static ActivationKind sigmoid() { return {ActTag::sigmoid, 1.0}; }
    static ActivationKind tanh() { return {ActTag::tanh, 1.0}; }
    static ActivationKind swish(double beta = 1.0);
    static ActivationKind mish() { return {ActTag::mish, 1.0}; }
    static ActivationKind hard_swish() { return {ActTag::hard_swish, 1.0}; }

    std::string name() const;
};

// Overflow-safe softplus: log(1+e^x), with softplus(x) ~= x above 20 and
// ~= e^x below -20.
double softplus(double x);

double activate_scalar(const ActivationKind& kind, double x);

// Closed-form derivative. relu uses subgradient 0 at x == 0; hard_swish takes
// the one-sided values at its kinks (0 at -3, 1 at +3).
double activate_grad_scalar(const ActivationKind& kind, double x);

// Pointwise tensor application of the scalar forms.
Tensor activate(const ActivationKind& kind, const Tensor& x);
Tensor activate_grad(const ActivationKind& kind, const Tensor& x);

// Central difference (f(x+step) - f(x-step)) / (2*step). Shared gradient
// oracle; also used by the loss checks.
double finite_difference(const std::function<double(double)>& f, double x, double step);

ActivationKind parse_activation(const std::string& name); // throws on unknown name

} // namespace slimconv
