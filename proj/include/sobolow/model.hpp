#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sobolow/errors.hpp"

namespace sobolow {

// A d-variate model: evaluation, optional analytic gradient, optional face
// restriction (one coordinate pinned), and per-dimension kink markers
// (coordinate values where the output or its derivative is not smooth, used
// to split quadrature panels).
class ModelFunction {
public:
    using Eval = std::function<double(std::span<const double>)>;
    using Grad = std::function<std::vector<double>(std::span<const double>)>;
    using Face = std::function<double(int, double, std::span<const double>)>;

    ModelFunction() = default;
    ModelFunction(std::string name, int dim, Eval f)
        : name_(std::move(name)), dim_(dim), eval_(std::move(f)), kinks_(dim) {}

    ModelFunction& with_gradient(Grad g) {
        grad_ = std::move(g);
        return *this;
    }
    ModelFunction& with_face(Face f) {
        face_ = std::move(f);
        return *this;
    }
    ModelFunction& with_kinks(std::vector<std::vector<double>> k) {
        kinks_ = std::move(k);
        return *this;
    }

    const std::string& name() const { return name_; }
    int dim() const { return dim_; }
    bool has_gradient() const { return static_cast<bool>(grad_); }
    bool has_face() const { return static_cast<bool>(face_); }
    const std::vector<std::vector<double>>& kinks() const { return kinks_; }

    double operator()(std::span<const double> x) const { return eval_(x); }

    std::vector<double> gradient(std::span<const double> x) const {
        if (!grad_) throw MissingGradients("model '" + name_ + "' has no gradient");
        return grad_(x);
    }

    // h evaluated at x with coordinate i replaced by xi.
    double face(int i, double xi, std::span<const double> x) const {
        if (face_) return face_(i, xi, x);
        if (!eval_) throw MissingFaceValues("model '" + name_ + "' cannot evaluate faces");
        std::vector<double> y(x.begin(), x.end());
        y[static_cast<std::size_t>(i)] = xi;
        return eval_(y);
    }

private:
    std::string name_;
    int dim_ = 0;
    Eval eval_;
    Grad grad_;
    Face face_;
    std::vector<std::vector<double>> kinks_;
};

} // namespace sobolow
