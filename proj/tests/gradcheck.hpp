#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "panogan/core/tensor.hpp"

// Central-difference gradient checking on 64-bit closures. `eval` must
// rebuild the computation from the current contents of `param`; it is called
// with the parameter perturbed one element at a time.
namespace panogan::testing {

struct GradCheckResult {
    double max_rel_err = 0.0;
    int64_t argmax = -1;
};

inline GradCheckResult gradcheck(const std::function<double()>& eval, Tensor<double>& param,
                                 const Tensor<double>& analytic, double h = 1e-5) {
    GradCheckResult res;
    double* p = param.data();
    for (int64_t i = 0; i < param.numel(); ++i) {
        const double keep = p[i];
        const double step = h * std::max(1.0, std::abs(keep));
        p[i] = keep + step;
        const double fp = eval();
        p[i] = keep - step;
        const double fm = eval();
        p[i] = keep;
        const double num = (fp - fm) / (2.0 * step);
        const double ana = analytic.data()[i];
        const double denom = std::max({1e-8, std::abs(num), std::abs(ana)});
        const double rel = std::abs(num - ana) / denom;
        if (rel > res.max_rel_err) {
            res.max_rel_err = rel;
            res.argmax = i;
        }
    }
    return res;
}

}  // namespace panogan::testing
