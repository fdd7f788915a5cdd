#include "firmsim/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace firmsim {

DecayKernel build_decay_kernel(int width, int height, double alpha, std::uint32_t cell_budget) {
    if (width < 1 || height < 1) throw std::invalid_argument("kernel grid dimensions must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("kernel alpha must be > 0");

    const std::uint64_t n = static_cast<std::uint64_t>(width) * height;
    if (n > cell_budget) {
        throw std::length_error("GridTooLarge: " + std::to_string(n) + " cells exceeds the kernel budget of " +
                                std::to_string(cell_budget));
    }

    DecayKernel k;
    k.width = width;
    k.height = height;
    k.alpha = alpha;
    k.weights.resize(n * n);

    // Symmetric; compute the lower triangle and mirror.
    for (std::uint32_t i = 0; i < n; ++i) {
        const int xi = static_cast<int>(i) % width;
        const int yi = static_cast<int>(i) / width;
        k.weights[static_cast<size_t>(i) * n + i] = 1.0;
        for (std::uint32_t j = 0; j < i; ++j) {
            const int dx = xi - static_cast<int>(j) % width;
            const int dy = yi - static_cast<int>(j) / width;
            const double d = std::sqrt(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy);
            const double w = std::exp(-alpha * d);
            k.weights[static_cast<size_t>(i) * n + j] = w;
            k.weights[static_cast<size_t>(j) * n + i] = w;
        }
    }
    return k;
}

KernelSet::KernelSet(int width, int height, const TypeParams& old_params, const TypeParams& new_params,
                     std::uint32_t cell_budget) {
    auto shared = [&](double alpha) -> std::shared_ptr<const DecayKernel> {
        for (const auto& k : pool_) {
            if (k->alpha == alpha) return k;
        }
        pool_.push_back(std::make_shared<DecayKernel>(build_decay_kernel(width, height, alpha, cell_budget)));
        return pool_.back();
    };

    const TypeParams* params[2] = {&old_params, &new_params};
    for (int t = 0; t < 2; ++t) {
        mp_[t] = shared(params[t]->alpha_mp);
        ap_[t] = shared(params[t]->alpha_ap);
        cp_[t] = shared(params[t]->alpha_cp);
    }
}

}  // namespace firmsim
