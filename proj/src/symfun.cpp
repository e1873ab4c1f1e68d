#include "sigma2/symfun.hpp"

#include <cmath>
#include <random>

namespace sigma2 {

namespace {

// 53 random mantissa bits; independent of the standard library's distributions.
double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

std::vector<Spectrum> sample_gamma_k(int n, int k, int count, std::uint64_t seed,
                                     std::int64_t budget) {
    if (n < 2) throw InvalidArgument("sample_gamma_k needs n >= 2");
    detail::check_order(n, k, 1, n);
    if (count < 1) throw InvalidArgument("sample_gamma_k needs count >= 1");

    std::mt19937_64 rng(seed);
    const double lo = -1.0;
    const double hi = static_cast<double>(n);
    std::vector<Spectrum> out;
    out.reserve(static_cast<std::size_t>(count));
    Vec<double> eta(n);
    for (std::int64_t trial = 0; trial < budget; ++trial) {
        for (int j = 0; j < n; ++j) eta[j] = lo + (hi - lo) * unit_uniform(rng);
        if (!in_gamma_k(eta, k)) continue;
        out.emplace_back(eta);
        if (static_cast<int>(out.size()) == count) return out;
    }
    throw SamplingFailure("sample_gamma_k: rejection budget of " + std::to_string(budget) +
                          " trials exhausted after " + std::to_string(out.size()) + " of " +
                          std::to_string(count) + " samples (n=" + std::to_string(n) +
                          ", k=" + std::to_string(k) + ")");
}

SlackRecord inequality_slacks(const Spectrum& eta) {
    const auto jet = log_sigma2_jet(eta);
    const double n = static_cast<double>(eta.size());
    const double grad_sum = jet.grad.sum();

    SlackRecord r{};
    r.maclaurin_sum_slack = grad_sum - 2.0 * (n - 1.0) / n / std::sqrt(jet.sigma2);
    r.eta1_sigma1_slack = eta[0] * jet.sigma1_excl[0] - 2.0 * jet.sigma2 / n;
    r.sigma1_product_slack = jet.sigma1_excl[0] * jet.sigma1 - jet.sigma2;
    r.min_grad_ratio = jet.grad.tail(eta.size() - 1).minCoeff() / grad_sum;
    return r;
}

} // namespace sigma2
