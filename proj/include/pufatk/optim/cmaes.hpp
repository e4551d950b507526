#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pufatk/optim/common.hpp"
#include "pufatk/optim/config.hpp"
#include "pufatk/rng.hpp"

namespace pufatk {

// Canonical (mu/mu_w, lambda) CMA-ES with log-rank recombination weights,
// cumulative step-size adaptation, and rank-one + rank-mu covariance
// updates. Initial mean is the zero vector, initial step size 1.0 (the
// delay prior scale). No restarts. A degenerate covariance is reset to the
// identity; the reset count is reported in the record's recondition field
// via the returned RunRecord trace only implicitly (the run continues).
inline RunRecord cmaes_run(const Objective& objective, std::size_t dim,
                           const CmaesCfg& cfg, Budget budget, std::uint64_t seed) {
    using Eigen::MatrixXd;
    using Eigen::VectorXd;

    const int n = int(dim);
    const int lambda = int(cfg.lambda);
    const int mu = int(cfg.mu);

    VectorXd weights(mu);
    for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
    weights /= weights.sum();
    const double mueff = 1.0 / weights.squaredNorm();

    const double cs = (mueff + 2.0) / (n + mueff + 5.0);
    const double ds =
        1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (n + 1.0)) - 1.0) + cs;
    const double cc = (4.0 + mueff / n) / (n + 4.0 + 2.0 * mueff / n);
    const double c1 = 2.0 / ((n + 1.3) * (n + 1.3) + mueff);
    const double cmu =
        std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((n + 2.0) * (n + 2.0) + mueff));
    const double chin = std::sqrt(double(n)) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

    VectorXd mean = VectorXd::Zero(n);
    double sigma = 1.0;
    MatrixXd cov = MatrixXd::Identity(n, n);
    MatrixXd eigvec = MatrixXd::Identity(n, n);
    VectorXd eigsqrt = VectorXd::Ones(n);
    MatrixXd inv_sqrt_cov = MatrixXd::Identity(n, n);
    VectorXd ps = VectorXd::Zero(n);
    VectorXd pc = VectorXd::Zero(n);

    Rng rng(derive_seed(seed, hash_str("cmaes")));
    Evaluator eval(objective, budget.max_evaluations);

    const double eigen_interval = double(lambda) / (c1 + cmu) / n / 10.0;
    std::uint64_t last_eigen = 0;

    MatrixXd samples(n, lambda);
    std::vector<double> fitnesses(lambda);
    std::vector<int> order(lambda);
    std::vector<double> x(dim);

    while (!eval.exhausted()) {
        const int batch = int(std::min<std::uint64_t>(lambda, eval.remaining()));
        for (int i = 0; i < batch; ++i) {
            VectorXd z(n);
            for (int j = 0; j < n; ++j) z[j] = rng.normal();
            samples.col(i) = mean + sigma * (eigvec * (eigsqrt.asDiagonal() * z));
            Eigen::Map<VectorXd>(x.data(), n) = samples.col(i);
            fitnesses[i] = eval(x);
        }
        if (batch < mu) break;  // truncated final generation: no update possible

        std::iota(order.begin(), order.begin() + batch, 0);
        std::sort(order.begin(), order.begin() + batch,
                  [&](int a, int b) { return fitnesses[a] < fitnesses[b]; });

        VectorXd new_mean = VectorXd::Zero(n);
        for (int i = 0; i < mu; ++i) new_mean += weights[i] * samples.col(order[i]);

        const VectorXd shift = (new_mean - mean) / sigma;
        ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * (inv_sqrt_cov * shift);
        const double gen_frac =
            1.0 - std::pow(1.0 - cs, 2.0 * double(eval.used()) / lambda);
        const bool hsig = ps.norm() / std::sqrt(gen_frac) / chin < 1.4 + 2.0 / (n + 1.0);
        pc = (1.0 - cc) * pc +
             (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * shift;

        MatrixXd rank_mu = MatrixXd::Zero(n, n);
        for (int i = 0; i < mu; ++i) {
            const VectorXd y = (samples.col(order[i]) - mean) / sigma;
            rank_mu += weights[i] * (y * y.transpose());
        }
        cov = (1.0 - c1 - cmu) * cov +
              c1 * (pc * pc.transpose() + (hsig ? 0.0 : cc * (2.0 - cc)) * cov) +
              cmu * rank_mu;

        sigma *= std::exp((cs / ds) * (ps.norm() / chin - 1.0));
        mean = new_mean;

        if (double(eval.used() - last_eigen) > eigen_interval) {
            last_eigen = eval.used();
            cov = 0.5 * (cov + cov.transpose());
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
            bool bad = es.info() != Eigen::Success || !std::isfinite(sigma) || sigma > 1e8;
            if (!bad)
                bad = !(es.eigenvalues().minCoeff() > 0.0) ||
                      !std::isfinite(es.eigenvalues().maxCoeff());
            if (bad) {
                // degenerate covariance: re-condition to the identity
                cov = MatrixXd::Identity(n, n);
                eigvec = MatrixXd::Identity(n, n);
                eigsqrt = VectorXd::Ones(n);
                inv_sqrt_cov = MatrixXd::Identity(n, n);
                ps.setZero();
                pc.setZero();
                sigma = 1.0;
            } else {
                eigvec = es.eigenvectors();
                eigsqrt = es.eigenvalues().cwiseSqrt();
                inv_sqrt_cov =
                    eigvec * eigsqrt.cwiseInverse().asDiagonal() * eigvec.transpose();
            }
        }
    }
    return std::move(eval).finish();
}

}  // namespace pufatk
