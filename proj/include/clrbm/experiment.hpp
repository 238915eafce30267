#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "clrbm/dataset.hpp"
#include "clrbm/model.hpp"
#include "clrbm/rng.hpp"
#include "clrbm/sampler.hpp"
#include "clrbm/trainer.hpp"

// End-to-end synthetic experiment: per trial, generate a dataset from a
// fixed generator RBM, train {ML, CL1, CL2, CL3} from one shared random
// init, then average the recorded curves, the final true log-likelihoods
// and the parameter MADs over trials.

namespace clrbm {

/// RBM with constant biases and weights (the synthetic generator).
inline RbmParams uniform_rbm(int n, int m, double alpha, double beta, double weight) {
    RbmParams p(n, m);
    for (int i = 0; i < n; ++i) p.alpha[i] = alpha;
    for (int j = 0; j < m; ++j) p.beta[j] = beta;
    for (double& v : p.w) v = weight;
    return p;
}

struct ReproduceConfig {
    int n = 5;
    int m_learner = 10;
    int m_generator = 17;
    int num_samples = 70;
    double learning_rate = 0.1;
    std::int64_t iterations = 50000;
    int trials = 30;
    std::uint64_t master_seed = 1;
    bool exact_sampling = false; // default: MCMC
    std::int64_t burn_in = 10000;
    std::int64_t thinning = 100;
    std::int64_t record_every = 100;
    double init_scale = 0.5;
    double gen_alpha = 0.1;
    double gen_beta = -0.1;
    double gen_weight = 0.2;
    bool share_dataset = false; // reuse trial 0's dataset everywhere
    int jobs = 0;               // 0 = hardware concurrency
    int ll_cap = kDefaultEnumCap;
};

/// Method slots, fixed order.
inline constexpr std::array<int, 4> kMethodOrders = {kMlOrder, 1, 2, 3};
inline constexpr std::array<const char*, 4> kMethodNames = {"ml", "cl1", "cl2", "cl3"};

struct ReproduceResult {
    std::vector<std::int64_t> iteration_grid;
    std::array<std::vector<double>, 4> mean_objective; // trial means, per method
    std::array<std::vector<double>, 4> mean_true_ll;
    std::array<double, 4> mean_final_true_ll{};
    std::array<MadTriple, 3> mean_mad{}; // CL_k final params vs ML final params, k = 1..3
};

namespace detail {

inline void check_reproduce_config(const ReproduceConfig& cfg) {
    if (cfg.n < 3) throw std::invalid_argument("reproduce: need n >= 3 (CL3 is part of the protocol)");
    if (cfg.n > cfg.ll_cap) throw std::invalid_argument("reproduce: need n <= ll_cap for the exact ML leg");
    if (cfg.m_learner < 1 || cfg.m_generator < 1) throw std::invalid_argument("reproduce: hidden counts must be >= 1");
    if (cfg.num_samples < 1) throw std::invalid_argument("reproduce: num_samples must be >= 1");
    if (cfg.trials < 1) throw std::invalid_argument("reproduce: trials must be >= 1");
    if (cfg.iterations < 1) throw std::invalid_argument("reproduce: iterations must be >= 1");
}

struct TrialOutcome {
    std::array<TrainTrace, 4> traces;
};

inline TrialOutcome run_trial(const ReproduceConfig& cfg, int trial) {
    const int seed_trial = cfg.share_dataset ? 0 : trial;
    const std::uint64_t trial_seed = split_seed(cfg.master_seed, static_cast<std::uint64_t>(seed_trial));
    const std::uint64_t data_seed = split_seed(trial_seed, 1);
    // the init stays per-trial even when the dataset is shared
    const std::uint64_t init_seed =
        split_seed(split_seed(cfg.master_seed, static_cast<std::uint64_t>(trial)), 2);

    const RbmParams generator =
        uniform_rbm(cfg.n, cfg.m_generator, cfg.gen_alpha, cfg.gen_beta, cfg.gen_weight);
    Dataset data;
    if (cfg.exact_sampling) {
        data = generate_dataset_exact(generator, cfg.num_samples, data_seed, cfg.ll_cap);
    } else {
        SamplerConfig scfg;
        scfg.seed = data_seed;
        scfg.burn_in = cfg.burn_in;
        scfg.thinning = cfg.thinning;
        scfg.num_samples = cfg.num_samples;
        data = generate_dataset(generator, scfg);
    }

    TrialOutcome out;
    for (std::size_t s = 0; s < kMethodOrders.size(); ++s) {
        TrainConfig tc;
        tc.k = kMethodOrders[s];
        tc.learning_rate = cfg.learning_rate;
        tc.iterations = cfg.iterations;
        tc.init_seed = init_seed; // shared across the four methods
        tc.init_scale = cfg.init_scale;
        tc.record_every = cfg.record_every;
        tc.ll_cap = cfg.ll_cap;
        out.traces[s] = train(data, cfg.m_learner, tc);
    }
    return out;
}

} // namespace detail

/// Runs all trials (concurrently up to jobs workers; results are reduced in
/// trial order, so the output is independent of scheduling) and aggregates.
inline ReproduceResult run_reproduce(const ReproduceConfig& cfg) {
    detail::check_reproduce_config(cfg);
    const int trials = cfg.trials;
    std::vector<detail::TrialOutcome> outcomes(static_cast<std::size_t>(trials));

    int jobs = cfg.jobs > 0 ? cfg.jobs : static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    jobs = std::min(jobs, trials);

    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
        while (true) {
            const int trial = next.fetch_add(1);
            if (trial >= trials) return;
            try {
                outcomes[static_cast<std::size_t>(trial)] = detail::run_trial(cfg, trial);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    ReproduceResult res;
    const std::size_t num_points = outcomes[0].traces[0].points.size();
    res.iteration_grid.reserve(num_points);
    for (const TracePoint& pt : outcomes[0].traces[0].points) res.iteration_grid.push_back(pt.iteration);

    for (std::size_t s = 0; s < kMethodOrders.size(); ++s) {
        res.mean_objective[s].assign(num_points, 0.0);
        res.mean_true_ll[s].assign(num_points, 0.0);
        for (int trial = 0; trial < trials; ++trial) {
            const TrainTrace& tr = outcomes[static_cast<std::size_t>(trial)].traces[s];
            if (tr.points.size() != num_points) throw std::runtime_error("reproduce: inconsistent trace lengths");
            for (std::size_t q = 0; q < num_points; ++q) {
                res.mean_objective[s][q] += tr.points[q].objective;
                res.mean_true_ll[s][q] += tr.points[q].true_ll;
            }
        }
        for (double& v : res.mean_objective[s]) v /= trials;
        for (double& v : res.mean_true_ll[s]) v /= trials;
        res.mean_final_true_ll[s] = res.mean_true_ll[s].back();
    }

    for (int k = 1; k <= 3; ++k) {
        MadTriple acc;
        for (int trial = 0; trial < trials; ++trial) {
            const auto& traces = outcomes[static_cast<std::size_t>(trial)].traces;
            const MadTriple mad =
                mean_absolute_deviation(traces[static_cast<std::size_t>(k)].final_params, traces[0].final_params);
            acc.alpha += mad.alpha;
            acc.beta += mad.beta;
            acc.w += mad.w;
        }
        acc.alpha /= trials;
        acc.beta /= trials;
        acc.w /= trials;
        res.mean_mad[static_cast<std::size_t>(k - 1)] = acc;
    }
    return res;
}

/// Emits the four CSV artifacts into out_dir:
///   cl_curves.csv  - mean maximized objective per method vs iteration
///   ll_curves.csv  - mean true log-likelihood per method vs iteration
///   mad_table.csv  - mean parameter MADs of CL_k finals against ML finals
///   final_ll.csv   - mean final true log-likelihood per method
inline void write_reproduce_csvs(const ReproduceResult& res, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto open = [&](const char* name) {
        std::ofstream os(std::filesystem::path(out_dir) / name);
        if (!os) throw std::runtime_error(std::string("cannot open output file: ") + name);
        return os;
    };

    auto write_curves = [&](const char* name, const std::array<std::vector<double>, 4>& series) {
        std::ofstream os = open(name);
        os << "iteration,ml,cl1,cl2,cl3\n";
        for (std::size_t q = 0; q < res.iteration_grid.size(); ++q) {
            os << res.iteration_grid[q];
            for (std::size_t s = 0; s < series.size(); ++s) os << ',' << format_double(series[s][q]);
            os << '\n';
        }
        if (!os) throw std::runtime_error(std::string("failed writing output file: ") + name);
    };
    write_curves("cl_curves.csv", res.mean_objective);
    write_curves("ll_curves.csv", res.mean_true_ll);

    {
        std::ofstream os = open("mad_table.csv");
        os << "k,alpha,beta,w\n";
        for (int k = 1; k <= 3; ++k) {
            const MadTriple& mad = res.mean_mad[static_cast<std::size_t>(k - 1)];
            os << k << ',' << format_double(mad.alpha) << ',' << format_double(mad.beta) << ','
               << format_double(mad.w) << '\n';
        }
    }
    {
        std::ofstream os = open("final_ll.csv");
        os << "method,mean_final_true_log_likelihood\n";
        for (std::size_t s = 0; s < kMethodNames.size(); ++s) {
            os << kMethodNames[s] << ',' << format_double(res.mean_final_true_ll[s]) << '\n';
        }
    }
}

} // namespace clrbm
