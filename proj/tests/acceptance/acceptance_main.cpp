// Acceptance suite: exercises every end-to-end requirement at its stated
// tolerance and prints one PASS/FAIL line per criterion. The full experiment
// (criterion 5) runs through the installed CLI binary, whose path must be
// passed as --cli <path>.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "clrbm/experiment.hpp"
#include "clrbm/gradients.hpp"
#include "clrbm/objectives.hpp"
#include "clrbm/oracle.hpp"
#include "clrbm/sampler.hpp"
#include "clrbm/trainer.hpp"
#include "../support.hpp"

namespace fs = std::filesystem;
using namespace clrbm;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Instance {
    RbmParams params;
    Dataset data;
};

std::vector<Instance> make_instances(std::uint64_t seed, int count, int n_lo, int n_hi, int m_lo,
                                     int m_hi, double scale, int rows_lo, int rows_hi) {
    SplitMix64 rng(seed);
    std::vector<Instance> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) {
        const int n = testsupport::rand_int(rng, n_lo, n_hi);
        const int m = testsupport::rand_int(rng, m_lo, m_hi);
        Instance inst{testsupport::random_params(rng, n, m, scale),
                      testsupport::random_dataset(rng, n, testsupport::rand_int(rng, rows_lo, rows_hi))};
        out.push_back(std::move(inst));
    }
    return out;
}

int run_command(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    if (WIFEXITED(rc)) return WEXITSTATUS(rc);
    return -2;
}

std::string read_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::ifstream is(path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

double chi_squared_pvalue(double stat, int dof) {
    const boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, stat));
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

// ---- criterion 1: the composite likelihood is an upper bound ------------

Outcome criterion_upper_bound(const std::vector<Instance>& instances) {
    const auto t0 = std::chrono::steady_clock::now();
    SplitMix64 rng(424242);
    double worst_gap = std::numeric_limits<double>::infinity();
    double worst_rem = -std::numeric_limits<double>::infinity();
    int irregular = 0;
    for (const Instance& inst : instances) {
        const double ll = log_likelihood_ml(inst.params, inst.data);
        const int n = inst.params.n;
        std::vector<BlockFamily> families;
        for (int k = 1; k <= n; ++k) families.push_back(enumerate_family(n, k));
        if (irregular < 25) {
            families.push_back(testsupport::random_irregular_family(rng, n));
            ++irregular;
        }
        for (const BlockFamily& f : families) {
            const double cl = composite_likelihood(inst.params, inst.data, f);
            const double rem = remainder(inst.params, inst.data, f);
            worst_gap = std::min(worst_gap, cl - ll);
            worst_rem = std::max(worst_rem, rem);
        }
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Outcome out;
    out.pass = worst_gap >= -1e-10 && worst_rem <= 1e-12 && irregular >= 20 && sec < 60.0;
    out.detail = std::to_string(instances.size()) + " instances, " + std::to_string(irregular) +
                 " irregular families; min(CL - LL) = " + fmt(worst_gap) +
                 ", max remainder = " + fmt(worst_rem) + ", " + fmt(sec) + " s";
    return out;
}

// ---- criterion 2: monotone chain over the block order -------------------

Outcome criterion_monotone_chain(const std::vector<Instance>& instances) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_step = std::numeric_limits<double>::infinity();
    double worst_match = 0.0;
    double worst_dk = std::numeric_limits<double>::infinity();
    for (const Instance& inst : instances) {
        const int n = inst.params.n;
        const double ll = log_likelihood_ml(inst.params, inst.data);
        double prev = std::numeric_limits<double>::infinity();
        for (int k = 1; k <= n; ++k) {
            const double cl = composite_likelihood(inst.params, inst.data, enumerate_family(n, k));
            if (k > 1) worst_step = std::min(worst_step, prev - cl);
            if (k == n) worst_match = std::max(worst_match, std::abs(cl - ll));
            prev = cl;
        }
        for (int k = 1; k + 1 <= n; ++k) {
            worst_dk = std::min(worst_dk, remainder_difference(inst.params, inst.data, k));
        }
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Outcome out;
    out.pass = worst_step >= -1e-10 && worst_match <= 1e-10 && worst_dk >= -1e-12 && sec < 60.0;
    out.detail = "min chain step = " + fmt(worst_step) + ", max |L_{F_n} - L_ML| = " + fmt(worst_match) +
                 ", min D_k = " + fmt(worst_dk) + ", " + fmt(sec) + " s";
    return out;
}

// ---- criterion 3: analytic gradients match finite differences -----------

Outcome criterion_gradients() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<Instance> instances = make_instances(777, 50, 2, 5, 1, 3, 1.0, 2, 10);
    double worst_rel_cl = 0.0, worst_rel_ml = 0.0;
    for (const Instance& inst : instances) {
        const int n = inst.params.n;
        for (int k = 1; k <= n; ++k) {
            const BlockFamily f = enumerate_family(n, k);
            const GradientTriple g = cl_gradient(inst.params, inst.data, f);
            const GradientTriple fd = testsupport::fd_gradient(
                inst.params, [&](const RbmParams& q) { return composite_likelihood(q, inst.data, f); });
            worst_rel_cl = std::max(
                worst_rel_cl, testsupport::max_abs_diff(g, fd) / std::max(testsupport::max_abs(fd), 1e-8));
        }
        const GradientTriple g = ml_gradient(inst.params, inst.data);
        const GradientTriple fd = testsupport::fd_gradient(
            inst.params, [&](const RbmParams& q) { return log_likelihood_ml(q, inst.data); });
        worst_rel_ml = std::max(worst_rel_ml,
                                testsupport::max_abs_diff(g, fd) / std::max(testsupport::max_abs(fd), 1e-8));
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Outcome out;
    out.pass = worst_rel_cl < 1e-6 && worst_rel_ml < 1e-6 && sec < 60.0;
    out.detail = "50 instances, every k; worst rel err composite = " + fmt(worst_rel_cl) +
                 ", exact-ML = " + fmt(worst_rel_ml) + ", " + fmt(sec) + " s";
    return out;
}

// ---- criterion 4: reduction identities ----------------------------------

Outcome criterion_reductions(const std::vector<Instance>& instances) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_pl = 0.0, worst_plg = 0.0;
    int used = 0;
    for (const Instance& inst : instances) {
        if (used >= 50) break;
        ++used;
        const BlockFamily f1 = enumerate_family(inst.params.n, 1);
        worst_pl = std::max(worst_pl, std::abs(composite_likelihood(inst.params, inst.data, f1) -
                                               pseudo_likelihood(inst.params, inst.data)));
        worst_plg = std::max(worst_plg,
                             testsupport::max_abs_diff(cl_gradient(inst.params, inst.data, f1),
                                                       testsupport::reference_pl_gradient(inst.params, inst.data)));
    }

    // 500-iteration full-order trace against the exact-ML trace
    SplitMix64 rng(31337);
    const RbmParams gen = testsupport::random_params(rng, 3, 3, 0.7);
    const Dataset d = generate_dataset_exact(gen, 10, 97);
    TrainConfig cfg;
    cfg.k = 3;
    cfg.learning_rate = 0.1;
    cfg.iterations = 500;
    cfg.init_seed = 5;
    cfg.record_every = 1;
    const TrainTrace full_order = train(d, 2, cfg);
    cfg.k = kMlOrder;
    const TrainTrace exact_ml = train(d, 2, cfg);
    double worst_trace = 0.0;
    for (std::size_t t = 0; t < full_order.points.size(); ++t) {
        worst_trace = std::max(worst_trace,
                               std::abs(full_order.points[t].objective - exact_ml.points[t].objective));
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Outcome out;
    out.pass = worst_pl <= 1e-12 && worst_plg <= 1e-12 && worst_trace <= 1e-12;
    out.detail = "max |CL(F_1) - PL| = " + fmt(worst_pl) + ", max PL-gradient gap = " + fmt(worst_plg) +
                 ", max per-iteration trace gap over 500 = " + fmt(worst_trace) + ", " + fmt(sec) + " s";
    return out;
}

// ---- criterion 5: full experiment reproduction --------------------------

struct FullRun {
    bool ok = false;
    fs::path dir;
    std::string error;
};

FullRun run_full_experiment(const std::string& cli, const fs::path& tmp) {
    FullRun run;
    run.dir = tmp / "full";
    const std::string cmd = cli + " reproduce --out-dir " + run.dir.string() + " --jobs 0 > " +
                            (tmp / "full.log").string() + " 2>&1";
    const int rc = run_command(cmd);
    if (rc != 0) {
        run.error = "reproduce exited with code " + std::to_string(rc);
        return run;
    }
    for (const char* name : {"cl_curves.csv", "ll_curves.csv", "mad_table.csv", "final_ll.csv"}) {
        if (!fs::exists(run.dir / name)) {
            run.error = std::string("missing output ") + name;
            return run;
        }
    }
    run.ok = true;
    return run;
}

Outcome criterion_experiment_values(const FullRun& run, double seconds) {
    Outcome out;
    if (!run.ok) {
        out.detail = run.error;
        return out;
    }
    const auto rows = read_csv(run.dir / "final_ll.csv");
    std::map<std::string, double> got;
    for (std::size_t r = 1; r < rows.size(); ++r) got[rows[r][0]] = std::stod(rows[r][1]);
    const std::array<std::pair<const char*, double>, 4> target = {
        {{"ml", -1.741}, {"cl1", -1.796}, {"cl2", -1.742}, {"cl3", -1.741}}};
    bool values_ok = true;
    std::string vals = "measured:";
    for (const auto& [name, want] : target) {
        const double v = got.at(name);
        vals += std::string(" ") + name + "=" + fmt(v);
        if (std::abs(v - want) > 0.05) values_ok = false;
    }
    const bool order_ok = got["ml"] >= got["cl3"] - 0.01 && got["cl3"] >= got["cl2"] - 0.01 &&
                          got["cl2"] >= got["cl1"] - 0.01;
    out.pass = values_ok && order_ok;
    out.detail = vals + "; targets ml=-1.741 cl1=-1.796 cl2=-1.742 cl3=-1.741 (+-0.05): " +
                 (values_ok ? "ok" : "MISSED") + "; ordering ml >= cl3 >= cl2 >= cl1 (tol 0.01): " +
                 (order_ok ? "ok" : "VIOLATED") + "; " + fmt(seconds) + " s (target < 1800 s)";
    return out;
}

// ---- criterion 6: parameter-deviation trend ------------------------------

Outcome criterion_mad_trend(const FullRun& run) {
    Outcome out;
    if (!run.ok) {
        out.detail = run.error;
        return out;
    }
    const auto rows = read_csv(run.dir / "mad_table.csv");
    // rows: header, then k=1..3 with columns k,alpha,beta,w
    std::array<std::array<double, 3>, 3> mad{};
    for (int k = 0; k < 3; ++k) {
        for (int c = 0; c < 3; ++c) mad[k][c] = std::stod(rows[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(c) + 1]);
    }
    bool trend = true;
    for (int c = 0; c < 3; ++c) trend = trend && mad[0][c] > mad[1][c] && mad[1][c] > mad[2][c];
    const std::array<std::array<double, 3>, 3> target = {{{0.377, 0.431, 0.360}, {0.223, 0.223, 0.192}, {0.128, 0.114, 0.103}}};
    int soft_misses = 0;
    for (int k = 0; k < 3; ++k) {
        for (int c = 0; c < 3; ++c) {
            if (std::abs(mad[k][c] - target[k][c]) > 0.1) ++soft_misses;
        }
    }
    std::string cells;
    for (int k = 0; k < 3; ++k) {
        cells += " k=" + std::to_string(k + 1) + ":(" + fmt(mad[k][0]) + "," + fmt(mad[k][1]) + "," +
                 fmt(mad[k][2]) + ")";
    }
    out.pass = trend;
    out.detail = "monotone decrease in k (hard): " + std::string(trend ? "ok" : "VIOLATED") + ";" + cells +
                 "; soft cell misses vs targets at +-0.1: " + std::to_string(soft_misses) + "/9";
    return out;
}

// ---- criterion 7: sampler calibration ------------------------------------

Outcome criterion_sampler_calibration() {
    const auto t0 = std::chrono::steady_clock::now();
    SplitMix64 rng(2024);
    const RbmParams p = testsupport::random_params(rng, 4, 2, 0.5);
    const double log_z = log_partition(p);
    std::array<double, 16> prob{};
    VisibleState x(4);
    for (int t = 0; t < 16; ++t) {
        for (int i = 0; i < 4; ++i) x[i] = (t >> i) & 1 ? Spin{1} : Spin{-1};
        prob[static_cast<std::size_t>(t)] = std::exp(-marginal_energy(p, x) - log_z);
    }
    auto histogram = [&](const Dataset& d) {
        std::array<std::int64_t, 16> h{};
        for (int mu = 0; mu < d.num_rows; ++mu) {
            auto r = d.row(mu);
            int t = 0;
            for (int i = 0; i < 4; ++i) t |= (r[i] > 0) << i;
            ++h[static_cast<std::size_t>(t)];
        }
        return h;
    };
    auto chi2_of = [&](const std::array<std::int64_t, 16>& h, double total) {
        double stat = 0.0;
        for (int t = 0; t < 16; ++t) {
            const double expect = total * prob[static_cast<std::size_t>(t)];
            const double diff = h[static_cast<std::size_t>(t)] - expect;
            stat += diff * diff / expect;
        }
        return stat;
    };

    SamplerConfig cfg;
    cfg.seed = 515151;
    cfg.burn_in = 1000;
    cfg.thinning = 10;
    cfg.num_samples = 1000000;
    const Dataset mcmc = generate_dataset(p, cfg);
    const double p_mcmc = chi_squared_pvalue(chi2_of(histogram(mcmc), 1e6), 15);

    const Dataset exact = generate_dataset_exact(p, 100000, 626262);
    const double p_exact = chi_squared_pvalue(chi2_of(histogram(exact), 1e5), 15);

    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Outcome out;
    out.pass = p_mcmc > 0.001 && p_exact > 0.01;
    out.detail = "chi-square p: MCMC 1e6 samples = " + fmt(p_mcmc) + " (need > 0.001), exact 1e5 = " +
                 fmt(p_exact) + " (need > 0.01), " + fmt(sec) + " s";
    return out;
}

// ---- criterion 8: byte-level determinism of the harness ------------------

Outcome criterion_determinism(const std::string& cli, const fs::path& tmp) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string common =
        " reproduce --n 4 --m-learner 3 --m-generator 5 --num-samples 20 --iterations 300"
        " --trials 6 --record-every 50 --burn-in 300 --thinning 5 --master-seed 77";
    const std::array<std::pair<const char*, const char*>, 3> runs = {
        {{"det1", " --jobs 1"}, {"det2", " --jobs 2"}, {"det3", " --jobs 2"}}};
    for (const auto& [name, jobs] : runs) {
        const fs::path dir = tmp / name;
        const std::string cmd = cli + common + jobs + " --out-dir " + dir.string() + " > " +
                                (tmp / (std::string(name) + ".log")).string() + " 2>&1";
        const int rc = run_command(cmd);
        if (rc != 0) return {false, std::string("run ") + name + " exited with code " + std::to_string(rc)};
    }
    bool identical = true;
    std::string diffs;
    for (const char* file : {"cl_curves.csv", "ll_curves.csv", "mad_table.csv", "final_ll.csv"}) {
        const std::string a = read_file(tmp / "det1" / file);
        const std::string b = read_file(tmp / "det2" / file);
        const std::string c = read_file(tmp / "det3" / file);
        if (a.empty() || a != b || a != c) {
            identical = false;
            diffs += std::string(" ") + file;
        }
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Outcome out;
    out.pass = identical;
    out.detail = identical ? "three runs (jobs 1/2/2) byte-identical across all four CSVs, " + fmt(sec) + " s"
                           : "differences in:" + diffs;
    return out;
}

} // namespace

int main(int argc, char** argv) {
    std::string cli;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
    }
    if (cli.empty() || !fs::exists(cli)) {
        std::cerr << "usage: clrbm_acceptance --cli <path-to-clrbm-binary>\n";
        return 2;
    }
    const fs::path tmp = fs::temp_directory_path() / "clrbm_acceptance";
    fs::remove_all(tmp);
    fs::create_directories(tmp);

    const std::vector<Instance> instances = make_instances(1415926, 220, 2, 6, 1, 4, 2.0, 1, 10);

    std::vector<std::pair<std::string, Outcome>> results;
    results.emplace_back("composite objectives bound the true log-likelihood", criterion_upper_bound(instances));
    results.emplace_back("objectives decrease monotonically in the block order", criterion_monotone_chain(instances));
    results.emplace_back("gradient correctness", criterion_gradients());
    results.emplace_back("reduction identities", criterion_reductions(instances));

    const auto t_full = std::chrono::steady_clock::now();
    const FullRun full = run_full_experiment(cli, tmp);
    const double full_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_full).count();
    results.emplace_back("experiment reproduction", criterion_experiment_values(full, full_sec));
    results.emplace_back("parameter-deviation trend", criterion_mad_trend(full));
    results.emplace_back("sampler calibration", criterion_sampler_calibration());
    results.emplace_back("harness determinism", criterion_determinism(cli, tmp));

    int failed = 0;
    for (std::size_t t = 0; t < results.size(); ++t) {
        const auto& [name, out] = results[t];
        if (!out.pass) ++failed;
        std::cout << "criterion " << t + 1 << " " << (out.pass ? "PASS" : "FAIL") << " [" << name
                  << "]: " << out.detail << "\n";
    }
    std::cout << "acceptance: " << results.size() - static_cast<std::size_t>(failed) << "/" << results.size()
              << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
