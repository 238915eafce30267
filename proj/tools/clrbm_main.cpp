// Command-line front end: generate synthetic datasets, train a single
// model, or reproduce the full multi-trial experiment.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "clrbm/dataset.hpp"
#include "clrbm/experiment.hpp"
#include "clrbm/model.hpp"
#include "clrbm/sampler.hpp"
#include "clrbm/trainer.hpp"

namespace {

struct GenerateArgs {
    int n = 5;
    int m_generator = 17;
    int num_samples = 70;
    std::uint64_t seed = 1;
    bool exact = false;
    std::int64_t burn_in = 10000;
    std::int64_t thinning = 100;
    double gen_alpha = 0.1;
    double gen_beta = -0.1;
    double gen_weight = 0.2;
    std::string out = "dataset.csv";
};

struct TrainArgs {
    std::string data_path;
    int m_learner = 10;
    int k = 2;
    bool ml = false;
    double rate = 0.1;
    std::int64_t iterations = 50000;
    std::uint64_t init_seed = 1;
    double init_scale = 0.5;
    std::int64_t record_every = 100;
    int ll_cap = clrbm::kDefaultEnumCap;
    std::string out_dir = ".";
};

int run_generate(const GenerateArgs& a) {
    const clrbm::RbmParams generator =
        clrbm::uniform_rbm(a.n, a.m_generator, a.gen_alpha, a.gen_beta, a.gen_weight);
    clrbm::Dataset data;
    if (a.exact) {
        data = clrbm::generate_dataset_exact(generator, a.num_samples, a.seed);
    } else {
        clrbm::SamplerConfig cfg;
        cfg.seed = a.seed;
        cfg.burn_in = a.burn_in;
        cfg.thinning = a.thinning;
        cfg.num_samples = a.num_samples;
        data = clrbm::generate_dataset(generator, cfg);
    }
    clrbm::save_dataset_csv(data, a.out);
    std::cout << "wrote " << data.num_rows << "x" << data.n << " dataset to " << a.out << "\n";
    return 0;
}

int run_train(const TrainArgs& a) {
    const clrbm::Dataset data = clrbm::load_dataset_csv(a.data_path);
    clrbm::TrainConfig cfg;
    cfg.k = a.ml ? clrbm::kMlOrder : a.k;
    cfg.learning_rate = a.rate;
    cfg.iterations = a.iterations;
    cfg.init_seed = a.init_seed;
    cfg.init_scale = a.init_scale;
    cfg.record_every = a.record_every;
    cfg.ll_cap = a.ll_cap;
    const clrbm::TrainTrace trace = clrbm::train(data, a.m_learner, cfg);

    std::filesystem::create_directories(a.out_dir);
    const auto dir = std::filesystem::path(a.out_dir);
    clrbm::write_trace_csv(trace, (dir / "trace.csv").string());
    clrbm::save_model(trace.final_params, (dir / "model.txt").string());
    std::cout << "final objective " << clrbm::format_double(trace.points.back().objective) << "; wrote "
              << (dir / "trace.csv").string() << " and " << (dir / "model.txt").string() << "\n";
    return 0;
}

int run_reproduce(const clrbm::ReproduceConfig& cfg, const std::string& out_dir) {
    const clrbm::ReproduceResult res = clrbm::run_reproduce(cfg);
    clrbm::write_reproduce_csvs(res, out_dir);
    std::cout << "mean final true log-likelihood:";
    for (std::size_t s = 0; s < clrbm::kMethodNames.size(); ++s) {
        std::cout << ' ' << clrbm::kMethodNames[s] << '=' << clrbm::format_double(res.mean_final_true_ll[s]);
    }
    std::cout << "\nwrote cl_curves.csv ll_curves.csv mad_table.csv final_ll.csv to " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-th-order composite likelihood estimation for binary +-1 RBMs"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI/TOML file (sections per subcommand)");

    GenerateArgs gen;
    CLI::App* cmd_gen = app.add_subcommand("generate", "sample a synthetic dataset from the generator RBM");
    cmd_gen->add_option("--n", gen.n, "visible units")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_gen->add_option("--m-generator", gen.m_generator, "generator hidden units")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_gen->add_option("--num-samples", gen.num_samples, "rows to sample")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_gen->add_option("--seed", gen.seed, "sampler seed")->capture_default_str();
    auto* flag_exact = cmd_gen->add_flag("--exact", gen.exact, "i.i.d. inverse-CDF sampling from the enumerated marginal");
    cmd_gen->add_flag("--mcmc", "single-chain block Gibbs sampling (default)")->excludes(flag_exact);
    cmd_gen->add_option("--burn-in", gen.burn_in, "discarded leading sweeps")->check(CLI::NonNegativeNumber)->capture_default_str();
    cmd_gen->add_option("--thinning", gen.thinning, "sweeps between kept samples")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_gen->add_option("--gen-alpha", gen.gen_alpha, "generator visible bias")->capture_default_str();
    cmd_gen->add_option("--gen-beta", gen.gen_beta, "generator hidden bias")->capture_default_str();
    cmd_gen->add_option("--gen-weight", gen.gen_weight, "generator connection weight")->capture_default_str();
    cmd_gen->add_option("--out", gen.out, "output CSV path")->capture_default_str();

    TrainArgs tr;
    CLI::App* cmd_tr = app.add_subcommand("train", "maximize a composite likelihood (or the exact log-likelihood) on a dataset");
    cmd_tr->add_option("--data", tr.data_path, "dataset CSV")->required()->check(CLI::ExistingFile);
    cmd_tr->add_option("--m-learner", tr.m_learner, "learner hidden units")->check(CLI::PositiveNumber)->capture_default_str();
    auto* opt_k = cmd_tr->add_option("--k", tr.k, "block order")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_tr->add_flag("--ml", tr.ml, "train against the exact log-likelihood")->excludes(opt_k);
    cmd_tr->add_option("--rate", tr.rate, "gradient ascent rate")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_tr->add_option("--iterations", tr.iterations, "update count")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_tr->add_option("--init-seed", tr.init_seed, "parameter init seed")->capture_default_str();
    cmd_tr->add_option("--init-scale", tr.init_scale, "uniform init half-width")->check(CLI::NonNegativeNumber)->capture_default_str();
    cmd_tr->add_option("--record-every", tr.record_every, "trace recording stride")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_tr->add_option("--ll-cap", tr.ll_cap, "max n for exact log-likelihood recording")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_tr->add_option("--out-dir", tr.out_dir, "directory for trace.csv and model.txt")->capture_default_str();

    clrbm::ReproduceConfig rep;
    std::string rep_out = "reproduce_out";
    CLI::App* cmd_rep = app.add_subcommand("reproduce", "run the full multi-trial experiment and emit figure/table CSVs");
    cmd_rep->add_option("--n", rep.n, "visible units")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_rep->add_option("--m-learner", rep.m_learner, "learner hidden units")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_rep->add_option("--m-generator", rep.m_generator, "generator hidden units")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_rep->add_option("--num-samples", rep.num_samples, "dataset rows per trial")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_rep->add_option("--rate", rep.learning_rate, "gradient ascent rate")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_rep->add_option("--iterations", rep.iterations, "updates per training run")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_rep->add_option("--trials", rep.trials, "number of trials")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_rep->add_option("--master-seed", rep.master_seed, "seed all per-trial streams derive from")->capture_default_str();
    auto* rep_exact = cmd_rep->add_flag("--exact", rep.exact_sampling, "exact i.i.d. dataset sampling");
    cmd_rep->add_flag("--mcmc", "MCMC dataset sampling (default)")->excludes(rep_exact);
    cmd_rep->add_option("--burn-in", rep.burn_in, "MCMC burn-in sweeps")->check(CLI::NonNegativeNumber)->capture_default_str();
    cmd_rep->add_option("--thinning", rep.thinning, "MCMC sweeps between kept samples")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_rep->add_option("--record-every", rep.record_every, "trace recording stride")->check(CLI::PositiveNumber)->capture_default_str();
    cmd_rep->add_option("--init-scale", rep.init_scale, "uniform init half-width")->check(CLI::NonNegativeNumber)->capture_default_str();
    cmd_rep->add_option("--gen-alpha", rep.gen_alpha, "generator visible bias")->capture_default_str();
    cmd_rep->add_option("--gen-beta", rep.gen_beta, "generator hidden bias")->capture_default_str();
    cmd_rep->add_option("--gen-weight", rep.gen_weight, "generator connection weight")->capture_default_str();
    cmd_rep->add_flag("--share-dataset", rep.share_dataset, "reuse trial 0's dataset for every trial");
    cmd_rep->add_option("--jobs", rep.jobs, "concurrent trials (0 = all cores)")->check(CLI::NonNegativeNumber)->capture_default_str();
    cmd_rep->add_option("--out-dir", rep_out, "output directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_gen->parsed()) return run_generate(gen);
        if (cmd_tr->parsed()) return run_train(tr);
        if (cmd_rep->parsed()) return run_reproduce(rep, rep_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
