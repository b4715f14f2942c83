#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "eusn/cli.hpp"
#include "eusn/errors.hpp"

namespace {

using namespace eusn;
using namespace eusn::cli;

std::vector<std::size_t> parse_tau_list(const std::string& spec) {
    std::vector<std::size_t> out;
    for (double v : parse_list(spec)) {
        if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
            throw ConfigError("tau-p values must be integers >= 1");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

void report(const RunManifest& m) {
    std::cout << m.command << ": wrote " << m.outputs.size() << " files in " << m.seconds << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Euler State Network toolkit"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // ltm
    LtmOptions ltm;
    std::string ltm_tau;
    std::vector<std::string> ltm_variants;
    auto* ltm_cmd = app.add_subcommand("ltm", "long-term memorization accuracy curve");
    ltm_cmd->add_option("--tau-p", ltm_tau, "padding lengths, comma separated");
    ltm_cmd->add_option("--budget", ltm.budget, "random-search trials per variant")->capture_default_str();
    ltm_cmd->add_option("--seed", ltm.seed, "master seed")->capture_default_str();
    ltm_cmd->add_option("--out", ltm.out, "output directory")->capture_default_str();
    ltm_cmd->add_option("--variant", ltm_variants, "eusn, esn or ring (repeatable; default all)");
    ltm_cmd->add_option("--series", ltm.n_series, "series per dataset")->capture_default_str();
    ltm_cmd->add_option("--guesses", ltm.guesses, "final-evaluation instances")->capture_default_str();
    ltm_cmd->add_option("--threads", ltm.threads, "worker threads (0 = hardware)");

    // heatmap
    HeatmapOptions heat;
    std::string heat_quantity = "rho", heat_eps, heat_gamma, heat_omega;
    auto* heat_cmd = app.add_subcommand("heatmap", "effective spectral radius or MLLE over a grid");
    heat_cmd->add_option("--quantity", heat_quantity, "rho or mlle")
        ->check(CLI::IsMember({"rho", "mlle"}))
        ->capture_default_str();
    heat_cmd->add_option("--eps-grid", heat_eps, "lo:hi:n (log spaced)");
    heat_cmd->add_option("--gamma-grid", heat_gamma, "lo:hi:n (log spaced)");
    heat_cmd->add_option("--omega-r", heat_omega, "recurrent scales, comma separated");
    heat_cmd->add_option("--reps", heat.repetitions, "repetitions per cell")->capture_default_str();
    heat_cmd->add_option("--units", heat.n_units, "reservoir size")->capture_default_str();
    heat_cmd->add_option("--seed", heat.seed, "master seed")->capture_default_str();
    heat_cmd->add_option("--out", heat.out, "output directory")->capture_default_str();
    heat_cmd->add_option("--threads", heat.threads, "worker threads (0 = hardware)");

    // trajectory
    TrajectoryOptions traj;
    std::string traj_variant = "eusn", traj_matrix;
    std::vector<std::string> traj_init;
    auto* traj_cmd = app.add_subcommand("trajectory", "autonomous state trajectories");
    traj_cmd->add_flag("--fig1", traj.fig1, "run the four preset 2-D systems from three starts");
    traj_cmd->add_option("--variant", traj_variant, "eusn, esn or ring")->capture_default_str();
    traj_cmd->add_option("--matrix", traj_matrix, "recurrent matrix, rows ';' entries ','");
    traj_cmd->add_option("--init", traj_init, "initial state, comma separated (repeatable)");
    traj_cmd->add_option("--units", traj.n_units, "reservoir size when drawn from --seed")->capture_default_str();
    traj_cmd->add_option("--steps", traj.steps, "steps per trajectory")->capture_default_str();
    traj_cmd->add_option("--seed", traj.seed, "seed for a drawn reservoir")->capture_default_str();
    traj_cmd->add_option("--epsilon", traj.epsilon, "EuSN step size")->capture_default_str();
    traj_cmd->add_option("--gamma", traj.gamma, "EuSN diffusion")->capture_default_str();
    traj_cmd->add_option("--leak", traj.leak, "ESN leaking rate")->capture_default_str();
    traj_cmd->add_option("--rho", traj.rho, "ESN spectral radius")->capture_default_str();
    traj_cmd->add_option("--omega-r", traj.omega_r, "EuSN recurrent scale")->capture_default_str();
    traj_cmd->add_option("--out", traj.out, "output directory")->capture_default_str();

    // classify
    ClassifyOptions cls;
    std::string cls_variant = "eusn";
    auto* cls_cmd = app.add_subcommand("classify", "model selection and evaluation on tsc-v1 files");
    cls_cmd->add_option("--train", cls.train, "training file")->required();
    cls_cmd->add_option("--test", cls.test, "test file")->required();
    cls_cmd->add_option("--variant", cls_variant, "eusn, esn or ring")->capture_default_str();
    cls_cmd->add_option("--budget", cls.budget, "random-search trials")->capture_default_str();
    cls_cmd->add_option("--seed", cls.seed, "master seed")->capture_default_str();
    cls_cmd->add_option("--guesses", cls.guesses, "final-evaluation instances")->capture_default_str();
    cls_cmd->add_option("--out", cls.out, "output directory")->capture_default_str();
    cls_cmd->add_option("--threads", cls.threads, "worker threads (0 = hardware)");

    // replay
    std::string replay_manifest, replay_out;
    auto* replay_cmd = app.add_subcommand("replay", "re-run a command from its manifest.json");
    replay_cmd->add_option("manifest", replay_manifest, "manifest path")->required();
    replay_cmd->add_option("--out", replay_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ltm_cmd) {
            if (!ltm_tau.empty()) ltm.tau_p = parse_tau_list(ltm_tau);
            if (!ltm_variants.empty()) {
                ltm.variants.clear();
                for (const auto& v : ltm_variants) ltm.variants.push_back(parse_variant(v));
            }
            report(run_ltm(ltm));
        } else if (*heat_cmd) {
            heat.quantity = heat_quantity == "mlle" ? HeatmapQuantity::MLLE : HeatmapQuantity::EffectiveSpectralRadius;
            if (!heat_eps.empty()) heat.epsilon_grid = parse_grid(heat_eps);
            if (!heat_gamma.empty()) heat.gamma_grid = parse_grid(heat_gamma);
            if (!heat_omega.empty()) heat.omega_r_values = parse_list(heat_omega);
            report(run_heatmap(heat));
        } else if (*traj_cmd) {
            traj.variant = parse_variant(traj_variant);
            if (!traj_matrix.empty()) traj.matrix = parse_matrix(traj_matrix);
            if (!traj_init.empty()) {
                traj.initial.clear();
                for (const auto& s : traj_init) traj.initial.push_back(parse_list(s));
            }
            report(run_trajectory(traj));
        } else if (*cls_cmd) {
            cls.variant = parse_variant(cls_variant);
            report(run_classify(cls));
        } else if (*replay_cmd) {
            report(replay(replay_manifest, replay_out));
        }
    } catch (const std::exception& e) {
        std::cerr << "eusn: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
