// Command-line front end: every experiment is a subcommand that writes its
// outputs plus a manifest sufficient to reproduce the run bit-identically.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <numbers>

#include "dualgrid/baselines.hpp"
#include "dualgrid/controller.hpp"
#include "dualgrid/io.hpp"
#include "dualgrid/metrics.hpp"
#include "dualgrid/phantom.hpp"
#include "dualgrid/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace dualgrid;

namespace {

constexpr const char* kToolVersion = "dualgrid 1.0.0";
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

class Manifest {
public:
    Manifest(std::string command, const std::vector<std::string>& argv) {
        j_["tool_version"] = kToolVersion;
        j_["command"] = std::move(command);
        j_["argv"] = argv;
    }
    void input(const fs::path& p) {
        char buf[20];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(hash_file(p)));
        j_["inputs"][p.string()] = buf;
    }
    void output(const fs::path& p) { j_["outputs"].push_back(p.string()); }
    void timing(const std::string& phase, double seconds) { j_["timings_s"][phase] = seconds; }
    void note(const std::string& key, const json& v) { j_[key] = v; }
    void write(const fs::path& dir) const {
        std::ofstream os(dir / "manifest.json");
        os << j_.dump(2) << "\n";
    }

private:
    json j_;
};

ImageFormat parse_format(const std::string& s) {
    if (s == "pgm16") return ImageFormat::pgm16;
    return ImageFormat::png;
}

std::string image_ext(const std::string& fmt) { return fmt == "pgm16" ? ".pgm" : ".png"; }

Regularizer parse_reg(const std::string& s) {
    return s == "tikhonov" ? Regularizer::tikhonov : Regularizer::tv;
}

// "lo:hi:count" -> count log-spaced values.
std::vector<double> parse_alpha_range(const std::string& spec) {
    double lo, hi;
    int count;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || !(lo > 0.0) ||
        !(hi > lo) || count < 2)
        throw CLI::ValidationError("--alphas", "expected lo:hi:count with 0 < lo < hi, count >= 2");
    std::vector<double> alphas(count);
    for (int i = 0; i < count; ++i)
        alphas[i] = std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * i /
                                                        (count - 1));
    return alphas;
}

int default_grid_size(const Sinogram& sino) {
    return static_cast<int>(std::lround(sino.n_bins / std::numbers::sqrt2));
}

ProjectionOperator operator_for(const Sinogram& sino, int size, double pixel_size) {
    ProjectionGeometry geom;
    geom.angles = sino.angles;
    geom.n_bins = sino.n_bins;
    geom.bin_spacing = sino.bin_spacing;
    geom.angle_offset = 0.0;
    return make_operator(geom, size, pixel_size);
}

struct SinoArgs {
    std::string input;
    int size = 0;           // 0: derive from n_bins
    double pixel_size = 0;  // 0: 2/size (object inscribed in the unit disk)

    Sinogram load(Manifest& man) const {
        Sinogram s = load_sinogram(input);
        man.input(input);
        return s;
    }
    ProjectionOperator op(const Sinogram& sino) const {
        const int n = size > 0 ? size : default_grid_size(sino);
        const double px = pixel_size > 0 ? pixel_size : 2.0 / n;
        return operator_for(sino, n, px);
    }
};

void add_sino_args(CLI::App* cmd, SinoArgs& a) {
    cmd->add_option("--input", a.input, "sinogram file (.dxsg)")->required();
    cmd->add_option("--size", a.size, "reconstruction grid side (default: n_bins / sqrt(2))");
    cmd->add_option("--pixel-size", a.pixel_size, "physical pixel size (default: 2 / size)");
}

std::vector<std::vector<std::string>> trajectory_rows(const std::vector<ControllerEntry>& traj) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : traj)
        rows.push_back({std::to_string(e.step), format_g17(e.alpha), format_g17(e.s_value),
                        format_g17(e.error), e.in_band ? "1" : "0"});
    return rows;
}

int cmd_simulate(const std::vector<std::string>& argv, CLI::App* cmd, const std::string& phantom,
                 int size, int views, int bins, double noise, uint64_t seed,
                 const std::string& out_dir, const std::string& fmt) {
    (void)cmd;
    Manifest man("simulate", argv);
    Timer t;
    fs::create_directories(out_dir);

    ImageGrid truth = phantom == "blobs" ? smooth_blobs(size) : shepp_logan(size);
    const int n_bins = bins > 0 ? bins : static_cast<int>(std::ceil(std::numbers::sqrt2 * size));
    const double px = 2.0 / size;
    auto geom = make_parallel_geometry(views, n_bins, px, 0.0);
    auto op = make_operator(geom, size, px);
    Sinogram clean = forward_project(op, truth);
    NoisySinogram noisy = add_noise(clean, NoiseSpec{noise, seed});
    man.timing("simulate", t.elapsed());

    const fs::path dir(out_dir);
    save_sinogram(noisy.sino, dir / "sino.dxsg");
    save_image(truth, dir / ("truth" + image_ext(fmt)), parse_format(fmt));
    man.output(dir / "sino.dxsg");
    man.output(dir / ("truth" + image_ext(fmt)));
    man.note("sigma_abs", noisy.sigma_abs);
    man.note("grid_size", size);
    man.write(dir);
    std::cout << "wrote " << (dir / "sino.dxsg").string() << " (sigma_abs=" << noisy.sigma_abs
              << ")\n";
    return kExitOk;
}

int cmd_control(const std::vector<std::string>& argv, const SinoArgs& sino_args,
                const std::string& reg, const ControllerConfig& ccfg, const std::string& out_dir,
                const std::string& fmt) {
    Manifest man("control", argv);
    Timer t;
    fs::create_directories(out_dir);

    Sinogram sino = sino_args.load(man);
    ProjectionOperator op = sino_args.op(sino);
    SolverConfig scfg;
    scfg.regularizer = parse_reg(reg);

    ControlResult res = run_control_loop(sino, op, ccfg, scfg);
    man.timing("control_loop", t.elapsed());

    const fs::path dir(out_dir);
    save_image(res.reconstruction.image, dir / ("recon" + image_ext(fmt)), parse_format(fmt));
    save_csv(dir / "trajectory.csv", {"step", "alpha", "ssim", "error", "in_band"},
             trajectory_rows(res.trajectory));
    man.output(dir / ("recon" + image_ext(fmt)));
    man.output(dir / "trajectory.csv");
    man.note("converged", res.converged);
    man.note("final_alpha", res.final_alpha);
    man.note("final_ssim", res.final_s);
    man.note("theta_rad", res.theta);
    man.note("steps_used", res.steps_used);
    man.write(dir);

    std::cout << (res.converged ? "converged" : "NOT converged") << " in " << res.steps_used
              << " steps: alpha=" << res.final_alpha << " S=" << res.final_s << "\n";
    return res.converged ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const std::vector<std::string>& argv, const SinoArgs& sino_args,
              const std::string& reg, const std::string& alphas_spec, double theta_deg,
              uint64_t seed, const std::string& out_dir) {
    Manifest man("sweep", argv);
    Timer t;
    fs::create_directories(out_dir);

    Sinogram sino = sino_args.load(man);
    ProjectionOperator op = sino_args.op(sino);
    SolverConfig scfg;
    scfg.regularizer = parse_reg(reg);
    std::vector<double> alphas = parse_alpha_range(alphas_spec);

    double theta = theta_deg * std::numbers::pi / 180.0;
    if (theta_deg <= 0.0) {
        Rng rng(seed);
        theta = rng.uniform(10.0, 20.0) * std::numbers::pi / 180.0;
    }

    auto records = sweep(sino, op, theta, alphas, scfg);
    man.timing("sweep", t.elapsed());

    std::vector<std::vector<std::string>> rows;
    for (const auto& r : records)
        rows.push_back({format_g17(r.alpha), format_g17(r.s_value), format_g17(r.residual_norm),
                        format_g17(r.reg_value), format_g17(r.detail)});
    const fs::path dir(out_dir);
    save_csv(dir / "sweep.csv", {"alpha", "ssim", "residual_norm", "reg_value", "gradient_energy"},
             rows);
    man.output(dir / "sweep.csv");
    man.note("theta_rad", theta);
    man.write(dir);
    std::cout << "wrote " << (dir / "sweep.csv").string() << "\n";
    return kExitOk;
}

int cmd_compare(const std::vector<std::string>& argv, const SinoArgs& sino_args,
                const std::string& reg, double sigma, double tau, const ControllerConfig& ccfg,
                const std::string& alphas_spec, const std::string& out_dir,
                const std::string& fmt) {
    Manifest man("compare", argv);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    Sinogram sino = sino_args.load(man);
    ProjectionOperator op = sino_args.op(sino);
    SolverConfig scfg;
    scfg.regularizer = parse_reg(reg);
    scfg.op_norm = estimate_operator_norm(op, 30, ccfg.seed + 1);
    std::vector<double> alphas = parse_alpha_range(alphas_spec);

    std::vector<std::vector<std::string>> rows;

    Timer t_ctrl;
    ControlResult ctrl = run_control_loop(sino, op, ccfg, scfg);
    man.timing("controller", t_ctrl.elapsed());
    const double theta = ctrl.theta;
    rows.push_back({"controller", format_g17(ctrl.final_alpha), format_g17(ctrl.final_s),
                    format_g17(gradient_energy(ctrl.reconstruction.image)), "false",
                    ctrl.converged ? "ok" : "not_converged"});
    save_image(ctrl.reconstruction.image, dir / ("recon_controller" + image_ext(fmt)),
               parse_format(fmt));
    man.output(dir / ("recon_controller" + image_ext(fmt)));

    Timer t_lc;
    auto records = sweep(sino, op, theta, alphas, scfg);
    LcurveResult lc = lcurve_select(records);
    man.timing("lcurve", t_lc.elapsed());
    const FovMask mask = make_fov_mask(op.image_size, op.image_size, ccfg.fov_radius_fraction);
    {
        Reconstruction r = solve(sino, op, lc.alpha, scfg);
        auto reading = measure_consistency(sino, op, with_angle_offset(op, theta), theta, lc.alpha,
                                           scfg, mask);
        rows.push_back({"lcurve", format_g17(lc.alpha), format_g17(reading.s_value),
                        format_g17(gradient_energy(r.image)), "false",
                        lc.degenerate ? "degenerate_corner" : "ok"});
        save_image(r.image, dir / ("recon_lcurve" + image_ext(fmt)), parse_format(fmt));
        man.output(dir / ("recon_lcurve" + image_ext(fmt)));
    }

    Timer t_disc;
    if (sigma > 0.0) {
        try {
            DiscrepancyResult disc = discrepancy_select(sino, op, sigma, tau, scfg,
                                                        alphas.front(), alphas.back());
            Reconstruction r = solve(sino, op, disc.alpha, scfg);
            auto reading = measure_consistency(sino, op, with_angle_offset(op, theta), theta,
                                               disc.alpha, scfg, mask);
            rows.push_back({"discrepancy", format_g17(disc.alpha), format_g17(reading.s_value),
                            format_g17(gradient_energy(r.image)), "true", "ok"});
            save_image(r.image, dir / ("recon_discrepancy" + image_ext(fmt)), parse_format(fmt));
            man.output(dir / ("recon_discrepancy" + image_ext(fmt)));
        } catch (const std::runtime_error& e) {
            rows.push_back({"discrepancy", "nan", "nan", "nan", "true", "bracket_failure"});
            std::cerr << "discrepancy baseline: " << e.what() << "\n";
        }
    } else {
        rows.push_back({"discrepancy", "nan", "nan", "nan", "true", "bracket_failure"});
        std::cerr << "discrepancy baseline: sigma = 0, target residual unreachable\n";
    }
    man.timing("discrepancy", t_disc.elapsed());

    save_csv(dir / "compare.csv", {"method", "alpha", "ssim", "gradient_energy", "oracle", "status"},
             rows);
    man.output(dir / "compare.csv");
    man.note("theta_rad", theta);
    man.write(dir);
    std::cout << "wrote " << (dir / "compare.csv").string() << "\n";
    return kExitOk;
}

int cmd_reconstruct(const std::vector<std::string>& argv, const SinoArgs& sino_args,
                    const std::string& reg, double alpha, const std::string& out_dir,
                    const std::string& fmt) {
    Manifest man("reconstruct", argv);
    Timer t;
    fs::create_directories(out_dir);

    Sinogram sino = sino_args.load(man);
    ProjectionOperator op = sino_args.op(sino);
    SolverConfig scfg;
    scfg.regularizer = parse_reg(reg);
    Reconstruction rec = solve(sino, op, alpha, scfg);
    man.timing("solve", t.elapsed());

    const fs::path dir(out_dir);
    save_image(rec.image, dir / ("recon" + image_ext(fmt)), parse_format(fmt));
    man.output(dir / ("recon" + image_ext(fmt)));
    man.note("alpha", alpha);
    man.note("objective", rec.objective);
    man.note("iters_used", rec.iters_used);
    man.note("converged", rec.converged);
    man.write(dir);
    std::cout << "wrote recon (objective=" << rec.objective << ", iters=" << rec.iters_used
              << ")\n";
    return kExitOk;
}

int run(const std::vector<std::string>& argv);

int cmd_rerun(const std::string& manifest_path, const std::string& out_dir) {
    std::ifstream is(manifest_path);
    if (!is) {
        std::cerr << "rerun: cannot open " << manifest_path << "\n";
        return kExitUsage;
    }
    json j = json::parse(is);
    std::vector<std::string> argv = j["argv"].get<std::vector<std::string>>();
    if (!out_dir.empty()) {
        for (size_t i = 0; i + 1 < argv.size(); ++i)
            if (argv[i] == "-o" || argv[i] == "--out") argv[i + 1] = out_dir;
    }
    return run(argv);
}

int run(const std::vector<std::string>& argv) {
    CLI::App app{"Parallel-beam CT reconstruction with feedback-controlled regularization"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "phantom -> forward project -> noise -> sinogram");
    std::string phantom = "shepp-logan";
    int size = 128, views = 180, bins = 0;
    double noise = 0.0;
    uint64_t seed = 0;
    std::string out_dir = "out";
    std::string fmt = "png";
    sim->add_option("--phantom", phantom, "shepp-logan | blobs")
        ->check(CLI::IsMember({"shepp-logan", "blobs"}));
    sim->add_option("--size", size, "grid side in pixels")->required()->check(CLI::Range(16, 4096));
    sim->add_option("--views", views, "number of projection angles")->check(CLI::PositiveNumber);
    sim->add_option("--bins", bins, "detector bins (default: ceil(sqrt(2)*size))");
    sim->add_option("--noise", noise, "Gaussian noise std as fraction of max sinogram value")
        ->check(CLI::NonNegativeNumber);
    sim->add_option("--seed", seed, "noise seed");
    sim->add_option("-o,--out", out_dir, "output directory")->required();
    sim->add_option("--format", fmt, "image format")->check(CLI::IsMember({"png", "pgm16"}));

    // shared solver/sino flags
    SinoArgs sa_control, sa_sweep, sa_compare, sa_recon;
    std::string reg = "tv";

    // control
    auto* ctl = app.add_subcommand("control", "closed-loop alpha selection");
    ControllerConfig ccfg;
    add_sino_args(ctl, sa_control);
    ctl->add_option("--reg", reg, "tv | tikhonov")->check(CLI::IsMember({"tv", "tikhonov"}));
    ctl->add_option("--sref", ccfg.s_ref, "target consistency in (0,1)")
        ->check(CLI::Range(1e-9, 0.999999));
    ctl->add_option("--kp", ccfg.k_p, "proportional gain (log10 alpha domain)");
    ctl->add_option("--eps", ccfg.epsilon, "tolerance band half-width");
    ctl->add_option("--n", ccfg.n_consecutive, "consecutive in-band steps to converge");
    ctl->add_option("--alpha-init", ccfg.alpha_init, "initial alpha");
    ctl->add_option("--alpha-min", ccfg.alpha_min, "lower clamp");
    ctl->add_option("--alpha-max", ccfg.alpha_max, "upper clamp");
    ctl->add_option("--theta-min", ccfg.theta_lo_deg, "rotation draw lower bound (deg)");
    ctl->add_option("--theta-max", ccfg.theta_hi_deg, "rotation draw upper bound (deg)");
    ctl->add_option("--max-steps", ccfg.max_steps, "control step cap");
    ctl->add_option("--seed", ccfg.seed, "theta draw seed");
    std::string ctl_out = "out";
    std::string ctl_fmt = "png";
    ctl->add_option("-o,--out", ctl_out, "output directory");
    ctl->add_option("--format", ctl_fmt, "image format")->check(CLI::IsMember({"png", "pgm16"}));

    // sweep
    auto* swp = app.add_subcommand("sweep", "record the S(alpha) curve");
    std::string swp_reg = "tv", alphas_spec = "1e-8:1e-2:20", swp_out = "out";
    double theta_deg = 0.0;
    uint64_t swp_seed = 0;
    add_sino_args(swp, sa_sweep);
    swp->add_option("--reg", swp_reg, "tv | tikhonov")->check(CLI::IsMember({"tv", "tikhonov"}));
    swp->add_option("--alphas", alphas_spec, "lo:hi:count log-spaced alpha grid");
    swp->add_option("--theta-deg", theta_deg, "fixed rotation angle (deg); 0 draws from seed");
    swp->add_option("--seed", swp_seed, "theta draw seed");
    swp->add_option("-o,--out", swp_out, "output directory");

    // compare
    auto* cmp = app.add_subcommand("compare", "controller vs L-curve vs discrepancy principle");
    std::string cmp_reg = "tv", cmp_alphas = "1e-8:1e-2:20", cmp_out = "out", cmp_fmt = "png";
    double sigma = 0.0, tau = 1.01;
    ControllerConfig cmp_ccfg;
    add_sino_args(cmp, sa_compare);
    cmp->add_option("--reg", cmp_reg, "tv | tikhonov")->check(CLI::IsMember({"tv", "tikhonov"}));
    cmp->add_option("--sigma", sigma, "per-sample noise std (oracle input)")
        ->check(CLI::NonNegativeNumber);
    cmp->add_option("--tau", tau, "discrepancy safety factor");
    cmp->add_option("--sref", cmp_ccfg.s_ref, "controller target")->check(CLI::Range(1e-9, 0.999999));
    cmp->add_option("--seed", cmp_ccfg.seed, "theta draw seed");
    cmp->add_option("--alphas", cmp_alphas, "lo:hi:count grid for the L-curve search");
    cmp->add_option("--max-steps", cmp_ccfg.max_steps, "controller step cap");
    cmp->add_option("-o,--out", cmp_out, "output directory");
    cmp->add_option("--format", cmp_fmt, "image format")->check(CLI::IsMember({"png", "pgm16"}));

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "single fixed-alpha solve");
    std::string rec_reg = "tv", rec_out = "out", rec_fmt = "png";
    double rec_alpha = 0.0;
    add_sino_args(rec, sa_recon);
    rec->add_option("--reg", rec_reg, "tv | tikhonov")->check(CLI::IsMember({"tv", "tikhonov"}));
    rec->add_option("--alpha", rec_alpha, "regularization weight")->required()
        ->check(CLI::PositiveNumber);
    rec->add_option("-o,--out", rec_out, "output directory");
    rec->add_option("--format", rec_fmt, "image format")->check(CLI::IsMember({"png", "pgm16"}));

    // rerun
    auto* rr = app.add_subcommand("rerun", "re-execute a run from its manifest");
    std::string rr_manifest, rr_out;
    rr->add_option("--manifest", rr_manifest, "manifest.json of a previous run")->required();
    rr->add_option("-o,--out", rr_out, "override output directory");

    std::vector<std::string> cli_args(argv.begin() + 1, argv.end());
    std::reverse(cli_args.begin(), cli_args.end());  // CLI11 wants reversed args
    try {
        app.parse(cli_args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(argv, sim, phantom, size, views, bins, noise, seed, out_dir, fmt);
        if (ctl->parsed()) {
            SolverConfig dummy;
            (void)dummy;
            return cmd_control(argv, sa_control, reg, ccfg, ctl_out, ctl_fmt);
        }
        if (swp->parsed())
            return cmd_sweep(argv, sa_sweep, swp_reg, alphas_spec, theta_deg, swp_seed, swp_out);
        if (cmp->parsed())
            return cmd_compare(argv, sa_compare, cmp_reg, sigma, tau, cmp_ccfg, cmp_alphas,
                               cmp_out, cmp_fmt);
        if (rec->parsed())
            return cmd_reconstruct(argv, sa_recon, rec_reg, rec_alpha, rec_out, rec_fmt);
        if (rr->parsed()) return cmd_rerun(rr_manifest, rr_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run(args);
}
