// opk_cli.cpp - command-line front end
//
// Exit codes: 0 success, 2 parse error, 3 dimension mismatch,
// 4 mathematical precondition failure, 5 non-convergence under --strict.

#include "opk/dilation.hpp"
#include "opk/error.hpp"
#include "opk/gaussian.hpp"
#include "opk/io.hpp"
#include "opk/kernels.hpp"
#include "opk/numerics.hpp"
#include "opk/quantum.hpp"
#include "opk/tomography.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using opk::io::json;

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitDimension = 3;
constexpr int kExitMath = 4;
constexpr int kExitStrict = 5;

struct Options {
    double tol = opk::kDefaultTol;
    std::uint64_t seed = 0;
    std::size_t iters = 5000;
    std::optional<double> step;
    std::optional<double> lambda;
    bool strict = false;
    std::string out;
    std::string report;
    std::size_t samples = 0;
    std::string problem_out;
    std::vector<std::string> inputs;
};

json manifest(const std::string& command, const Options& o) {
    json tolerances = {
        {"tol", o.tol},
        {"jacobi_offdiag", opk::kJacobiOffDiagTol},
        {"jacobi_max_sweeps", opk::kJacobiMaxSweeps},
        {"kernel_symmetry", opk::OperatorKernel::kSymmetryTol},
        {"state", opk::kStateTol},
    };
    return {
        {"command", command},
        {"inputs", o.inputs},
        {"seed", o.seed},
        {"tolerances", std::move(tolerances)},
        {"output", o.out.empty() ? json(nullptr) : json(o.out)},
    };
}

void emit(const json& report, const std::string& path) {
    const std::string text = opk::io::dump(report);
    if (!path.empty()) opk::io::write_text(path, text);
    std::cout << text;
}

// A kernel file, or a POVM file expanded to its atom kernel.
opk::OperatorKernel load_kernel(const std::string& path) {
    const json j = opk::io::read_json(path);
    if (j.contains("effects")) return opk::povm_atom_kernel(opk::io::povm_from_json(j));
    return opk::io::kernel_from_json(j);
}

json completeness_json(const opk::CompletenessReport& c) {
    return {{"span_rank", c.span_rank},
            {"span_complete", c.span_complete},
            {"commutant_dim", c.commutant_dim},
            {"commutant_trivial", c.commutant_trivial}};
}

json matrices(const std::vector<opk::ComplexMatrix>& list) {
    json out = json::array();
    for (const auto& m : list) out.push_back(opk::io::to_json(m));
    return out;
}

int cmd_pd_check(const Options& o) {
    const opk::OperatorKernel k = load_kernel(o.inputs.at(0));
    const opk::PdReport r = opk::check_pd(k, o.tol);
    json report = {{"manifest", manifest("pd-check", o)}, {"is_pd", r.is_pd}, {"min_eigenvalue", r.min_eigenvalue}};
    emit(report, o.out);
    return kExitOk;
}

int cmd_factorize(const Options& o) {
    const opk::OperatorKernel k = load_kernel(o.inputs.at(0));
    const opk::KernelFactorization f = opk::factorize(k, o.tol);
    double onb_residual = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i)
        for (std::size_t j = 0; j < k.size(); ++j)
            onb_residual = std::max(onb_residual, (opk::reconstruct(f, i, j) - k.block(i, j)).norm());
    json report = {
        {"manifest", manifest("factorize", o)},
        {"dim", f.dim},
        {"labels", f.labels},
        {"rank", f.rank},
        {"blocks", matrices(f.blocks)},
        {"factorization_residual", opk::factorization_residual(f, k)},
        {"reconstruct_residual", onb_residual},
    };
    emit(report, o.out);
    return kExitOk;
}

int cmd_gp(const Options& o) {
    const opk::OperatorKernel k = load_kernel(o.inputs.at(0));
    const opk::GaussianSampler sampler{opk::factorize(k, o.tol), o.seed};
    const opk::SampleBatch batch = opk::sample(sampler, o.samples);
    if (!o.out.empty()) opk::io::write_text(o.out, opk::io::batch_to_csv(batch));

    json report = {{"manifest", manifest("gp", o)}, {"samples", batch.count}, {"rank", sampler.factorization.rank}};
    if (batch.count > 0) {
        double deviation = 0.0;
        json variances = json::array();
        for (std::size_t i = 0; i < k.size(); ++i) {
            const opk::ComplexMatrix cii = opk::empirical_covariance(batch, i, i);
            json diag = json::array();
            for (Eigen::Index a = 0; a < cii.rows(); ++a) diag.push_back(cii(a, a).real());
            variances.push_back(std::move(diag));
            for (std::size_t j = 0; j < k.size(); ++j) {
                const opk::ComplexMatrix diff = opk::empirical_covariance(batch, i, j) - k.block(i, j);
                deviation = std::max(deviation, diff.cwiseAbs().maxCoeff());
            }
        }
        report["variances"] = std::move(variances);
        report["max_covariance_deviation"] = deviation;
    }
    emit(report, o.report);
    return kExitOk;
}

int cmd_dilate(const Options& o) {
    const json input = opk::io::read_json(o.inputs.at(0));
    json report = {{"manifest", manifest("dilate", o)}};
    if (input.contains("kraus")) {
        const opk::CPMap phi = opk::io::cpmap_from_json(input);
        const opk::StinespringDilation s = opk::stinespring(phi, o.tol);
        const opk::DilationReport r = opk::verify_dilation(s, phi);
        report["kind"] = "stinespring";
        report["dilation_dim"] = s.dilation_dim;
        report["V"] = opk::io::to_json(s.embedding);
        report["pi_units"] = matrices(s.unit_images);
        report["residuals"] = {{"representation", r.representation},
                               {"multiplicativity", r.multiplicativity},
                               {"adjoint", r.adjoint},
                               {"isometry", r.isometry}};
    } else if (input.contains("effects")) {
        const opk::POVM q = opk::io::povm_from_json(input);
        const opk::NaimarkDilation n = opk::naimark(q, o.tol);
        const opk::DilationReport r = opk::verify_dilation(n, q);
        report["kind"] = "naimark";
        report["dilation_dim"] = n.dilation_dim;
        report["V"] = opk::io::to_json(n.embedding);
        report["projections"] = matrices(n.projections);
        report["residuals"] = {{"representation", r.representation},
                               {"orthogonality", r.multiplicativity},
                               {"self_adjoint", r.adjoint},
                               {"isometry", r.isometry},
                               {"completeness", r.completeness}};
    } else {
        throw opk::Error(opk::ErrorKind::Parse, "dilate: input has neither \"kraus\" nor \"effects\"");
    }
    emit(report, o.out);
    return kExitOk;
}

int cmd_complete(const Options& o) {
    const opk::OperatorKernel k = load_kernel(o.inputs.at(0));
    json report = completeness_json(opk::completeness(k, o.tol));
    report["manifest"] = manifest("complete", o);
    emit(report, o.out);
    return kExitOk;
}

int cmd_tomography(const Options& o) {
    const opk::TomographyProblem problem = opk::io::problem_from_json(opk::io::read_json(o.inputs.at(0)));
    const opk::PdReport pd = opk::check_pd(problem.kernel(), o.tol);
    if (!pd.is_pd)
        throw opk::Error(opk::ErrorKind::NotPSD,
                         "tomography: kernel fails the positive-definiteness preflight (min eigenvalue " +
                             std::to_string(pd.min_eigenvalue) + ")");
    const opk::CompletenessReport completeness = opk::completeness(problem.kernel(), o.tol);
    if (!completeness.span_complete)
        std::cerr << "warning: kernel is not informationally complete (span rank " << completeness.span_rank << " of "
                  << problem.dim() * problem.dim() << "); the recovered state need not be unique\n";
    const auto warnings = problem.consistency_warnings();
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

    opk::SolverConfig config;
    config.max_iters = o.iters;
    config.step = o.step;
    const opk::TomographyResult result = opk::solve_pgd(problem, config);

    json report = {
        {"manifest", manifest("tomography", o)},
        {"completeness", completeness_json(completeness)},
        {"warnings", warnings},
        {"rho_hat", opk::io::to_json(result.rho_hat)},
        {"objective", result.objective_trajectory.back()},
        {"objective_trajectory", result.objective_trajectory},
        {"iterations", result.iterations},
        {"converged", result.converged},
        {"final_gradient_norm", result.final_gradient_norm},
        {"step", result.step},
    };
    if (o.lambda) {
        const opk::RidgeBaseline ridge = opk::ridge_baseline(problem, *o.lambda, o.tol);
        json coefficients = json::array();
        for (Eigen::Index p = 0; p < ridge.solution.coefficients.size(); ++p)
            coefficients.push_back(opk::io::to_json(ridge.solution.coefficients(p)));
        report["ridge"] = {{"lambda", ridge.solution.lambda},
                           {"coefficients", std::move(coefficients)},
                           {"estimate", opk::io::to_json(ridge.estimate)},
                           {"relative_residual", ridge.solution.relative_residual}};
    }
    emit(report, o.out);
    if (o.strict && !result.converged) {
        std::cerr << "error: solver did not converge within " << o.iters << " iterations\n";
        return kExitStrict;
    }
    return kExitOk;
}

int cmd_simulate(const Options& o) {
    const opk::DensityMatrix rho = opk::io::state_from_json(opk::io::read_json(o.inputs.at(0)));
    const opk::POVM q = opk::io::povm_from_json(opk::io::read_json(o.inputs.at(1)));
    const opk::Frequencies f = opk::simulate_counts(rho, q, o.samples, o.seed);
    json report = {{"manifest", manifest("simulate", o)},
                   {"frequencies", f.values},
                   {"shots", f.shots},
                   {"empty", f.empty}};
    emit(report, o.out);

    if (!o.problem_out.empty()) {
        // atom kernel: diagonal pairs carry the frequencies, disjoint atoms give 0
        const opk::OperatorKernel k = opk::povm_atom_kernel(q);
        std::vector<opk::TomographyProblem::Pair> pairs;
        std::vector<opk::Complex> data;
        for (std::size_t i = 0; i < k.size(); ++i)
            for (std::size_t j = 0; j < k.size(); ++j) {
                pairs.emplace_back(i, j);
                data.emplace_back(i == j ? f.values[i] : 0.0);
            }
        const opk::TomographyProblem problem(k, std::move(pairs), std::move(data));
        opk::io::write_text(o.problem_out, opk::io::dump(opk::io::to_json(problem)));
    }
    return kExitOk;
}

int exit_code(opk::ErrorKind kind) {
    switch (kind) {
    case opk::ErrorKind::Parse: return kExitParse;
    case opk::ErrorKind::DimensionMismatch: return kExitDimension;
    default: return kExitMath;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Operator-valued kernels: factorization, dilation, Gaussian processes and tomography"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--tol", o.tol, "Relative rank/PSD tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--out", o.out, "Output file");
    };

    auto* pd = app.add_subcommand("pd-check", "Positive-definiteness check of a kernel");
    pd->add_option("kernel", o.inputs, "Kernel (or POVM) file")->required()->expected(1);
    add_common(pd);

    auto* fac = app.add_subcommand("factorize", "Factor K(s,t) = V_s* V_t");
    fac->add_option("kernel", o.inputs, "Kernel (or POVM) file")->required()->expected(1);
    add_common(fac);

    auto* gp = app.add_subcommand("gp", "Sample the Gaussian process of a kernel (CSV to --out)");
    gp->add_option("kernel", o.inputs, "Kernel (or POVM) file")->required()->expected(1);
    gp->add_option("-n,--samples", o.samples, "Number of joint draws")->required();
    gp->add_option("--seed", o.seed, "Generator seed");
    gp->add_option("--report", o.report, "Covariance report file");
    add_common(gp);

    auto* dil = app.add_subcommand("dilate", "Stinespring (CP map) or Naimark (POVM) dilation");
    dil->add_option("input", o.inputs, "CP map or POVM file")->required()->expected(1);
    add_common(dil);

    auto* comp = app.add_subcommand("complete", "Informational-completeness report");
    comp->add_option("kernel", o.inputs, "Kernel (or POVM) file")->required()->expected(1);
    add_common(comp);

    auto* tomo = app.add_subcommand("tomography", "Recover a state by projected gradient descent");
    tomo->add_option("problem", o.inputs, "Problem file")->required()->expected(1);
    tomo->add_option("--iters", o.iters, "Iteration budget");
    tomo->add_option("--step", o.step, "Fixed step size (default 1/L)")->check(CLI::PositiveNumber);
    tomo->add_option("--lambda", o.lambda, "Also report the kernel-ridge baseline at this lambda")
        ->check(CLI::NonNegativeNumber);
    tomo->add_flag("--strict", o.strict, "Exit 5 if the solver does not converge");
    add_common(tomo);

    auto* sim = app.add_subcommand("simulate", "Multinomial measurement frequencies");
    sim->add_option("files", o.inputs, "State file, then POVM file")->required()->expected(2);
    sim->add_option("-n,--shots", o.samples, "Number of shots")->required();
    sim->add_option("--seed", o.seed, "Generator seed");
    sim->add_option("--problem", o.problem_out, "Also write a tomography problem on the atom kernel");
    add_common(sim);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitParse;
    }

    try {
        if (*pd) return cmd_pd_check(o);
        if (*fac) return cmd_factorize(o);
        if (*gp) return cmd_gp(o);
        if (*dil) return cmd_dilate(o);
        if (*comp) return cmd_complete(o);
        if (*tomo) return cmd_tomography(o);
        if (*sim) return cmd_simulate(o);
    } catch (const opk::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitMath;
    }
    return kExitOk;
}
