#include "fosls/study.hpp"

#include "fosls/svg_plot.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

namespace fosls {

Rates predicted_rates(double s, int ps, int pv, VectorFamily family)
{
    const double sp1 = s + 1.0;
    Rates r;
    r.gradu = std::min({sp1, double(ps), double(pv + 1)});
    r.u = pv == 1 ? std::min(sp1, 2.0) : r.gradu + 1.0;
    r.phi = family == VectorFamily::RT ? std::min({sp1, double(ps + 1), double(pv)})
                                       : std::min({sp1, double(ps + 1), double(pv + 1)});
    return r;
}

long long free_dof_count(const ProblemConfig& config, int n_fan, int level)
{
    // Coarse fan, then red refinement: V' = V + E, E' = 2E + 3T, T' = 4T, B' = 2B.
    long long v = n_fan + 1, e = 2LL * n_fan, t = n_fan, b = n_fan;
    for (int l = 0; l < level; ++l) {
        v += e;
        e = 2 * e + 3 * t;
        t *= 4;
        b *= 2;
    }
    const long long k = config.ps, p = config.pv;
    long long scalar = v + (k - 1) * e + (k - 1) * (k - 2) / 2 * t;
    if (config.bc == BoundaryCondition::dirichlet) scalar -= k * b;

    const bool rt = config.family == VectorFamily::RT;
    const long long per_edge = rt ? p : p + 1;
    const long long interior = rt ? p * (p - 1) : p * p - 1;
    long long vector = per_edge * e + interior * t;
    if (config.bc == BoundaryCondition::neumann) vector -= per_edge * b;
    return scalar + vector;
}

void StudyConfig::validate() const
{
    try {
        make_case(case_name, gamma);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be a positive finite number");
    if (levels < 2) throw ConfigError("levels must be at least 2");
    if (first_level < 0) throw ConfigError("first level must be nonnegative");
    if (n_fan < 3) throw ConfigError("n_fan must be at least 3");
    if (ps.empty() || pv.empty()) throw ConfigError("degree lists must not be empty");
    for (int p : ps)
        if (p < 1 || p > kMaxScalarDegree) throw ConfigError("p_s = " + std::to_string(p) + " outside 1.." + std::to_string(kMaxScalarDegree));
    for (int p : pv)
        if (p < 1 || p > kMaxVectorDegree) throw ConfigError("p_v = " + std::to_string(p) + " outside 1.." + std::to_string(kMaxVectorDegree));
    if (pairing == Pairing::diagonal && ps.size() != pv.size() && ps.size() != 1 && pv.size() != 1)
        throw ConfigError("diagonal pairing needs degree lists of equal length (or one of length 1)");
}

std::vector<std::pair<int, int>> StudyConfig::combinations() const
{
    std::vector<std::pair<int, int>> out;
    if (pairing == Pairing::product) {
        for (int a : ps)
            for (int b : pv) out.emplace_back(a, b);
    } else {
        const std::size_t n = std::max(ps.size(), pv.size());
        for (std::size_t i = 0; i < n; ++i) out.emplace_back(ps[ps.size() == 1 ? 0 : i], pv[pv.size() == 1 ? 0 : i]);
    }
    return out;
}

std::string rate_verdict(double predicted, double observed)
{
    return std::isfinite(observed) && observed >= predicted - 0.25 ? "PASS" : "FAIL";
}

bool StudyResult::all_pass() const
{
    return std::all_of(summary.begin(), summary.end(), [](const SummaryRow& r) { return r.verdict != "FAIL"; });
}

std::string combination_stem(const StudyConfig& config, int ps, int pv)
{
    return config.case_name + "_" + to_string(config.family) + "_ps" + std::to_string(ps) + "_pv" + std::to_string(pv);
}

namespace {

ProblemConfig problem_config(const StudyConfig& config, const ManufacturedCase& c, int ps, int pv)
{
    ProblemConfig pc;
    pc.gamma = config.gamma;
    pc.bc = c.bc;
    pc.ps = ps;
    pc.pv = pv;
    pc.family = config.family;
    return pc;
}

double last_or_nan(const std::vector<double>& v)
{
    return v.empty() ? std::numeric_limits<double>::quiet_NaN() : v.back();
}

void write_plots(const StudyConfig& config, const CombinationResult& combo)
{
    const auto& levels = combo.report.levels;
    std::vector<double> h, sqrt_dof;
    for (const auto& l : levels) {
        h.push_back(l.h);
        sqrt_dof.push_back(std::sqrt(double(l.dof_total)));
    }
    struct Norm {
        const char* key;
        const char* label;
        double rate;
        double ErrorReport::*err;
    };
    const Norm norms[] = {{"u", "||u - u_h||", combo.predicted.u, &ErrorReport::err_u},
                          {"gradu", "||grad(u - u_h)||", combo.predicted.gradu, &ErrorReport::err_gradu},
                          {"phi", "||phi - phi_h||", combo.predicted.phi, &ErrorReport::err_phi}};
    const std::string stem = combination_stem(config, combo.ps, combo.pv);
    for (const Norm& n : norms) {
        std::vector<double> err;
        for (const auto& l : levels) err.push_back(l.*n.err);
        for (bool vs_h : {true, false}) {
            LogLogPlot plot;
            plot.title = stem + ": " + n.label;
            plot.x_label = vs_h ? "h" : "sqrt(DOF)";
            plot.y_label = n.label;
            plot.series.push_back({n.label, vs_h ? h : sqrt_dof, err});
            char label[64];
            std::snprintf(label, sizeof label, "predicted slope %g", n.rate);
            plot.reference = ReferenceSlope{vs_h ? n.rate : -n.rate, label};
            std::ofstream os(config.out_dir / (stem + "_" + n.key + (vs_h ? "_h.svg" : "_dof.svg")));
            write_svg(os, plot);
        }
    }
}

}  // namespace

CombinationResult run_combination(const StudyConfig& config, int ps, int pv, std::ostream* log)
{
    const ManufacturedCase c = make_case(config.case_name, config.gamma);
    const ProblemConfig pc = problem_config(config, c, ps, pv);

    CombinationResult result;
    result.ps = ps;
    result.pv = pv;
    result.predicted = predicted_rates(c.regularity, ps, pv, config.family);

    std::vector<ErrorReport> levels;
    int level = config.first_level;
    try {
        pc.validate();
        auto mesh = std::make_shared<const Mesh>(build_disk_mesh(config.n_fan, config.first_level));
        for (int i = 0; i < config.levels; ++i, ++level) {
            if (i > 0) mesh = std::make_shared<const Mesh>(refine_uniform(*mesh));
            const auto start = std::chrono::steady_clock::now();
            auto spaces = std::make_shared<const FoslsSpaces>(mesh, pc);
            const FoslsSystem system = assemble(*spaces, c.f, c.discontinuity_radius);
            const SolutionPair sol = solve(spaces, system, config.solver);
            ErrorReport err = compute_errors(sol, c);
            err.level = level;
            levels.push_back(err);

            LevelDiagnostics diag;
            diag.solver = sol.report().method;
            diag.galerkin_residual = galerkin_residual(system, sol.packed()).relative_norm;
            diag.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            result.diagnostics.push_back(diag);
            if (log) {
                char line[200];
                std::snprintf(line, sizeof line, "  level %d: %d dofs, %s, %.2fs, e_u %.3e, e_gradu %.3e, e_phi %.3e\n", level,
                              err.dof_total, diag.solver.c_str(), diag.seconds, err.err_u, err.err_gradu, err.err_phi);
                *log << line << std::flush;
            }
        }
    } catch (const std::exception& e) {
        result.failure = "level " + std::to_string(level) + ": " + e.what();
    }
    try {
        result.report = make_convergence_report(std::move(levels));
    } catch (const std::exception& e) {
        if (!result.failure) result.failure = std::string("rates: ") + e.what();
    }
    return result;
}

StudyResult run_study(const StudyConfig& config, std::ostream* log)
{
    config.validate();
    const ManufacturedCase c = make_case(config.case_name, config.gamma);
    const int last_level = config.first_level + config.levels - 1;
    for (auto [ps, pv] : config.combinations()) {
        const long long dofs = free_dof_count(problem_config(config, c, ps, pv), config.n_fan, last_level);
        if (dofs > config.max_dofs && !config.force)
            throw ConfigError("(p_s, p_v) = (" + std::to_string(ps) + ", " + std::to_string(pv) + ") needs " + std::to_string(dofs) +
                              " DOFs on level " + std::to_string(last_level) + ", above the limit of " +
                              std::to_string(config.max_dofs) + " (use --force)");
    }
    if (config.write_files) std::filesystem::create_directories(config.out_dir);

    StudyResult result;
    for (auto [ps, pv] : config.combinations()) {
        if (log) *log << combination_stem(config, ps, pv) << "\n";
        CombinationResult combo = run_combination(config, ps, pv, log);
        if (combo.failure && log) *log << "  aborted: " << *combo.failure << "\n";

        const std::pair<const char*, double> observed[] = {{"u", last_or_nan(combo.report.eoc_u)},
                                                           {"gradu", last_or_nan(combo.report.eoc_gradu)},
                                                           {"phi", last_or_nan(combo.report.eoc_phi)}};
        const double predicted[] = {combo.predicted.u, combo.predicted.gradu, combo.predicted.phi};
        for (int k = 0; k < 3; ++k) {
            SummaryRow row{config.case_name, config.family, ps, pv, observed[k].first, predicted[k], observed[k].second, "SKIP"};
            if (config.expected_rates || combo.failure)
                row.verdict = combo.failure ? "FAIL" : rate_verdict(row.predicted, row.observed);
            result.summary.push_back(row);
        }

        if (config.write_files) {
            const std::string stem = combination_stem(config, ps, pv);
            {
                std::ofstream os(config.out_dir / (stem + ".csv"));
                write_csv(os, combo.report);
            }
            if (!combo.report.levels.empty()) write_plots(config, combo);
            if (combo.failure) {
                std::ofstream os(config.out_dir / (stem + ".failure.txt"));
                os << *combo.failure << "\n";
            }
        }
        result.combinations.push_back(std::move(combo));
    }
    if (config.write_files) {
        std::ofstream os(config.out_dir / "summary.csv");
        write_summary(os, result.summary);
    }
    return result;
}

void write_summary(std::ostream& os, const std::vector<SummaryRow>& rows)
{
    os << "case,family,ps,pv,norm,predicted,observed,verdict\n";
    for (const auto& r : rows) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4f", r.observed);
        os << r.case_name << ',' << to_string(r.family) << ',' << r.ps << ',' << r.pv << ',' << r.norm << ',' << r.predicted << ','
           << (std::isfinite(r.observed) ? buf : "nan") << ',' << r.verdict << '\n';
    }
}

}  // namespace fosls
