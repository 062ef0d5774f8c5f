// Convergence study driver: fosls_study --case smooth --family RT --ps 1,2,3 --pv 1,2,3 --levels 5
// Exit codes: 0 all rates PASS, 1 some FAIL, 2 configuration error.

#include "fosls/study.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    fosls::StudyConfig config;
    std::string family = "RT";
    std::string pairing = "diagonal";
    std::string solver = "auto";
    std::string out_dir = config.out_dir.string();
    bool no_expected = false;
    bool quiet = false;

    CLI::App app{"FOSLS convergence study on the unit disk"};
    app.set_config("--config", "", "INI/TOML study file; keys are the long flag names, at top level or in [default]")
        ->transform(CLI::ExistingFile);
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.option_defaults()->always_capture_default();

    app.add_option("--case", config.case_name, "smooth, indicator or dirichlet-smoke")
        ->check(CLI::IsMember({"smooth", "indicator", "dirichlet-smoke"}));
    app.add_option("--family", family, "vector family")->check(CLI::IsMember({"RT", "BDM"}, CLI::ignore_case));
    app.add_option("--ps", config.ps, "scalar degrees")->delimiter(',');
    app.add_option("--pv", config.pv, "vector degrees")->delimiter(',');
    app.add_option("--pairing", pairing, "diagonal pairs the lists entrywise, product runs all pairs")
        ->check(CLI::IsMember({"diagonal", "product"}));
    app.add_option("--levels", config.levels, "number of mesh levels")->check(CLI::Range(2, 12));
    app.add_option("--first-level", config.first_level, "refinement level of the coarsest mesh")->check(CLI::NonNegativeNumber);
    app.add_option("--n-fan", config.n_fan, "triangles of the coarse fan")->check(CLI::Range(3, 1000));
    app.add_option("--gamma", config.gamma, "reaction coefficient")->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--solver", solver, "auto, cholesky or cg")->check(CLI::IsMember({"auto", "cholesky", "cg"}));
    app.add_option("--max-dofs", config.max_dofs, "largest system allowed without --force")->check(CLI::PositiveNumber);
    app.add_flag("--force", config.force, "run systems above --max-dofs");
    app.add_flag("--no-expected", no_expected, "report observed rates only");
    app.add_flag("-q,--quiet", quiet, "no per-level progress");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        config.family = fosls::parse_family(family);
        config.pairing = pairing == "product" ? fosls::StudyConfig::Pairing::product : fosls::StudyConfig::Pairing::diagonal;
        config.out_dir = out_dir;
        config.expected_rates = !no_expected;
        if (solver == "cholesky") config.solver.method = fosls::SolverOptions::Method::cholesky;
        if (solver == "cg") config.solver.method = fosls::SolverOptions::Method::cg;

        const fosls::StudyResult result = fosls::run_study(config, quiet ? nullptr : &std::cerr);
        fosls::write_summary(std::cout, result.summary);
        return result.all_pass() ? 0 : 1;
    } catch (const fosls::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
