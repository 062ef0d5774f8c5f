#pragma once

#include "fosls/error_metrics.hpp"
#include "fosls/fosls.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fosls {

/// Asymptotic L2 rates of (e_u, grad e_u, e_phi) for f in H^s.
struct Rates {
    double u = 0.0;
    double gradu = 0.0;
    double phi = 0.0;
};

/// e_u:      min(s+1, 2) if pv = 1, else min(s+1, ps, pv+1) + 1
/// grad e_u: min(s+1, ps, pv+1)
/// e_phi:    min(s+1, ps+1, pv) for RT, min(s+1, ps+1, pv+1) for BDM
/// `s` may be +infinity.
Rates predicted_rates(double s, int ps, int pv, VectorFamily family);

/// Free DOFs of the coupled system on the n_fan disk refined `level` times,
/// counted from the mesh entity recursion without building anything.
long long free_dof_count(const ProblemConfig& config, int n_fan, int level);

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct StudyConfig {
    enum class Pairing { diagonal, product };

    std::string case_name = "smooth";
    double gamma = 1.0;
    VectorFamily family = VectorFamily::RT;
    std::vector<int> ps{1};
    std::vector<int> pv{1};
    /// diagonal pairs ps[i] with pv[i] (a single entry is broadcast); product
    /// runs every (ps, pv).
    Pairing pairing = Pairing::diagonal;
    int levels = 4;  // number of levels
    int first_level = 0;
    int n_fan = 6;
    std::filesystem::path out_dir = "study_out";
    /// Compare against the predicted rates; without it every verdict is SKIP.
    bool expected_rates = true;
    /// Allow systems above max_dofs.
    bool force = false;
    long long max_dofs = 300000;
    bool write_files = true;
    SolverOptions solver;

    /// Throws ConfigError.
    void validate() const;
    std::vector<std::pair<int, int>> combinations() const;
};

struct LevelDiagnostics {
    std::string solver;
    double galerkin_residual = 0.0;  // relative
    double seconds = 0.0;
};

struct CombinationResult {
    int ps = 0;
    int pv = 0;
    ConvergenceReport report;
    std::vector<LevelDiagnostics> diagnostics;
    Rates predicted;
    /// Set when a level failed; the combination is then incomplete.
    std::optional<std::string> failure;
};

struct SummaryRow {
    std::string case_name;
    VectorFamily family = VectorFamily::RT;
    int ps = 0;
    int pv = 0;
    std::string norm;  // u, gradu, phi
    double predicted = 0.0;
    double observed = 0.0;  // last-interval EOC, NaN if unavailable
    std::string verdict;    // PASS, FAIL or SKIP
};

/// PASS iff observed >= predicted - 0.25; NaN observations fail.
std::string rate_verdict(double predicted, double observed);

struct StudyResult {
    std::vector<CombinationResult> combinations;
    std::vector<SummaryRow> summary;
    bool all_pass() const;
};

/// Runs one (ps, pv) combination. Level failures are caught and recorded.
CombinationResult run_combination(const StudyConfig& config, int ps, int pv, std::ostream* log = nullptr);

/// Runs every combination and, when write_files is set, writes into out_dir:
///   <case>_<family>_ps<p>_pv<q>.csv                    per combination
///   <case>_<family>_ps<p>_pv<q>_<norm>_{h,dof}.svg     per norm
///   summary.csv                                         all combinations
/// Throws ConfigError for an invalid config or one over the DOF guardrail.
StudyResult run_study(const StudyConfig& config, std::ostream* log = nullptr);

void write_summary(std::ostream& os, const std::vector<SummaryRow>& rows);
std::string combination_stem(const StudyConfig& config, int ps, int pv);

}  // namespace fosls
