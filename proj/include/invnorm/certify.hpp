#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "invnorm/eig.hpp"
#include "invnorm/interval.hpp"
#include "invnorm/liu.hpp"
#include "invnorm/problems.hpp"
#include "invnorm/sup_norm.hpp"

namespace invnorm {

// Error raised inside a pipeline stage; what() starts with "[stage] ".
struct StageError : std::runtime_error {
  StageError(std::string stage, const std::string& msg)
      : std::runtime_error("[" + stage + "] " + msg), stage(std::move(stage)) {}
  std::string stage;
};

enum class RefineMode { automatic, always, never };
enum class RhoMode { gap_top, nu };
RefineMode parse_refine_mode(const std::string& s);
RhoMode parse_rho_mode(const std::string& s);
std::string to_string(RefineMode m);
std::string to_string(RhoMode m);

struct PipelineOptions {
  int n_solve = 40;
  int n_cert = 60;
  int k = 10;
  double sigma_margin = 1e-4;
  ChMode ch_mode = ChMode::heuristic;
  std::optional<double> ch_value;
  int quad_order = 0;  // 0: derived from the polynomial degrees
  bool float_only = false;
  // User-supplied norm bounds; each must dominate the computed enclosure.
  std::optional<double> norm_Q, norm_QQstar, norm_shift;
  SupNormOptions sup;
  RefineMode refine = RefineMode::automatic;
  RhoMode rho = RhoMode::gap_top;
  double strict_tol = 1e-10;
  EigOptions eig;
  NewtonOptions newton;
  std::optional<VectorField> solution;  // pinned approximate solution
  std::uint64_t seed = 0;
  bool corrupt_gram = false;  // test hook: damages the Gram assembly
};

// 1/sqrt(lambda) with outward rounding when lambda.lo > 0.
std::optional<Interval> inverse_norm_bound(const Interval& lambda_lower);

struct SpectrumEntry {
  double value = 0.0;
  double eta = 0.0;  // residual enclosure radius
  bool operator==(const SpectrumEntry&) const = default;
};

struct BoundEntry {
  Interval lambda_h{0.0};
  Interval lower{0.0};
  Interval upper{0.0};
  bool operator==(const BoundEntry&) const = default;
};

struct GapEntry {
  int j = 0;
  int j_cluster = 0;
  Interval nu{0.0};
  Interval lower_j{0.0};
  bool operator==(const GapEntry&) const = default;
};

struct RefinedEntry {
  Interval rho{0.0};
  std::vector<Interval> tau;
  std::vector<Interval> lower;
  Interval lambda1_lower{0.0};
  std::vector<double> ritz;
  int trials = 0;
  bool operator==(const RefinedEntry&) const = default;
};

struct Certificate {
  std::string problem;
  std::string descriptor;
  std::string hash;
  int dim = 0, m = 0;
  int n_solve = 0, n_cert = 0, k = 0;
  std::uint64_t seed = 0;

  std::string newton_start;
  double newton_residual = 0.0;
  int newton_iterations = 0;
  std::vector<std::string> branches;

  Interval C_p{0.0}, C_h{0.0};
  std::string ch_provenance;
  Interval sigma{0.0}, norm_Q{0.0}, norm_QQstar{0.0}, norm_shift{0.0};
  std::string norm_provenance;
  bool norms_coarse = false;
  Interval C_Ms{0.0};

  std::string backend;
  std::vector<SpectrumEntry> spectrum;
  std::vector<BoundEntry> bounds;
  std::optional<GapEntry> gap;
  std::optional<RefinedEntry> refined;
  std::optional<Interval> lambda_lower;
  std::string lambda_source;  // "liu" or "lehmann"
  std::optional<Interval> inv_norm_upper;
  bool certified = false;
  std::string status;       // certified | no-gap | not-positive
  std::string rigor_level;  // interval+residual | float-only
  std::string guarantee;    // guaranteed | guaranteed-modulo-C_h | not-guaranteed

  double gram_quadrature_defect = 0.0;
  double q_symmetry_defect = 0.0;
  double form_consistency = -1.0;
  double lehmann_symmetry_defect = 0.0;

  std::vector<std::pair<std::string, double>> timings;  // seconds per stage

  bool operator==(const Certificate&) const = default;
  // Equality ignoring the timings.
  bool same_result(const Certificate& o) const;
};

struct PipelineResult {
  Certificate certificate;
  ApproxSolution solution;  // empty for fixed-coefficient problems
};

PipelineResult run_pipeline(const ProblemSpec& problem, const PipelineOptions& opt);

// 0 when a norm bound was certified, 2 for a valid run without one.
int exit_code(const Certificate& c);

// Stable hash of the problem descriptor and the run parameters (FNV-1a, hex).
std::string certificate_hash(const ProblemSpec& problem, const PipelineOptions& opt);

std::string to_json(const Certificate& c);
Certificate certificate_from_json(const std::string& text);
void save_certificate(const Certificate& c, const std::string& path);
Certificate load_certificate(const std::string& path);

// CSV tables over a set of certificates, sorted by n_cert. Numbers use 17
// significant digits; missing values print as "--".
std::string table1_csv(std::vector<Certificate> certs);
std::string table2_csv(std::vector<Certificate> certs);

// Thread count of the BLAS/LAPACK backend.
void set_threads(int n);

// Fails with a diagnostic when two dense matrices of the given order do not
// fit in the memory available to the process.
void check_dense_memory(long order, int matrices);

}  // namespace invnorm
